#include "spinsim/experiments.hpp"

#include <cmath>
#include <numeric>

#include "spinsim/errors.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {

namespace {

// Experiment tags entering the sub-seed derivation.
constexpr std::uint64_t kTagUncertainty = 0x756e6365;
constexpr std::uint64_t kTagTriple = 0x74726970;
constexpr std::uint64_t kTagRobertson = 0x726f6265;
constexpr std::uint64_t kTagDirection = 0x64697265;

std::uint64_t momentKey(const Vec3& m) {
    std::uint64_t k = rng::doubleKey(m.x());
    k = rng::combine(k, rng::doubleKey(m.y()));
    k = rng::combine(k, rng::doubleKey(m.z()));
    return k;
}

constexpr int kSigns[2] = {+1, -1};

// Prepares the initial moment with the explicit stage devices: incoming
// messengers are polarized along +z, flipped onto +y, then turned about z
// until the moment points along the requested in-plane direction.
Message explicitStage1Emit(const Vec3& target) {
    if (target.z() == 1.0) {
        return messageForMoment(Vec3::UnitZ());
    }
    if (std::abs(target.z()) > 1e-12) {
        throw ConfigError(
            "explicit stage-1 preparation requires a moment in the x-y plane or along +z");
    }
    // flip takes z to +y; a turn by theta1 then reaches (sin t1, cos t1, 0)
    const double theta1 = std::atan2(target.x(), target.y());
    Message msg = messageForMoment(Vec3::UnitZ());
    msg = spinFlip(msg);
    return detune(msg, theta1);
}

} // namespace

std::uint64_t CountTable::detected() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t TripleCountTable::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

SettingCounts runSettingPair(const UncertaintyRunConfig& cfg, double phi, int s1, int s2) {
    const SourceConfig source = makeSource(cfg.initialMoment);
    const std::uint64_t settingKey =
        rng::deriveSeed(cfg.masterSeed, {kTagUncertainty, momentKey(cfg.initialMoment),
                                         rng::doubleKey(phi), static_cast<std::uint64_t>(s1 + 1),
                                         static_cast<std::uint64_t>(s2 + 1)});

    Analyzer first({Vec3::UnitZ(), s1, cfg.model, AnalyzerMode::Absorbing, cfg.gamma},
                   rng::combine(settingKey, 0));
    Analyzer second({Vec3::UnitZ(), s2, cfg.model, AnalyzerMode::Absorbing, cfg.gamma},
                    rng::combine(settingKey, 1));

    const double theta2 = phi + M_PI / 2.0;
    const double theta4 = -phi - M_PI / 2.0;

    SettingCounts tally;
    DetectorCounter detector;

    // One messenger lifecycle; returns detected / destroyed through the
    // captured tallies only when `counted` is set.
    auto lifecycle = [&](bool counted) {
        if (counted) {
            ++tally.emitted;
        }
        Message msg = cfg.explicitStage1 ? explicitStage1Emit(cfg.initialMoment)
                                         : sourceEmit(source);
        msg = detune(msg, theta2);
        msg = spinFlip(msg);
        msg = detune(msg, cfg.theta3);

        const AnalyzerOutcome out1 = first.process(msg);
        if (!out1.passed) {
            if (counted) {
                ++tally.destroyed;
            }
            return;
        }

        msg = spinFlip(out1.message);
        msg = detune(msg, theta4);
        msg = spinFlip(msg);
        msg = detune(msg, cfg.theta5);

        const AnalyzerOutcome out2 = second.process(msg);
        if (!out2.passed) {
            if (counted) {
                ++tally.destroyed;
            }
            return;
        }
        if (counted) {
            detector.hit();
        }
    };

    // DLM warm-up: keep the learning transient out of the statistics. The
    // second analyzer only sees survivors of the first, so warm-up is
    // counted per analyzer, not per source event, and capped so settings
    // whose first analyzer passes (almost) nothing still terminate; there
    // the starved analyzer decides (almost) no counted events either.
    if (cfg.model == AnalyzerModel::Dlm && cfg.dlmWarmup > 0) {
        const std::uint64_t cap = 64 * cfg.dlmWarmup;
        for (std::uint64_t sent = 0;
             sent < cap && (first.processed() < cfg.dlmWarmup ||
                            second.processed() < cfg.dlmWarmup);
             ++sent) {
            lifecycle(false);
        }
    }

    for (std::uint64_t i = 0; i < cfg.eventsPerSetting; ++i) {
        lifecycle(true);
    }
    tally.detected = detector.count;
    return tally;
}

CountTable runDetunedTable(const UncertaintyRunConfig& cfg, double phi) {
    CountTable table;
    for (int s1 : kSigns) {
        for (int s2 : kSigns) {
            const SettingCounts run = runSettingPair(cfg, phi, s1, s2);
            table.cell(s1, s2) = run.detected;
            table.emitted += run.emitted;
            table.destroyed += run.destroyed;
        }
    }
    return table;
}

std::vector<PhiTables> runUncertaintySweep(const UncertaintyRunConfig& cfg) {
    UncertaintyRunConfig cfgX = cfg;
    cfgX.initialMoment = Vec3::UnitX();
    UncertaintyRunConfig cfgY = cfg;
    cfgY.initialMoment = Vec3::UnitY();

    std::vector<PhiTables> result;
    result.reserve(cfg.detuningGrid.size());
    for (double phi : cfg.detuningGrid) {
        result.push_back({phi, runDetunedTable(cfgX, phi), runDetunedTable(cfgY, phi)});
    }
    return result;
}

TripleCountTable runFilteringTriple(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                    std::uint64_t nEvents, std::uint64_t masterSeed) {
    const SourceConfig source = makeSource(a);
    const std::uint64_t runKey = rng::deriveSeed(
        masterSeed, {kTagTriple, momentKey(a), momentKey(b), momentKey(c), momentKey(d)});

    const AnalyzerModel model = AnalyzerModel::Probabilistic;
    Analyzer first({b, +1, model, AnalyzerMode::Splitting}, rng::combine(runKey, 0));
    Analyzer second({c, +1, model, AnalyzerMode::Splitting}, rng::combine(runKey, 1));
    Analyzer third({d, +1, model, AnalyzerMode::Splitting}, rng::combine(runKey, 2));

    TripleCountTable table;
    for (std::uint64_t i = 0; i < nEvents; ++i) {
        ++table.emitted;
        const AnalyzerOutcome out1 = first.process(sourceEmit(source));
        const AnalyzerOutcome out2 = second.process(out1.message);
        const AnalyzerOutcome out3 = third.process(out2.message);
        ++table.cell(out1.branch, out2.branch, out3.branch);
    }
    return table;
}

std::vector<RobertsonPoint> runRobertsonSweep(const RobertsonRunConfig& cfg) {
    std::vector<RobertsonPoint> result;
    result.reserve(cfg.azGrid.size());

    for (double az : cfg.azGrid) {
        if (!(az >= -1.0 && az <= 1.0)) {
            throw ConfigError("a_z grid values must lie in [-1, 1]");
        }
        const std::uint64_t pointKey =
            rng::deriveSeed(cfg.masterSeed, {kTagRobertson, rng::doubleKey(az)});

        rng::Stream directionStream(rng::combine(pointKey, kTagDirection));
        const double r = directionStream.uniform01();
        const double radius = std::sqrt(std::max(0.0, 1.0 - az * az));
        const Vec3 direction(radius * std::cos(kTwoPi * r), radius * std::sin(kTwoPi * r), az);

        const SourceConfig source = makeSource(direction);
        const std::array<Vec3, 6> axes = {Vec3::UnitX(),  -Vec3::UnitX(), Vec3::UnitY(),
                                          -Vec3::UnitY(), Vec3::UnitZ(),  -Vec3::UnitZ()};
        std::array<std::uint64_t, 6> passed{};
        for (std::size_t axisIndex = 0; axisIndex < axes.size(); ++axisIndex) {
            Analyzer analyzer({axes[axisIndex], +1, AnalyzerModel::Probabilistic,
                               AnalyzerMode::Absorbing},
                              rng::combine(pointKey, axisIndex));
            for (std::uint64_t i = 0; i < cfg.eventsPerAxis; ++i) {
                const AnalyzerOutcome out = analyzer.process(sourceEmit(source));
                if (out.passed) {
                    ++passed[axisIndex];
                }
            }
        }

        auto estimate = [](std::uint64_t plus, std::uint64_t minus) {
            const double total = static_cast<double>(plus + minus);
            return total > 0.0 ? (static_cast<double>(plus) - static_cast<double>(minus)) / total
                               : 0.0;
        };
        result.push_back({az, direction, estimate(passed[0], passed[1]),
                          estimate(passed[2], passed[3]), estimate(passed[4], passed[5])});
    }
    return result;
}

namespace {
constexpr std::uint64_t kMaxGridPoints = 1000000;
}

std::vector<double> buildPhiGrid(double start, double end, double step) {
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(end)) {
        throw ConfigError("grid step must be positive and the bounds finite");
    }
    if ((end - start) / step > static_cast<double>(kMaxGridPoints)) {
        throw ConfigError("grid would exceed " + std::to_string(kMaxGridPoints) + " points");
    }
    std::vector<double> grid;
    for (std::uint64_t k = 0;; ++k) {
        const double value = start + static_cast<double>(k) * step;
        if (value >= end - 1e-12) {
            break;
        }
        grid.push_back(value);
    }
    if (grid.empty()) {
        throw ConfigError("grid is empty: end must exceed start by at least one step");
    }
    return grid;
}

std::vector<double> buildAzGrid(double azStep) {
    if (!(azStep > 0.0 && azStep <= 2.0)) {
        throw ConfigError("a_z step must lie in (0, 2]");
    }
    const auto n = static_cast<std::uint64_t>(std::lround(2.0 / azStep));
    if (n > kMaxGridPoints) {
        throw ConfigError("grid would exceed " + std::to_string(kMaxGridPoints) + " points");
    }
    std::vector<double> grid;
    grid.reserve(n + 1);
    for (std::uint64_t k = 0; k <= n; ++k) {
        grid.push_back(-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n));
    }
    return grid;
}

} // namespace spinsim
