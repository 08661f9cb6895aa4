#include "spinsim/stats.hpp"

#include <cmath>

#include "spinsim/errors.hpp"

namespace spinsim::stats {

namespace {

constexpr int kSigns[2] = {+1, -1};

// Standard error of a signed cell sum g = sum(sign_k n_k) / T over four
// independent binomial cells with `trials` attempts each.
double signedSumStderr(const CountTable& table, double g,
                       double (*sign)(int s1, int s2)) {
    const double total = static_cast<double>(table.detected());
    const double trials = static_cast<double>(table.perSetting());
    if (total <= 0.0 || trials <= 0.0) {
        return 0.0;
    }
    double variance = 0.0;
    for (int s1 : kSigns) {
        for (int s2 : kSigns) {
            const double n = static_cast<double>(table.cell(s1, s2));
            const double cellVar = n * (1.0 - n / trials); // plug-in binomial
            const double weight = (sign(s1, s2) - g) / total;
            variance += weight * weight * cellVar;
        }
    }
    return std::sqrt(variance);
}

double signS1(int s1, int) { return s1; }
double signS2(int, int s2) { return s2; }
double signS12(int s1, int s2) { return s1 * s2; }

// Standard error of sqrt(x) given x >= 0 and the standard error of x. At
// the boundary x = 0 the estimator is half-normal; the square-root scale is
// the honest magnitude there.
double sqrtStderr(double sqrtValue, double stderrArg) {
    if (sqrtValue > 0.0) {
        return stderrArg / (2.0 * sqrtValue);
    }
    return stderrArg == 0.0 ? 0.0 : std::sqrt(stderrArg);
}

} // namespace

FrequencyTable frequencies(const CountTable& table) {
    const std::uint64_t total = table.detected();
    if (total == 0) {
        throw EmptyTableError("count table has no detected messengers");
    }
    FrequencyTable out;
    out.totalDetected = total;
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
        out.f[i] = static_cast<double>(table.counts[i]) / static_cast<double>(total);
    }
    return out;
}

oracle::SpinMoments momentsOf(const FrequencyTable& freq) {
    oracle::SpinMoments m{0.0, 0.0, 0.0};
    for (int s1 : kSigns) {
        for (int s2 : kSigns) {
            const double f = freq.at(s1, s2);
            m.s1 += s1 * f;
            m.s2 += s2 * f;
            m.s12 += s1 * s2 * f;
        }
    }
    return m;
}

oracle::SpinMoments momentStderr(const CountTable& table) {
    const oracle::SpinMoments m = momentsOf(frequencies(table));
    return {signedSumStderr(table, m.s1, signS1), signedSumStderr(table, m.s2, signS2),
            signedSumStderr(table, m.s12, signS12)};
}

double epsilonFromMoment(double s1MomentX) {
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * s1MomentX));
}

double etaFromMoment(double s2MomentY) {
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * s2MomentY));
}

EpsilonEta epsilonEtaFromCounts(const CountTable& tableX, const CountTable& tableY) {
    const oracle::SpinMoments momentsX = momentsOf(frequencies(tableX));
    const oracle::SpinMoments momentsY = momentsOf(frequencies(tableY));
    const oracle::SpinMoments seX = momentStderr(tableX);
    const oracle::SpinMoments seY = momentStderr(tableY);

    EpsilonEta out;
    out.epsilonClamped = momentsX.s1 > 1.0;
    out.etaClamped = momentsY.s2 > 1.0;
    out.epsilon = epsilonFromMoment(momentsX.s1);
    out.eta = etaFromMoment(momentsY.s2);
    out.stderrEpsilon = sqrtStderr(out.epsilon, 2.0 * seX.s1);
    out.stderrEta = sqrtStderr(out.eta, 2.0 * seY.s2);
    return out;
}

UncertaintyRecord ozawaCheck(double phi, const EpsilonEta& estimate, double sigmaA,
                             double sigmaB) {
    UncertaintyRecord rec;
    rec.phi = phi;
    rec.epsilon = estimate.epsilon;
    rec.eta = estimate.eta;
    rec.stderrEpsilon = estimate.stderrEpsilon;
    rec.stderrEta = estimate.stderrEta;
    rec.ozawaLhs = estimate.epsilon * estimate.eta + estimate.epsilon * sigmaB +
                   sigmaA * estimate.eta;
    rec.heisenbergProduct = estimate.epsilon * estimate.eta;
    rec.bound = 1.0;
    const double dEps = estimate.eta + sigmaB;
    const double dEta = estimate.epsilon + sigmaA;
    rec.stderrLhs = std::hypot(dEps * estimate.stderrEpsilon, dEta * estimate.stderrEta);
    rec.stderrProduct =
        std::hypot(estimate.eta * estimate.stderrEpsilon, estimate.epsilon * estimate.stderrEta);
    return rec;
}

RobertsonRecord robertsonCheck(double az, double sx, double sy, double sz,
                               std::uint64_t nPerAxis) {
    auto estimateVariance = [nPerAxis](double s) {
        if (nPerAxis == 0) {
            return 0.0;
        }
        const double v = (1.0 - s * s * s * s) / (2.0 * static_cast<double>(nPerAxis));
        return std::max(0.0, v);
    };

    RobertsonRecord rec;
    rec.az = az;
    rec.lhs = (1.0 - sx * sx) * (1.0 - sy * sy);
    rec.rhs = sz * sz;
    const double dx = 2.0 * sx * (1.0 - sy * sy);
    const double dy = 2.0 * sy * (1.0 - sx * sx);
    rec.stderrLhs = std::sqrt(dx * dx * estimateVariance(sx) + dy * dy * estimateVariance(sy));
    return rec;
}

double commutatorBound(const Vec3& a) {
    return std::abs(a.z());
}

} // namespace spinsim::stats
