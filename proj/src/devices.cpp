#include "spinsim/devices.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

void requireUnit(const Vec3& v, const char* what) {
    if (std::abs(v.norm() - 1.0) > 1e-12) {
        throw ConfigError(std::string(what) + " must be a unit vector");
    }
}

} // namespace

SourceConfig makeSource(const Vec3& initialMoment) {
    requireUnit(initialMoment, "source moment");
    return {initialMoment};
}

Message messageForMoment(const Vec3& moment) {
    const double z = std::clamp(moment.z(), -1.0, 1.0);
    if (z == 1.0) {
        return {0.0, 0.0, 0.0};
    }
    if (z == -1.0) {
        return {0.0, 0.0, M_PI};
    }
    return {reduceAngle(std::atan2(moment.y(), moment.x())), 0.0, std::acos(z)};
}

Message sourceEmit(const SourceConfig& cfg) {
    return messageForMoment(cfg.initialMoment);
}

Message spinFlip(const Message& msg) {
    return rotate(msg, {Vec3::UnitX(), -M_PI / 2.0});
}

Message detune(const Message& msg, double phi) {
    return rotate(msg, {Vec3::UnitZ(), -phi});
}

Analyzer::Analyzer(const AnalyzerConfig& cfg, std::uint64_t streamSeed) : cfg_(cfg) {
    requireUnit(cfg.axis, "analyzer axis");
    if (cfg.orientation != 1 && cfg.orientation != -1) {
        throw ConfigError("analyzer orientation must be +1 or -1");
    }
    if (cfg.model == AnalyzerModel::Dlm && !(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
        throw ConfigError("DLM gamma must lie in [0,1)");
    }
    if (cfg.model == AnalyzerModel::Probabilistic) {
        stream_.emplace(streamSeed);
    }
}

AnalyzerOutcome Analyzer::process(const Message& msg) {
    ++processed_;
    const double projection = momentOf(msg).dot(cfg_.axis) * cfg_.orientation;

    int branch;
    if (cfg_.model == AnalyzerModel::Probabilistic) {
        const double r = stream_->uniform01();
        branch = (0.5 * (1.0 + projection) > r) ? 1 : -1; // ties break to -1
    } else {
        branch = (projection > cfg_.gamma * internalU_) ? 1 : -1;
        internalU_ = cfg_.gamma * internalU_ + (1.0 - cfg_.gamma) * branch;
        assert(internalU_ >= -1.0 && internalU_ <= 1.0);
    }

    const bool passed = cfg_.mode == AnalyzerMode::Splitting || branch == 1;
    const Vec3 outDirection = (branch * cfg_.orientation) * cfg_.axis;
    return {branch, passed, messageForMoment(outDirection)};
}

} // namespace spinsim
