#pragma once

#include <cstdint>
#include <optional>

#include "spinsim/rng.hpp"
#include "spinsim/spin.hpp"

namespace spinsim {

// Event-processing rules of the physical devices: source, spin flipper,
// detuning segment, spin analyzer (probabilistic or deterministic learning
// machine) and counting detector. Messengers are processed strictly one at a
// time; a run owns its device states, so distinct runs may execute in
// parallel without sharing anything.

enum class AnalyzerModel { Probabilistic, Dlm };
enum class AnalyzerMode { Absorbing, Splitting };

struct SourceConfig {
    Vec3 initialMoment; // unit vector
};

SourceConfig makeSource(const Vec3& initialMoment);

// Message whose derived moment equals the given unit vector, with psi2 = 0
// and phases canonicalized (moments in the x-y plane get theta = pi/2).
Message messageForMoment(const Vec3& moment);

// Emits a messenger already carrying the prepared initial moment. Preparing
// the post-stage-1 state directly is equivalent to running the preparation
// devices explicitly; experiments offer both paths.
Message sourceEmit(const SourceConfig& cfg);

// Magnetic-field devices. A static field along e turns the moment about e
// per the precession equation dm/dt = m x B, which is a left-handed turn:
// a nominal exposure angle chi maps to rotate(msg, {e, -chi}). The flipper
// takes z to +y.
Message spinFlip(const Message& msg);             // quarter turn about x
Message detune(const Message& msg, double phi);   // turn about z by phi

struct AnalyzerConfig {
    Vec3 axis;                 // unit vector; the experiments here use z
    int orientation;           // S = +1 or -1
    AnalyzerModel model = AnalyzerModel::Probabilistic;
    AnalyzerMode mode = AnalyzerMode::Absorbing;
    double gamma = 0.999;      // DLM learning parameter, in [0,1)
};

struct AnalyzerOutcome {
    int branch;       // x = +1 or -1
    bool passed;      // false only for an absorbing analyzer with x = -1
    Message message;  // eigenstate along branch * orientation * axis
};

// Stateful spin analyzer. The probabilistic model consumes exactly one
// pseudo-random number per messenger; the DLM model consumes none and keeps
// an internal value u in [-1,1] that learns the mean projection.
class Analyzer {
public:
    Analyzer(const AnalyzerConfig& cfg, std::uint64_t streamSeed);

    AnalyzerOutcome process(const Message& msg);

    double internalU() const { return internalU_; }
    std::uint64_t processed() const { return processed_; }
    std::uint64_t draws() const { return stream_ ? stream_->draws() : 0; }
    const AnalyzerConfig& config() const { return cfg_; }

private:
    AnalyzerConfig cfg_;
    double internalU_ = 0.0;
    std::uint64_t processed_ = 0;
    std::optional<rng::Stream> stream_;
};

struct DetectorCounter {
    std::uint64_t count = 0;
    // 100% detection efficiency: every impinging messenger is counted and
    // destroyed.
    void hit() { ++count; }
};

} // namespace spinsim
