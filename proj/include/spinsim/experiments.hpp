#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinsim/devices.hpp"
#include "spinsim/spin.hpp"

namespace spinsim {

// Wires the devices into the experiment topologies and runs seeded event
// loops over setting grids. Every run is a strictly sequential sequence of
// messenger lifecycles (the source emits a new messenger only after the
// previous one was detected or destroyed) with its own device states and
// pseudo-random streams, keyed on (master seed, setting bits, device id).
// Identical configuration and master seed give bit-identical results.

// Detection counts N(S1,S2|a) accumulated over the four setting-pair runs of
// one detuning angle. Each run contributes one cell; emitted covers all four
// runs equally, so emitted = 4 * events-per-setting and
// sum(counts) + destroyed = emitted.
struct CountTable {
    std::array<std::uint64_t, 4> counts{}; // cell order (+,+), (+,-), (-,+), (-,-)
    std::uint64_t emitted = 0;
    std::uint64_t destroyed = 0;

    static int cellIndex(int s1, int s2) { return (s1 > 0 ? 0 : 2) + (s2 > 0 ? 0 : 1); }
    std::uint64_t cell(int s1, int s2) const {
        return counts[static_cast<std::size_t>(cellIndex(s1, s2))];
    }
    std::uint64_t& cell(int s1, int s2) {
        return counts[static_cast<std::size_t>(cellIndex(s1, s2))];
    }
    std::uint64_t detected() const;
    std::uint64_t perSetting() const { return emitted / 4; }
};

// Counts over the eight beams of the three-splitting-analyzer experiment.
// Splitting analyzers destroy nothing, so the cells sum to emitted.
struct TripleCountTable {
    std::array<std::uint64_t, 8> counts{};
    std::uint64_t emitted = 0;

    static int cellIndex(int s1, int s2, int s3) {
        return (s1 > 0 ? 0 : 4) + (s2 > 0 ? 0 : 2) + (s3 > 0 ? 0 : 1);
    }
    std::uint64_t cell(int s1, int s2, int s3) const {
        return counts[static_cast<std::size_t>(cellIndex(s1, s2, s3))];
    }
    std::uint64_t& cell(int s1, int s2, int s3) {
        return counts[static_cast<std::size_t>(cellIndex(s1, s2, s3))];
    }
    std::uint64_t total() const;
};

struct UncertaintyRunConfig {
    Vec3 initialMoment = Vec3::UnitX();
    std::vector<double> detuningGrid;
    std::uint64_t eventsPerSetting = 10000;
    AnalyzerModel model = AnalyzerModel::Probabilistic;
    double gamma = 0.999;
    std::uint64_t masterSeed = 0;
    // Free rotation angles between each flipper pair and its analyzer. The
    // detection statistics are provably independent of them; they are kept
    // configurable so that invariance can be exercised.
    double theta3 = 0.0;
    double theta5 = 0.0;
    // Run the preparation devices (flipper + turn about z) explicitly
    // instead of emitting the prepared moment directly. Only moments in the
    // x-y plane or along +z can be prepared this way.
    bool explicitStage1 = false;
    // Events each DLM analyzer processes before counting starts, so the
    // learning transient stays out of the statistics.
    std::uint64_t dlmWarmup = 1000;
};

struct SettingCounts {
    std::uint64_t emitted = 0;
    std::uint64_t detected = 0;
    std::uint64_t destroyed = 0;
};

// Sends the configured number of messengers through
//   source -> turn(phi + pi/2) -> flip -> turn(theta3) -> analyzer(z, S1)
//          -> flip -> turn(-phi - pi/2) -> flip -> turn(theta5)
//          -> analyzer(z, S2) -> detector
// with absorbing analyzers, and returns the detector and destruction
// tallies for this (phi, S1, S2).
SettingCounts runSettingPair(const UncertaintyRunConfig& cfg, double phi, int s1, int s2);

// The four setting pairs at one detuning angle, merged into a CountTable.
CountTable runDetunedTable(const UncertaintyRunConfig& cfg, double phi);

struct PhiTables {
    double phi;
    CountTable tableX; // initial moment along x
    CountTable tableY; // initial moment along y
};

// For every detuning angle in the grid, runs the four setting pairs twice,
// once per initial moment x and y: the two tables the error and disturbance
// estimators consume.
std::vector<PhiTables> runUncertaintySweep(const UncertaintyRunConfig& cfg);

// Sends nEvents messengers through three successive splitting analyzers
// along b, c, d; every messenger lands in exactly one of the eight cells.
TripleCountTable runFilteringTriple(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                    std::uint64_t nEvents, std::uint64_t masterSeed);

struct RobertsonRunConfig {
    std::vector<double> azGrid; // each value in [-1, 1]
    std::uint64_t eventsPerAxis = 10000;
    std::uint64_t masterSeed = 0;
};

struct RobertsonPoint {
    double az;
    Vec3 direction; // full initial moment, azimuth drawn uniformly
    double sigmaX;
    double sigmaY;
    double sigmaZ;
};

// For each a_z: draws one uniform number to place the in-plane component of
// the initial moment, sends eventsPerAxis messengers through a single
// absorbing analyzer along each of +-x, +-y, +-z, and forms
// <sigma_k> = (N(+k) - N(-k)) / (N(+k) + N(-k)).
std::vector<RobertsonPoint> runRobertsonSweep(const RobertsonRunConfig& cfg);

// Grid helpers. buildPhiGrid is half-open: start, start+step, ... < end.
// buildAzGrid covers [-1, 1] inclusive in (approximately) azStep steps.
std::vector<double> buildPhiGrid(double start, double end, double step);
std::vector<double> buildAzGrid(double azStep);

} // namespace spinsim
