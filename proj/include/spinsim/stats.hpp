#pragma once

#include <array>
#include <cstdint>

#include "spinsim/experiments.hpp"
#include "spinsim/oracle.hpp"

namespace spinsim::stats {

// Turns count tables into frequencies, expectation estimates, error and
// disturbance estimators, and uncertainty-relation evaluations with
// delta-method standard errors. All functions are pure transformations.

struct FrequencyTable {
    std::array<double, 4> f{}; // same cell order as CountTable
    std::uint64_t totalDetected = 0;

    double at(int s1, int s2) const {
        return f[static_cast<std::size_t>(CountTable::cellIndex(s1, s2))];
    }
};

// Relative frequencies F(S1,S2) = N(S1,S2) / sum N. The normalizer is the
// detected count, not the emitted count: messengers may be destroyed.
// Throws EmptyTableError when nothing was detected.
FrequencyTable frequencies(const CountTable& table);

// The three signed sums <S1>, <S2>, <S1 S2> of a normalized table.
oracle::SpinMoments momentsOf(const FrequencyTable& freq);

// Binomial delta-method standard errors of the three moments. Each cell is
// an independent binomial draw with table.perSetting() trials.
oracle::SpinMoments momentStderr(const CountTable& table);

struct EpsilonEta {
    double epsilon = 0.0;
    double eta = 0.0;
    double stderrEpsilon = 0.0;
    double stderrEta = 0.0;
    bool epsilonClamped = false; // negative squared estimator clamped to 0
    bool etaClamped = false;
};

// Count-based estimators
//   epsilon^2 = 2 - 2<S1> of the x-moment table,
//   eta^2     = 2 - 2<S2> of the y-moment table,
// clamped at zero against sampling noise before the square root.
EpsilonEta epsilonEtaFromCounts(const CountTable& tableX, const CountTable& tableY);

// Estimator cores without error bars, for exact-expectation inputs.
double epsilonFromMoment(double s1MomentX);
double etaFromMoment(double s2MomentY);

struct UncertaintyRecord {
    double phi = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double ozawaLhs = 0.0;          // eps*eta + eps*sigmaB + sigmaA*eta
    double heisenbergProduct = 0.0; // eps*eta
    double bound = 1.0;             // |<[A,B]>|/2 for the z-polarized state
    double stderrEpsilon = 0.0;
    double stderrEta = 0.0;
    double stderrLhs = 0.0;
    double stderrProduct = 0.0;
};

// Evaluates the error-disturbance inequality sides; the state standard
// deviations default to the z-polarized values sigmaA = sigmaB = 1.
UncertaintyRecord ozawaCheck(double phi, const EpsilonEta& estimate, double sigmaA = 1.0,
                             double sigmaB = 1.0);

struct RobertsonRecord {
    double az = 0.0;
    double lhs = 0.0; // (1 - <sx>^2)(1 - <sy>^2)
    double rhs = 0.0; // <sz>^2
    double stderrLhs = 0.0;
};

// Variance-based relation from single-analyzer estimates; nPerAxis is the
// number of messengers sent per analyzer orientation.
RobertsonRecord robertsonCheck(double az, double sx, double sy, double sz,
                               std::uint64_t nPerAxis);

// General-state commutator bound |a_z| (the z-polarized experiments pin it
// at 1).
double commutatorBound(const Vec3& a);

} // namespace spinsim::stats
