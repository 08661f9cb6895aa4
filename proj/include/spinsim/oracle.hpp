#pragma once

#include <array>

#include "spinsim/spin.hpp"

namespace spinsim::oracle {

// Closed-form quantum predictions for the successive spin-1/2 filtering
// measurements. Every simulated statistic is validated against these. All
// functions are pure; the state vector a may be sub-unit (mixed state).

// Joint distribution over the two analyzer outcomes (S1, S2), each +-1.
struct TwoOutcomeDistribution {
    std::array<double, 4> p{}; // cell order (+,+), (+,-), (-,+), (-,-)

    static int cellIndex(int s1, int s2);
    double at(int s1, int s2) const { return p[static_cast<std::size_t>(cellIndex(s1, s2))]; }
    double& at(int s1, int s2) { return p[static_cast<std::size_t>(cellIndex(s1, s2))]; }

    double s1Moment() const;
    double s2Moment() const;
    double s12Moment() const;
};

// Joint distribution over three splitting-analyzer outcomes.
struct TripleOutcomeDistribution {
    std::array<double, 8> p{};

    static int cellIndex(int s1, int s2, int s3);
    double at(int s1, int s2, int s3) const {
        return p[static_cast<std::size_t>(cellIndex(s1, s2, s3))];
    }
    double& at(int s1, int s2, int s3) {
        return p[static_cast<std::size_t>(cellIndex(s1, s2, s3))];
    }

    // Expectation of a +-1 product selected by the mask bits (bit0 -> S1,
    // bit1 -> S2, bit2 -> S3), e.g. mask 0b011 gives <S1 S2>.
    double moment(unsigned mask) const;

    TwoOutcomeDistribution marginalOverS3() const;
};

struct SpinMoments {
    double s1;
    double s2;
    double s12;
};

// Detuned two-analyzer distribution:
//   p(S1,S2) = [1 + (S1 + S2 sin phi)(a_x cos phi + a_y sin phi)
//                 + S1 S2 sin phi] / 4.
TwoOutcomeDistribution probDetuned(const Vec3& a, double phi);

// General stage-angle form, independent of the free angles between the
// flippers and the analyzers:
//   p(S1,S2) = [1 + (S1 - S2 cos t4)(a_x sin(t1+t2) - a_y cos(t1+t2))
//                 - S1 S2 cos t4] / 4.
// Substituting t1 = 0, t2 = phi + pi/2, t4 = -phi - pi/2 recovers
// probDetuned exactly.
TwoOutcomeDistribution probGeneral(const Vec3& a, double theta1, double theta2, double theta4);

// Two successive projections along unit vectors b then c:
//   p(S1,S2) = [1 + (S1 + b.c S2) a.b + b.c S1 S2] / 4.
// probDetuned is the special case b = x cos phi + y sin phi, c = y.
TwoOutcomeDistribution probFilter(const Vec3& a, const Vec3& b, const Vec3& c);

// Three successive projections along b, c, d. Its S3 marginal equals
// probFilter(a, b, c); its pairwise moments reproduce both incompatible
// two-analyzer experiments.
TripleOutcomeDistribution probTriple(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// (<S1>, <S2>, <S1 S2>) of probDetuned in closed form:
//   (a_x cos phi + a_y sin phi, sin phi * <S1>, sin phi).
SpinMoments expectations(const Vec3& a, double phi);

// Measurement error of sigma_x and disturbance of sigma_y for the detuned
// measurement on a z-polarized state, with the state's standard deviations:
//   epsilon = 2|sin(phi/2)|, eta = sqrt(2)|cos phi|, sigmaA = sigmaB = 1.
struct TheoryUncertainty {
    double epsilon;
    double eta;
    double sigmaA;
    double sigmaB;
};

TheoryUncertainty theoryEpsilonEta(double phi);

// Left-hand side of the error-disturbance (Ozawa) inequality,
// epsilon*eta + epsilon*sigmaB + sigmaA*eta; >= 1 for every phi.
double ozawaLhsTheory(double phi);

// Naive error-disturbance product epsilon*eta; drops below 1 near
// phi = pi/2.
double heisenbergProductTheory(double phi);

} // namespace spinsim::oracle
