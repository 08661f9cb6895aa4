#include "spinsim/oracle.hpp"

#include <cmath>

#include "spinsim/errors.hpp"

namespace spinsim::oracle {

namespace {

constexpr int kSigns[2] = {+1, -1};

void requireState(const Vec3& a) {
    if (a.norm() > 1.0 + 1e-9) {
        throw ConfigError("state vector must have norm <= 1");
    }
}

void requireUnit(const Vec3& v, const char* what) {
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) + " must be a unit vector");
    }
}

} // namespace

int TwoOutcomeDistribution::cellIndex(int s1, int s2) {
    return (s1 > 0 ? 0 : 2) + (s2 > 0 ? 0 : 1);
}

double TwoOutcomeDistribution::s1Moment() const {
    double m = 0.0;
    for (int s1 : kSigns)
        for (int s2 : kSigns) m += s1 * at(s1, s2);
    return m;
}

double TwoOutcomeDistribution::s2Moment() const {
    double m = 0.0;
    for (int s1 : kSigns)
        for (int s2 : kSigns) m += s2 * at(s1, s2);
    return m;
}

double TwoOutcomeDistribution::s12Moment() const {
    double m = 0.0;
    for (int s1 : kSigns)
        for (int s2 : kSigns) m += s1 * s2 * at(s1, s2);
    return m;
}

int TripleOutcomeDistribution::cellIndex(int s1, int s2, int s3) {
    return (s1 > 0 ? 0 : 4) + (s2 > 0 ? 0 : 2) + (s3 > 0 ? 0 : 1);
}

double TripleOutcomeDistribution::moment(unsigned mask) const {
    double m = 0.0;
    for (int s1 : kSigns)
        for (int s2 : kSigns)
            for (int s3 : kSigns) {
                const int sign = ((mask & 1u) ? s1 : 1) * ((mask & 2u) ? s2 : 1) *
                                 ((mask & 4u) ? s3 : 1);
                m += sign * at(s1, s2, s3);
            }
    return m;
}

TwoOutcomeDistribution TripleOutcomeDistribution::marginalOverS3() const {
    TwoOutcomeDistribution out;
    for (int s1 : kSigns)
        for (int s2 : kSigns) out.at(s1, s2) = at(s1, s2, +1) + at(s1, s2, -1);
    return out;
}

TwoOutcomeDistribution probDetuned(const Vec3& a, double phi) {
    requireState(a);
    const double plane = a.x() * std::cos(phi) + a.y() * std::sin(phi);
    const double sp = std::sin(phi);
    TwoOutcomeDistribution out;
    for (int s1 : kSigns)
        for (int s2 : kSigns) {
            out.at(s1, s2) = 0.25 * (1.0 + (s1 + s2 * sp) * plane + s1 * s2 * sp);
        }
    return out;
}

TwoOutcomeDistribution probGeneral(const Vec3& a, double theta1, double theta2, double theta4) {
    requireState(a);
    const double plane = a.x() * std::sin(theta1 + theta2) - a.y() * std::cos(theta1 + theta2);
    const double c4 = std::cos(theta4);
    TwoOutcomeDistribution out;
    for (int s1 : kSigns)
        for (int s2 : kSigns) {
            out.at(s1, s2) = 0.25 * (1.0 + (s1 - s2 * c4) * plane - s1 * s2 * c4);
        }
    return out;
}

TwoOutcomeDistribution probFilter(const Vec3& a, const Vec3& b, const Vec3& c) {
    requireState(a);
    requireUnit(b, "first projection axis");
    requireUnit(c, "second projection axis");
    const double ab = a.dot(b);
    const double bc = b.dot(c);
    TwoOutcomeDistribution out;
    for (int s1 : kSigns)
        for (int s2 : kSigns) {
            out.at(s1, s2) = 0.25 * (1.0 + (s1 + bc * s2) * ab + bc * s1 * s2);
        }
    return out;
}

TripleOutcomeDistribution probTriple(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    requireState(a);
    requireUnit(b, "first projection axis");
    requireUnit(c, "second projection axis");
    requireUnit(d, "third projection axis");
    const double ab = a.dot(b);
    const double bc = b.dot(c);
    const double cd = c.dot(d);
    TripleOutcomeDistribution out;
    for (int s1 : kSigns)
        for (int s2 : kSigns)
            for (int s3 : kSigns) {
                out.at(s1, s2, s3) =
                    0.125 * (1.0 + ab * s1 + ab * bc * s2 + ab * bc * cd * s3 +
                             ab * cd * s1 * s2 * s3 + bc * s1 * s2 + bc * cd * s1 * s3 +
                             cd * s2 * s3);
            }
    return out;
}

SpinMoments expectations(const Vec3& a, double phi) {
    requireState(a);
    const double s1 = a.x() * std::cos(phi) + a.y() * std::sin(phi);
    return {s1, std::sin(phi) * s1, std::sin(phi)};
}

TheoryUncertainty theoryEpsilonEta(double phi) {
    return {2.0 * std::abs(std::sin(0.5 * phi)), std::sqrt(2.0) * std::abs(std::cos(phi)), 1.0,
            1.0};
}

double ozawaLhsTheory(double phi) {
    const TheoryUncertainty t = theoryEpsilonEta(phi);
    return t.epsilon * t.eta + t.epsilon * t.sigmaB + t.sigmaA * t.eta;
}

double heisenbergProductTheory(double phi) {
    const TheoryUncertainty t = theoryEpsilonEta(phi);
    return t.epsilon * t.eta;
}

} // namespace spinsim::oracle
