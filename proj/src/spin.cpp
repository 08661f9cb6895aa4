#include "spinsim/spin.hpp"

#include <cmath>
#include <complex>

#include "spinsim/errors.hpp"

namespace spinsim {

double reduceAngle(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    if (r >= kTwoPi) { // fmod result + 2*pi can round up to exactly 2*pi
        r = 0.0;
    }
    return r;
}

Message makeMessage(double psi1, double psi2, double theta) {
    if (!(theta >= 0.0 && theta <= M_PI)) {
        throw ConfigError("message polar angle must lie in [0, pi]");
    }
    return {reduceAngle(psi1), reduceAngle(psi2), theta};
}

RotationSpec makeRotation(const Vec3& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-12) {
        throw ConfigError("rotation axis must be a unit vector");
    }
    return {axis, angle};
}

Vec3 momentOf(const Message& msg) {
    if (msg.theta == 0.0) {
        return Vec3(0.0, 0.0, 1.0);
    }
    if (msg.theta == M_PI) {
        return Vec3(0.0, 0.0, -1.0);
    }
    const double phi = msg.psi1 - msg.psi2;
    const double st = std::sin(msg.theta);
    return Vec3(std::cos(phi) * st, std::sin(phi) * st, std::cos(msg.theta));
}

Message rotate(const Message& msg, const RotationSpec& spec) {
    using C = std::complex<double>;
    const double c = std::cos(0.5 * spec.angle);
    const double s = std::sin(0.5 * spec.angle);
    const Vec3& n = spec.axis;

    // 2x2 unitary whose action on the message components rotates the derived
    // moment right-handedly by spec.angle about n. The y column is conjugated
    // relative to the textbook spin rotation because the message azimuth is
    // psi1 - psi2 (see momentOf).
    const C u00(c, s * n.z());
    const C u01(-s * n.y(), s * n.x());
    const C u10(s * n.y(), s * n.x());
    const C u11(c, -s * n.z());

    const C a1 = std::polar(std::cos(0.5 * msg.theta), msg.psi1);
    const C a2 = std::polar(std::sin(0.5 * msg.theta), msg.psi2);
    const C b1 = u00 * a1 + u01 * a2;
    const C b2 = u10 * a1 + u11 * a2;

    const double r1 = std::abs(b1);
    const double r2 = std::abs(b2);
    return {reduceAngle(std::arg(b1)), reduceAngle(std::arg(b2)), 2.0 * std::atan2(r2, r1)};
}

Message precess(const Message& msg, double deltaPhase) {
    return {reduceAngle(msg.psi1 + deltaPhase), reduceAngle(msg.psi2 + deltaPhase), msg.theta};
}

} // namespace spinsim
