#pragma once

#include <Eigen/Core>

namespace spinsim {

using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Particle state carried by a messenger: two phase angles and a polar angle.
// psi1 and psi2 advance together with time of flight; their difference is the
// azimuth of the magnetic moment and theta its polar angle.
//
// Invariants: theta in [0, pi]; psi1, psi2 reduced to [0, 2*pi) after every
// update; the derived moment is a unit vector.
struct Message {
    double psi1;
    double psi2;
    double theta;
};

// Axis-angle rotation, right-hand rule at the moment level. The axis must be
// a unit vector. All field exposures are expressed as rotation angles; no
// physical-unit quantities appear anywhere in the library.
struct RotationSpec {
    Vec3 axis;
    double angle;
};

// Reduces an angle into [0, 2*pi).
double reduceAngle(double x);

// Validating factories. makeMessage reduces the phases; theta must already
// be in [0, pi]. makeRotation requires a unit axis (1e-12).
Message makeMessage(double psi1, double psi2, double theta);
RotationSpec makeRotation(const Vec3& axis, double angle);

// Unit magnetic-moment vector encoded by a message:
//   (cos(psi1-psi2) sin theta, sin(psi1-psi2) sin theta, cos theta).
// Exactly (0,0,+-1) at the poles, where the azimuth is meaningless.
Vec3 momentOf(const Message& msg);

// Rotates the derived moment by spec.angle about spec.axis (right-hand rule)
// and returns the updated message. The update acts on the two spinor
// components so the common phase psi1+psi2 keeps its time-of-flight meaning;
// the moment transforms exactly as the matching 3x3 axis-angle matrix.
Message rotate(const Message& msg, const RotationSpec& spec);

// Advances both phases by deltaPhase (free flight). The derived moment is
// unchanged: only the phase difference is observable.
Message precess(const Message& msg, double deltaPhase);

} // namespace spinsim
