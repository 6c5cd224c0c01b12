// Rotation helpers: skew operator, quaternion exponential, Euler conversions.
// Euler angles are ZYX (yaw-pitch-roll), giving the body-to-NED rotation
// R = Rz(yaw) * Ry(pitch) * Rx(roll).
#pragma once

#include "cnav/types.hpp"

namespace cnav {

Mat3 skew(const Vec3& a);

// Exact quaternion exponential of a rotation vector (angle * axis).
Eigen::Quaterniond quat_exp(const Vec3& rotvec);

Eigen::Quaterniond euler_to_quat(const Vec3& rpy);
Mat3 euler_to_dcm(const Vec3& rpy);

// Throws std::domain_error when |pitch| is within 1e-6 rad of pi/2.
Vec3 dcm_to_euler(const Mat3& c_bn);
Vec3 quat_to_euler(const Eigen::Quaterniond& q);

// Wrap into (-pi, pi].
double wrap_angle(double a);

// First-order map from a small NED-frame rotation vector to the resulting
// ZYX Euler-angle increments at the given attitude: d(rpy) = M * rotvec.
// Singular at |pitch| = pi/2 (throws std::domain_error within 1e-6 of it).
Mat3 nav_tilt_to_euler(const Vec3& rpy);

// Rotation angle between two attitudes, radians in [0, pi].
double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

}  // namespace cnav
