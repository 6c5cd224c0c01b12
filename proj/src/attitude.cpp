#include "cnav/attitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cnav {

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return m;
}

Eigen::Quaterniond quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    // Second-order series keeps the small-angle branch smooth.
    Eigen::Quaterniond q(1.0 - angle * angle / 8.0,
                         0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    q.normalize();
    return q;
  }
  const Vec3 axis = rotvec / angle;
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis));
}

Eigen::Quaterniond euler_to_quat(const Vec3& rpy) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                            Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                            Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()));
}

Mat3 euler_to_dcm(const Vec3& rpy) {
  return euler_to_quat(rpy).toRotationMatrix();
}

Vec3 dcm_to_euler(const Mat3& c_bn) {
  // c_bn(2,0) = -sin(pitch)
  const double sp = std::clamp(-c_bn(2, 0), -1.0, 1.0);
  const double pitch = std::asin(sp);
  if (std::numbers::pi / 2.0 - std::abs(pitch) < 1e-6) {
    throw std::domain_error("dcm_to_euler: pitch within 1e-6 of +/-pi/2 (gimbal lock)");
  }
  const double roll = std::atan2(c_bn(2, 1), c_bn(2, 2));
  const double yaw = std::atan2(c_bn(1, 0), c_bn(0, 0));
  return {roll, pitch, yaw};
}

Vec3 quat_to_euler(const Eigen::Quaterniond& q) {
  return dcm_to_euler(q.toRotationMatrix());
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

double quat_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // atan2-based form keeps full precision for tiny angles, unlike acos.
  return a.angularDistance(b);
}

Mat3 nav_tilt_to_euler(const Vec3& rpy) {
  const double cp = std::cos(rpy.y());
  if (std::abs(cp) < 1e-6) {
    throw std::domain_error("nav_tilt_to_euler: pitch within 1e-6 of +/-pi/2");
  }
  const double tp = std::tan(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Mat3 m;
  m << cy / cp, sy / cp, 0.0,
       -sy, cy, 0.0,
       cy * tp, sy * tp, 1.0;
  return m;
}

}  // namespace cnav
