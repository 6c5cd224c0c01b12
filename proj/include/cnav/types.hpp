// Core state types shared across the filter and the experiment harness.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cnav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

inline constexpr int kStateDim = 15;

// Error-state / covariance block offsets: [dp dv datt dba dbg]
inline constexpr int kPosBlk = 0;
inline constexpr int kVelBlk = 3;
inline constexpr int kAttBlk = 6;
inline constexpr int kBaBlk = 9;
inline constexpr int kBgBlk = 12;

// Flat-state slot indices, layout [n e alt vn ve vd roll pitch yaw ba bg].
// Note slot 2 is altitude (positive up), not the down coordinate.
inline constexpr int kSlotNorth = 0;
inline constexpr int kSlotEast = 1;
inline constexpr int kSlotAlt = 2;
inline constexpr int kSlotVn = 3;
inline constexpr int kSlotVe = 4;
inline constexpr int kSlotVd = 5;
inline constexpr int kSlotRoll = 6;
inline constexpr int kSlotPitch = 7;
inline constexpr int kSlotYaw = 8;
inline constexpr int kSlotBa = 9;
inline constexpr int kSlotBg = 12;

// Flat 15-vector over the slots above; used by the projection step and fusion.
using StateVector15 = Vec15;

inline constexpr double kGravity = 9.80665;  // m/s^2, constant local model

inline Vec3 gravity_ned() { return {0.0, 0.0, kGravity}; }

struct ImuSample {
  double t = 0.0;  // s
  Vec3 f_b = Vec3::Zero();  // specific force, body frame, m/s^2
  Vec3 w_b = Vec3::Zero();  // angular rate, body frame, rad/s
};

struct GnssFix {
  double t = 0.0;
  Vec3 p_ned = Vec3::Zero();
  Vec3 sigma = Vec3::Zero();  // per-axis std, m
};

// Nominal (full) navigation state. q rotates body vectors into NED.
struct NavState {
  double t = 0.0;
  Vec3 p_ned = Vec3::Zero();
  Vec3 v_ned = Vec3::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  Vec3 b_a = Vec3::Zero();
  Vec3 b_g = Vec3::Zero();
};

struct ErrorState {
  Vec15 dx = Vec15::Zero();
};

}  // namespace cnav
