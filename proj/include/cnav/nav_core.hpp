// Strapdown mechanization and error-state model pieces for a local-level
// NED frame with constant gravity: nominal propagation, linearized system
// matrix, discrete transition and process noise, flat-vector conversions.
#pragma once

#include "cnav/types.hpp"

namespace cnav {

// One strapdown step over dt using a single IMU sample. Attitude advances
// by the quaternion exponential of (w_b - b_g)*dt, velocity by the rotated
// bias-corrected specific force plus gravity (average of the old and new
// attitude), position by the velocity trapezoid. dt = 0 returns the input
// with the clock untouched; negative dt is rejected.
NavState propagate_nominal(const NavState& state, const ImuSample& imu, double dt);

// Continuous-time error dynamics F for [dp dv datt dba dbg]:
//   dp'   = dv
//   dv'   = -[f_n]x datt + C_bn dba
//   datt' =  C_bn dbg
// with f_n the bias-corrected specific force in NED. Bias states are
// random walks. Signs pair with the correction convention in correct_nominal.
Mat15 system_matrix(const NavState& state, const ImuSample& imu);

enum class PhiMode {
  kExact,       // scaled/squared truncated series for exp(F dt)
  kFirstOrder,  // I + F dt
};

Mat15 state_transition(const NavState& state, const ImuSample& imu, double dt,
                       PhiMode mode = PhiMode::kExact);

// White-noise densities (per sqrt(Hz)) and bias random-walk densities.
struct ImuNoiseSpec {
  double accel_noise = 0.02;       // m/s^2/sqrt(Hz)
  double gyro_noise = 0.002;       // rad/s/sqrt(Hz)
  double accel_bias_walk = 1e-4;   // m/s^2*sqrt(Hz) drive of the bias walk
  double gyro_bias_walk = 1e-5;    // rad/s*sqrt(Hz)
};

// Discrete process noise over dt: white noise lands on the velocity and
// attitude blocks, the walk densities on the bias blocks. All entries
// scale linearly with dt. Negative densities or dt are rejected.
Mat15 process_noise(const ImuNoiseSpec& spec, double dt);

// NavState <-> flat vector [n e alt vn ve vd roll pitch yaw ba bg].
// to_state_vector throws on gimbal lock (see dcm_to_euler).
StateVector15 to_state_vector(const NavState& state);

// Rebuilds a NavState from the flat vector. ref supplies the timestamp and
// the quaternion sign branch so round trips stay continuous.
NavState from_state_vector(const StateVector15& x, const NavState& ref);

}  // namespace cnav
