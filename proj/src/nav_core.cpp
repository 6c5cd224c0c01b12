#include "cnav/nav_core.hpp"

#include <cmath>
#include <stdexcept>

#include "cnav/attitude.hpp"

namespace cnav {

namespace {

// exp(A) by scaling and squaring with a truncated Taylor series. Terms are
// added until they fall below 1e-13 relative to the accumulated sum.
Mat15 expm(const Mat15& a) {
  const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (nrm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  }
  const Mat15 as = a / std::ldexp(1.0, squarings);

  Mat15 sum = Mat15::Identity();
  Mat15 term = Mat15::Identity();
  for (int k = 1; k <= 40; ++k) {
    term = (term * as / static_cast<double>(k)).eval();
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-13 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
  return sum;
}

}  // namespace

NavState propagate_nominal(const NavState& state, const ImuSample& imu, double dt) {
  if (dt < 0.0) throw std::invalid_argument("propagate_nominal: negative dt");
  if (!imu.f_b.allFinite() || !imu.w_b.allFinite()) {
    throw std::invalid_argument("propagate_nominal: non-finite imu sample");
  }
  if (dt == 0.0) return state;

  const Vec3 w = imu.w_b - state.b_g;
  const Vec3 f = imu.f_b - state.b_a;

  NavState out = state;
  out.t = state.t + dt;
  out.q = state.q * quat_exp(w * dt);
  out.q.normalize();

  const Mat3 c_old = state.q.toRotationMatrix();
  const Mat3 c_new = out.q.toRotationMatrix();
  const Vec3 a_ned = 0.5 * (c_old * f + c_new * f) + gravity_ned();
  out.v_ned = state.v_ned + a_ned * dt;
  out.p_ned = state.p_ned + 0.5 * (state.v_ned + out.v_ned) * dt;
  return out;
}

Mat15 system_matrix(const NavState& state, const ImuSample& imu) {
  const Mat3 c_bn = state.q.toRotationMatrix();
  const Vec3 f_n = c_bn * (imu.f_b - state.b_a);

  Mat15 f = Mat15::Zero();
  f.block<3, 3>(kPosBlk, kVelBlk) = Mat3::Identity();
  f.block<3, 3>(kVelBlk, kAttBlk) = -skew(f_n);
  f.block<3, 3>(kVelBlk, kBaBlk) = c_bn;
  f.block<3, 3>(kAttBlk, kBgBlk) = c_bn;
  return f;
}

Mat15 state_transition(const NavState& state, const ImuSample& imu, double dt,
                       PhiMode mode) {
  if (dt < 0.0) throw std::invalid_argument("state_transition: negative dt");
  const Mat15 f = system_matrix(state, imu);
  if (mode == PhiMode::kFirstOrder) {
    return Mat15::Identity() + f * dt;
  }
  return expm(f * dt);
}

Mat15 process_noise(const ImuNoiseSpec& spec, double dt) {
  if (dt < 0.0) throw std::invalid_argument("process_noise: negative dt");
  if (spec.accel_noise < 0.0 || spec.gyro_noise < 0.0 ||
      spec.accel_bias_walk < 0.0 || spec.gyro_bias_walk < 0.0) {
    throw std::invalid_argument("process_noise: negative noise density");
  }
  Mat15 q = Mat15::Zero();
  q.block<3, 3>(kVelBlk, kVelBlk) = spec.accel_noise * spec.accel_noise * dt * Mat3::Identity();
  q.block<3, 3>(kAttBlk, kAttBlk) = spec.gyro_noise * spec.gyro_noise * dt * Mat3::Identity();
  q.block<3, 3>(kBaBlk, kBaBlk) = spec.accel_bias_walk * spec.accel_bias_walk * dt * Mat3::Identity();
  q.block<3, 3>(kBgBlk, kBgBlk) = spec.gyro_bias_walk * spec.gyro_bias_walk * dt * Mat3::Identity();
  return q;
}

StateVector15 to_state_vector(const NavState& state) {
  StateVector15 x;
  x(kSlotNorth) = state.p_ned.x();
  x(kSlotEast) = state.p_ned.y();
  x(kSlotAlt) = -state.p_ned.z();
  x.segment<3>(kSlotVn) = state.v_ned;
  x.segment<3>(kSlotRoll) = quat_to_euler(state.q);
  x.segment<3>(kSlotBa) = state.b_a;
  x.segment<3>(kSlotBg) = state.b_g;
  return x;
}

NavState from_state_vector(const StateVector15& x, const NavState& ref) {
  NavState out;
  out.t = ref.t;
  out.p_ned = {x(kSlotNorth), x(kSlotEast), -x(kSlotAlt)};
  out.v_ned = x.segment<3>(kSlotVn);
  out.q = euler_to_quat(x.segment<3>(kSlotRoll));
  if (out.q.dot(ref.q) < 0.0) out.q.coeffs() = -out.q.coeffs();
  out.b_a = x.segment<3>(kSlotBa);
  out.b_g = x.segment<3>(kSlotBg);
  return out;
}

}  // namespace cnav
