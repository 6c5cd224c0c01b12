#include "cnav/eskf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cnav/attitude.hpp"

namespace cnav {

Mat15 default_p0() {
  const double deg = std::numbers::pi / 180.0;
  Mat15 p = Mat15::Zero();
  p.block<3, 3>(kPosBlk, kPosBlk) = 2.0 * 2.0 * Mat3::Identity();
  p.block<3, 3>(kVelBlk, kVelBlk) = 0.2 * 0.2 * Mat3::Identity();
  p.block<3, 3>(kAttBlk, kAttBlk) = deg * deg * Mat3::Identity();
  p.block<3, 3>(kBaBlk, kBaBlk) = 0.02 * 0.02 * Mat3::Identity();
  p.block<3, 3>(kBgBlk, kBgBlk) = 0.002 * 0.002 * Mat3::Identity();
  return p;
}

FilterState make_filter_state(const NavState& init, const FilterConfig& cfg) {
  FilterState fs;
  fs.nominal = init;
  fs.P = cfg.p0;
  symmetrize(fs.P);
  return fs;
}

NavState correct_nominal(const NavState& state, const ErrorState& err) {
  NavState out = state;
  out.p_ned -= err.dx.segment<3>(kPosBlk);
  out.v_ned -= err.dx.segment<3>(kVelBlk);
  out.q = quat_exp(-err.dx.segment<3>(kAttBlk)) * state.q;
  out.q.normalize();
  out.b_a += err.dx.segment<3>(kBaBlk);
  out.b_g += err.dx.segment<3>(kBgBlk);
  return out;
}

FilterState predict(const FilterState& fs, const ImuSample& imu, const FilterConfig& cfg) {
  const double dt = imu.t - fs.nominal.t;
  if (dt < 0.0) throw std::invalid_argument("predict: IMU sample predates filter clock");
  if (dt == 0.0) return fs;

  FilterState out;
  const Mat15 phi = state_transition(fs.nominal, imu, dt, cfg.phi_mode);
  out.nominal = propagate_nominal(fs.nominal, imu, dt);
  out.P = phi * fs.P * phi.transpose() + process_noise(cfg.q_spec, dt);
  symmetrize(out.P);
  return out;
}

GnssLinearization gnss_linearize(const FilterState& fs, const GnssFix& fix,
                                 const FilterConfig& cfg) {
  GnssLinearization lin;
  lin.h.setZero();
  lin.h.block<3, 3>(0, kPosBlk) = Mat3::Identity();

  const Mat3 s = fs.P.block<3, 3>(kPosBlk, kPosBlk) + cfg.r_gnss;
  Eigen::LDLT<Mat3> ldlt(s);
  // isPositive() admits semidefinite matrices, so require strictly positive
  // pivots as well.
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(ldlt.vectorD().array() > 0.0).all()) {
    throw std::runtime_error("gnss_update: singular innovation covariance");
  }
  lin.k = ldlt.solve(lin.h * fs.P).transpose();  // P H' S^-1
  lin.dy = fs.nominal.p_ned - fix.p_ned;
  return lin;
}

FilterState apply_gnss_gain(const FilterState& fs, const GnssLinearization& lin,
                            const Eigen::Matrix<double, 15, 3>& k,
                            const FilterConfig& cfg) {
  ErrorState err;
  err.dx = k * lin.dy;

  FilterState out;
  out.nominal = correct_nominal(fs.nominal, err);
  out.P = joseph_update(fs.P, k, lin.h, cfg.r_gnss);
  return out;
}

FilterState gnss_update(const FilterState& fs, const GnssFix& fix, const FilterConfig& cfg) {
  const GnssLinearization lin = gnss_linearize(fs, fix, cfg);
  return apply_gnss_gain(fs, lin, lin.k, cfg);
}

Mat15 joseph_update(const Mat15& p, const Eigen::MatrixXd& k,
                    const Eigen::MatrixXd& h, const Eigen::MatrixXd& r) {
  const Mat15 ikh = Mat15::Identity() - k * h;
  Mat15 out = ikh * p * ikh.transpose() + k * r * k.transpose();
  symmetrize(out);
  return out;
}

}  // namespace cnav
