// Error-state Kalman filter over the 15-state model in nav_core: predict,
// GNSS position update, and the injection of an estimated error into the
// nominal state. The error estimate is always consumed immediately, so the
// filter never carries a nonzero error mean between epochs.
#pragma once

#include <Eigen/Dense>

#include "cnav/nav_core.hpp"
#include "cnav/types.hpp"

namespace cnav {

// Default initial covariance: 2 m position, 0.2 m/s velocity, 1 deg tilt,
// 0.02 m/s^2 and 0.002 rad/s bias uncertainty per axis.
Mat15 default_p0();

struct FilterConfig {
  ImuNoiseSpec q_spec;
  Mat3 r_gnss = 3.5 * 3.5 * Mat3::Identity();      // m^2
  Mat2 r_nhc = 0.05 * 0.05 * Mat2::Identity();     // (m/s)^2
  Mat15 p0 = default_p0();
  PhiMode phi_mode = PhiMode::kExact;
};

struct FilterState {
  NavState nominal;
  Mat15 P = Mat15::Identity();
};

FilterState make_filter_state(const NavState& init, const FilterConfig& cfg);

// Applies an error estimate to the nominal state: position and velocity
// shift by -dx, the attitude picks up the small rotation exp(-[datt]x) on
// the NED side, biases shift by +dx. The quaternion is renormalized.
NavState correct_nominal(const NavState& state, const ErrorState& err);

// Propagates nominal state and covariance to imu.t. imu.t must not precede
// the filter clock; imu.t equal to the clock is a no-op.
FilterState predict(const FilterState& fs, const ImuSample& imu, const FilterConfig& cfg);

// Position update with H = [I3 0]. The residual is predicted minus measured
// position, the gain is fed through the Joseph form, and the resulting error
// estimate is injected into the nominal state. Throws if the innovation
// covariance is not invertible.
FilterState gnss_update(const FilterState& fs, const GnssFix& fix, const FilterConfig& cfg);

// Pieces of the position update, split out so a caller can substitute its
// own gain while keeping everything else identical to gnss_update.
struct GnssLinearization {
  Eigen::Matrix<double, 3, 15> h;
  Eigen::Matrix<double, 15, 3> k;  // optimal gain
  Vec3 dy;                         // predicted minus measured position
};

GnssLinearization gnss_linearize(const FilterState& fs, const GnssFix& fix,
                                 const FilterConfig& cfg);

FilterState apply_gnss_gain(const FilterState& fs, const GnssLinearization& lin,
                            const Eigen::Matrix<double, 15, 3>& k,
                            const FilterConfig& cfg);

// Joseph-form covariance update (I-KH)P(I-KH)' + KRK' followed by
// symmetrization. Valid for any gain, not only the optimal one.
Mat15 joseph_update(const Mat15& p, const Eigen::MatrixXd& k,
                    const Eigen::MatrixXd& h, const Eigen::MatrixXd& r);

inline void symmetrize(Mat15& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace cnav
