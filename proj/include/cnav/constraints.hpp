// Motion-constraint machinery on top of the ESKF.
//
// Equality side: the non-holonomic pseudo-measurement (zero lateral and
// vertical body-frame velocity) applied as a regular Kalman update.
//
// Inequality side: box bounds on altitude, roll and pitch plus a speed cap,
// enforced either by reshaping the Kalman gain when a GNSS fix is present
// or by projecting the state onto the feasible set when none is.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnav/eskf.hpp"
#include "cnav/qp_solver.hpp"
#include "cnav/types.hpp"

namespace cnav {

// Physical envelope. Altitude in meters (positive up), angles in radians,
// v_max in m/s. Empty intervals are rejected by the builders.
struct EnvelopeBounds {
  double h_min = -100.0;
  double h_max = 100.0;
  double roll_min = -0.5;
  double roll_max = 0.5;
  double pitch_min = -0.5;
  double pitch_max = 0.5;
  double v_max = 13.89;
};

// How a constraint row is evaluated against a full state. Linear rows act
// on the flat state vector directly. Forward-velocity rows store the
// linearized coefficients but evaluate as the body-frame forward speed,
// which is nonlinear in the state.
enum class RowKind { kLinear, kFwdVel, kFwdVelNeg };

// Inequality system: value_i(x) <= bound_i for each row. rows holds the
// per-row coefficient vectors over the flat-state slots.
struct ConstraintSet {
  Eigen::MatrixXd rows{0, kStateDim};
  Eigen::VectorXd bound{0};
  std::vector<std::string> labels;
  std::vector<RowKind> kinds;

  Eigen::Index size() const { return rows.rows(); }
  void append(const Vec15& row, double b, std::string label,
              RowKind kind = RowKind::kLinear);
  void append(const ConstraintSet& other);
};

// Six box rows over altitude, roll and pitch, ordered
// [h<=max, roll<=max, pitch<=max, -h<=-min, -roll<=-min, -pitch<=-min].
ConstraintSet build_static_constraints(const EnvelopeBounds& bounds);

// Down-velocity cap for the projection path: |v_d| <= |sin(pitch)| * v_max.
ConstraintSet build_velocity_constraint_qp(double pitch, double v_max);

// Forward-speed cap for the gain path: two rows holding the linearized
// body-frame forward velocity at the given state, bound v_max each.
ConstraintSet build_velocity_constraint_gain(const NavState& state, double v_max);

// Exact per-row values at a full state (not the linearized model).
Eigen::VectorXd evaluate_rows(const ConstraintSet& cs, const NavState& state);

// Body-frame forward speed, e1' C_nb v.
double forward_velocity(const NavState& state);

// Sensitivity of the body-frame velocity C_nb v to the error state:
// velocity block C_nb, attitude block C_nb [v]x. Row i is the i-th body
// axis; rows 1 and 2 are the non-holonomic measurement Jacobian.
Eigen::Matrix<double, 3, 15> body_velocity_jacobian(const NavState& state);

// Non-holonomic update: treats the lateral and vertical body-frame velocity
// components as a zero measurement with covariance r_nhc.
FilterState nhc_update(const FilterState& fs, const Mat2& r_nhc);

struct ConstrainedUpdateResult {
  FilterState fs;
  bool constrained = false;     // gain QP was engaged
  bool fallback = false;        // gain QP failed, unconstrained gain kept
  double max_violation = 0.0;   // worst row residual of the applied update
};

// GNSS update whose gain is reshaped so the corrected state respects cs.
// The tentative unconstrained update is checked first; if it violates no
// row beyond 1e-6 the result is exactly the plain gnss_update output.
// Otherwise the gain minimizing the posterior trace subject to the violated
// rows (linearized in the applied correction) is used with the Joseph form.
ConstrainedUpdateResult constrained_gain_update(const FilterState& fs,
                                                const GnssFix& fix,
                                                const ConstraintSet& cs,
                                                const FilterConfig& cfg);

struct BranchStepResult {
  FilterState fs;
  bool projected = false;
  bool constrained = false;
  bool fallback = false;
  double max_violation = 0.0;
};

// One epoch of the inequality branch: propagate, then either the
// constrained-gain update (fix present) or the covariance-weighted
// projection onto the static + down-velocity rows (no fix). The projection
// path never touches P.
BranchStepResult inequality_branch_step(const FilterState& fs, const ImuSample& imu,
                                        const std::optional<GnssFix>& fix,
                                        const EnvelopeBounds& bounds,
                                        const FilterConfig& cfg);

// project_state overload for labeled sets; all rows must be kLinear.
StateVector15 project_state(const StateVector15& x_prior, const Mat15& p,
                            const ConstraintSet& cs, double tol = 1e-8);

}  // namespace cnav
