#include "cnav/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cnav/attitude.hpp"
#include "cnav/nav_core.hpp"

namespace cnav {

namespace {

// Jacobian of the flat-state slots with respect to the error correction
// being applied: position and velocity shift by -dx (altitude by +dx, down
// axis flipped), biases by +dx. The Euler slots pick up the first-order
// effect of the exp(-[dx_att]x) attitude correction, which depends on the
// current yaw and pitch.
Mat15 correction_jacobian(const NavState& state) {
  Mat15 j = Mat15::Identity();
  j(kSlotNorth, kSlotNorth) = -1.0;
  j(kSlotEast, kSlotEast) = -1.0;
  j(kSlotAlt, kSlotAlt) = 1.0;
  j.block<3, 3>(kSlotVn, kVelBlk) = -Mat3::Identity();
  j.block<3, 3>(kSlotRoll, kAttBlk) = -nav_tilt_to_euler(quat_to_euler(state.q));
  return j;
}

Vec15 unit_row(int slot, double sign) {
  Vec15 r = Vec15::Zero();
  r(slot) = sign;
  return r;
}

}  // namespace

Eigen::Matrix<double, 3, 15> body_velocity_jacobian(const NavState& state) {
  const Mat3 c_nb = state.q.toRotationMatrix().transpose();
  Eigen::Matrix<double, 3, 15> j = Eigen::Matrix<double, 3, 15>::Zero();
  j.block<3, 3>(0, kVelBlk) = c_nb;
  j.block<3, 3>(0, kAttBlk) = c_nb * skew(state.v_ned);
  return j;
}

void ConstraintSet::append(const Vec15& row, double b, std::string label, RowKind kind) {
  const Eigen::Index l = rows.rows();
  rows.conservativeResize(l + 1, kStateDim);
  rows.row(l) = row.transpose();
  bound.conservativeResize(l + 1);
  bound(l) = b;
  labels.push_back(std::move(label));
  kinds.push_back(kind);
}

void ConstraintSet::append(const ConstraintSet& other) {
  for (Eigen::Index i = 0; i < other.size(); ++i) {
    append(other.rows.row(i).transpose(), other.bound(i), other.labels[i], other.kinds[i]);
  }
}

ConstraintSet build_static_constraints(const EnvelopeBounds& bounds) {
  if (bounds.h_min > bounds.h_max || bounds.roll_min > bounds.roll_max ||
      bounds.pitch_min > bounds.pitch_max) {
    throw std::invalid_argument("build_static_constraints: empty bound interval");
  }
  ConstraintSet cs;
  cs.append(unit_row(kSlotAlt, 1.0), bounds.h_max, "alt<=max");
  cs.append(unit_row(kSlotRoll, 1.0), bounds.roll_max, "roll<=max");
  cs.append(unit_row(kSlotPitch, 1.0), bounds.pitch_max, "pitch<=max");
  cs.append(unit_row(kSlotAlt, -1.0), -bounds.h_min, "alt>=min");
  cs.append(unit_row(kSlotRoll, -1.0), -bounds.roll_min, "roll>=min");
  cs.append(unit_row(kSlotPitch, -1.0), -bounds.pitch_min, "pitch>=min");
  return cs;
}

ConstraintSet build_velocity_constraint_qp(double pitch, double v_max) {
  if (v_max <= 0.0) throw std::invalid_argument("build_velocity_constraint_qp: v_max <= 0");
  const double vd_max = std::abs(std::sin(pitch)) * v_max;
  ConstraintSet cs;
  cs.append(unit_row(kSlotVd, 1.0), vd_max, "vd<=cap");
  cs.append(unit_row(kSlotVd, -1.0), vd_max, "-vd<=cap");
  return cs;
}

ConstraintSet build_velocity_constraint_gain(const NavState& state, double v_max) {
  if (v_max <= 0.0) throw std::invalid_argument("build_velocity_constraint_gain: v_max <= 0");
  const Eigen::Matrix<double, 3, 15> j = body_velocity_jacobian(state);
  const Vec15 fwd = j.row(0).transpose();
  ConstraintSet cs;
  cs.append(fwd, v_max, "fwd<=vmax", RowKind::kFwdVel);
  cs.append(-fwd, v_max, "-fwd<=vmax", RowKind::kFwdVelNeg);
  return cs;
}

double forward_velocity(const NavState& state) {
  return (state.q.toRotationMatrix().transpose() * state.v_ned).x();
}

Eigen::VectorXd evaluate_rows(const ConstraintSet& cs, const NavState& state) {
  Eigen::VectorXd vals(cs.size());
  StateVector15 x;
  bool have_x = false;
  for (Eigen::Index i = 0; i < cs.size(); ++i) {
    switch (cs.kinds[i]) {
      case RowKind::kLinear:
        if (!have_x) { x = to_state_vector(state); have_x = true; }
        vals(i) = cs.rows.row(i).dot(x);
        break;
      case RowKind::kFwdVel:
        vals(i) = forward_velocity(state);
        break;
      case RowKind::kFwdVelNeg:
        vals(i) = -forward_velocity(state);
        break;
    }
  }
  return vals;
}

FilterState nhc_update(const FilterState& fs, const Mat2& r_nhc) {
  const Mat3 c_nb = fs.nominal.q.toRotationMatrix().transpose();
  const Vec3 v_b = c_nb * fs.nominal.v_ned;

  // Lateral and vertical body components measure zero.
  const Eigen::Matrix<double, 3, 15> j = body_velocity_jacobian(fs.nominal);
  const Eigen::Matrix<double, 2, 15> h = j.bottomRows<2>();
  const Vec2 dy(v_b.y(), v_b.z());

  const Mat2 s = h * fs.P * h.transpose() + r_nhc;
  Eigen::LDLT<Mat2> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(ldlt.vectorD().array() > 0.0).all()) {
    throw std::runtime_error("nhc_update: singular innovation covariance");
  }
  const Eigen::Matrix<double, 15, 2> k = ldlt.solve(h * fs.P).transpose();

  ErrorState err;
  err.dx = k * dy;

  FilterState out;
  out.nominal = correct_nominal(fs.nominal, err);
  out.P = joseph_update(fs.P, k, h, r_nhc);
  return out;
}

ConstrainedUpdateResult constrained_gain_update(const FilterState& fs,
                                                const GnssFix& fix,
                                                const ConstraintSet& cs,
                                                const FilterConfig& cfg) {
  constexpr double kCheckTol = 1e-6;
  const GnssLinearization lin = gnss_linearize(fs, fix, cfg);

  const Eigen::Index l = cs.size();
  const Mat15 j_corr = correction_jacobian(fs.nominal);
  // d(row value)/d(applied correction). Box rows live on the flat-state
  // slots and go through the slot Jacobian; forward-velocity rows already
  // store the error-state sensitivity, which the correction enters with a
  // flipped sign.
  Eigen::MatrixXd grads(l, kStateDim);
  for (Eigen::Index i = 0; i < l; ++i) {
    if (cs.kinds[i] == RowKind::kLinear) {
      grads.row(i) = cs.rows.row(i) * j_corr;
    } else {
      grads.row(i) = -cs.rows.row(i);
    }
  }
  const Eigen::VectorXd value_prior = evaluate_rows(cs, fs.nominal);

  const auto violations = [&](const Eigen::Matrix<double, 15, 3>& k) {
    const Vec15 dx = k * lin.dy;
    return (value_prior + grads * dx - cs.bound).eval();
  };

  ConstrainedUpdateResult res;
  Eigen::VectorXd viol = violations(lin.k);
  if ((viol.array() <= kCheckTol).all()) {
    res.fs = apply_gnss_gain(fs, lin, lin.k, cfg);
    res.max_violation = (evaluate_rows(cs, res.fs.nominal) - cs.bound).maxCoeff();
    return res;
  }

  // Reshape the gain. Variables are vec(K), column-major. The trace
  // objective expands to 0.5 x' [2 S (x) I] x - 2 vec(P H') . x + const,
  // and each violated row is affine in K through the applied correction.
  res.constrained = true;
  const Mat3 s_inn = lin.h * fs.P * lin.h.transpose() + cfg.r_gnss;
  Eigen::MatrixXd hq = Eigen::MatrixXd::Zero(45, 45);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      hq.block<15, 15>(15 * a, 15 * b) =
          2.0 * s_inn(a, b) * Mat15::Identity();
    }
  }
  const Eigen::Matrix<double, 15, 3> pht = fs.P * lin.h.transpose();
  Eigen::VectorXd grad_lin(45);
  for (int a = 0; a < 3; ++a) grad_lin.segment<15>(15 * a) = -2.0 * pht.col(a);

  std::vector<int> included;
  Eigen::VectorXd tighten = Eigen::VectorXd::Zero(l);
  Eigen::Matrix<double, 15, 3> k_c = lin.k;
  bool solved = false;
  // Rows the reshaped gain newly pushes out get folded in and the problem
  // re-solved. Rows the corrected state still violates beyond the affine
  // model (the Euler slots are only affine to first order) get their bound
  // tightened by the measured residual. A few passes settle both.
  for (Eigen::Index pass = 0; pass <= 2 * l + 2 && !solved; ++pass) {
    for (Eigen::Index i = 0; i < l; ++i) {
      if (viol(i) > kCheckTol &&
          std::find(included.begin(), included.end(), i) == included.end()) {
        included.push_back(static_cast<int>(i));
      }
    }

    QpProblem prob;
    prob.hessian = hq;
    prob.gradient = grad_lin;
    prob.a_ineq.resize(static_cast<Eigen::Index>(included.size()), 45);
    prob.b_ineq.resize(static_cast<Eigen::Index>(included.size()));
    for (size_t r = 0; r < included.size(); ++r) {
      const int i = included[r];
      for (int a = 0; a < 3; ++a) {
        prob.a_ineq.row(static_cast<Eigen::Index>(r)).segment<15>(15 * a) =
            lin.dy(a) * grads.row(i);
      }
      prob.b_ineq(static_cast<Eigen::Index>(r)) =
          cs.bound(i) - value_prior(i) - tighten(i);
    }
    prob.a_eq.resize(0, 45);
    prob.b_eq.resize(0);

    const QpSolution sol = solve_qp(prob);
    if (sol.status != QpStatus::kOptimal) {
      res.fallback = true;
      k_c = lin.k;
      break;
    }
    for (int a = 0; a < 3; ++a) k_c.col(a) = sol.x.segment<15>(15 * a);

    viol = violations(k_c);
    const Eigen::VectorXd exact_viol =
        evaluate_rows(cs, correct_nominal(fs.nominal, ErrorState{k_c * lin.dy})) -
        cs.bound;
    for (Eigen::Index i = 0; i < l; ++i) {
      if (exact_viol(i) > kCheckTol && exact_viol(i) > viol(i)) {
        tighten(i) += exact_viol(i) - std::max(viol(i), 0.0);
        viol(i) = exact_viol(i);
      }
    }
    solved = (viol.array() <= kCheckTol).all() &&
             (exact_viol.array() <= kCheckTol).all();
  }

  res.fs = apply_gnss_gain(fs, lin, k_c, cfg);
  res.max_violation = (evaluate_rows(cs, res.fs.nominal) - cs.bound).maxCoeff();
  return res;
}

BranchStepResult inequality_branch_step(const FilterState& fs, const ImuSample& imu,
                                        const std::optional<GnssFix>& fix,
                                        const EnvelopeBounds& bounds,
                                        const FilterConfig& cfg) {
  const FilterState pred = predict(fs, imu, cfg);

  BranchStepResult res;
  if (fix.has_value()) {
    ConstraintSet cs = build_static_constraints(bounds);
    cs.append(build_velocity_constraint_gain(pred.nominal, bounds.v_max));
    const ConstrainedUpdateResult upd = constrained_gain_update(pred, *fix, cs, cfg);
    res.fs = upd.fs;
    res.constrained = upd.constrained;
    res.fallback = upd.fallback;
    res.max_violation = upd.max_violation;
    return res;
  }

  const double pitch = quat_to_euler(pred.nominal.q).y();
  ConstraintSet cs = build_static_constraints(bounds);
  cs.append(build_velocity_constraint_qp(pitch, bounds.v_max));

  constexpr double kTol = 1e-8;
  const Eigen::VectorXd viol = evaluate_rows(cs, pred.nominal) - cs.bound;
  if ((viol.array() <= kTol).all()) {
    res.fs = pred;
    res.max_violation = viol.maxCoeff();
    return res;
  }

  res.projected = true;
  try {
    const StateVector15 x = to_state_vector(pred.nominal);
    // P lives on the error blocks; conjugate it onto the flat-state basis so
    // the weighting agrees with how corrections land on the slots (same
    // first-order map the gain path uses).
    const Mat15 j_corr = correction_jacobian(pred.nominal);
    const Mat15 p_slot = j_corr * pred.P * j_corr.transpose();
    const StateVector15 xp = project_state(x, p_slot, cs, kTol);
    res.fs.nominal = from_state_vector(xp, pred.nominal);
    res.fs.P = pred.P;  // projection leaves the covariance at the prior
    res.max_violation = (evaluate_rows(cs, res.fs.nominal) - cs.bound).maxCoeff();
  } catch (const std::runtime_error&) {
    res.fs = pred;
    res.fallback = true;
    res.max_violation = viol.maxCoeff();
  }
  return res;
}

StateVector15 project_state(const StateVector15& x_prior, const Mat15& p,
                            const ConstraintSet& cs, double tol) {
  for (const RowKind kind : cs.kinds) {
    if (kind != RowKind::kLinear) {
      throw std::invalid_argument("project_state: nonlinear row in projection set");
    }
  }
  return project_state(x_prior, p, cs.rows, cs.bound, tol);
}

}  // namespace cnav
