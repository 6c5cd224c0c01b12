#include "cnav/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace cnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct WorkingSet {
  std::vector<int> rows;     // inequality row indices, insertion order
  std::vector<double> mult;  // their multipliers, >= 0
};

// Normals of the equality rows followed by the working inequality rows.
Eigen::MatrixXd stack_normals(const QpProblem& prob, const WorkingSet& ws) {
  const auto m = prob.a_eq.rows();
  Eigen::MatrixXd n(m + static_cast<Eigen::Index>(ws.rows.size()), prob.hessian.cols());
  n.topRows(m) = prob.a_eq;
  for (size_t i = 0; i < ws.rows.size(); ++i) {
    n.row(m + static_cast<Eigen::Index>(i)) = prob.a_ineq.row(ws.rows[i]);
  }
  return n;
}

}  // namespace

QpSolution solve_qp(const QpProblem& prob, const QpOptions& opts) {
  const Eigen::Index n = prob.hessian.rows();
  const Eigen::Index l = prob.a_ineq.rows();
  const Eigen::Index m = prob.a_eq.rows();
  if (prob.hessian.cols() != n || prob.gradient.size() != n ||
      (l > 0 && prob.a_ineq.cols() != n) || prob.b_ineq.size() != l ||
      (m > 0 && prob.a_eq.cols() != n) || prob.b_eq.size() != m) {
    throw std::invalid_argument("solve_qp: inconsistent problem dimensions");
  }

  Eigen::MatrixXd h = 0.5 * (prob.hessian + prob.hessian.transpose());
  Eigen::LLT<Eigen::MatrixXd> hf(h);
  if (hf.info() != Eigen::Success) {
    h += 1e-10 * Eigen::MatrixXd::Identity(n, n);
    hf.compute(h);
    if (hf.info() != Eigen::Success) {
      throw std::invalid_argument("solve_qp: hessian is not positive semidefinite");
    }
  }

  QpSolution sol;
  sol.x = hf.solve(-prob.gradient);

  if (m > 0) {
    // Shift onto the equality manifold via the Schur complement in H^-1.
    const Eigen::MatrixXd hi_et = hf.solve(prob.a_eq.transpose());
    const Eigen::MatrixXd s = prob.a_eq * hi_et;
    Eigen::LDLT<Eigen::MatrixXd> sf(s);
    const Eigen::VectorXd resid = prob.a_eq * sol.x - prob.b_eq;
    const Eigen::VectorXd nu = sf.solve(resid);
    if ((s * nu - resid).norm() > 1e-6 * (1.0 + resid.norm())) {
      throw std::invalid_argument("solve_qp: equality rows are linearly dependent");
    }
    sol.x -= hi_et * nu;
  }

  if (l == 0) return sol;

  WorkingSet ws;
  while (true) {
    // Most violated inactive inequality; ties go to the lowest index.
    int p = -1;
    double worst = opts.tol;
    for (Eigen::Index i = 0; i < l; ++i) {
      bool active = false;
      for (int k : ws.rows) {
        if (k == i) { active = true; break; }
      }
      if (active) continue;
      const double v = prob.a_ineq.row(i).dot(sol.x) - prob.b_ineq(i);
      if (v > worst) { worst = v; p = static_cast<int>(i); }
    }
    if (p < 0) {
      sol.active_set = ws.rows;
      std::sort(sol.active_set.begin(), sol.active_set.end());
      sol.status = QpStatus::kOptimal;
      return sol;
    }

    const Eigen::VectorXd np = prob.a_ineq.row(p).transpose();
    double mult_p = 0.0;

    // Dual steps until row p becomes binding or infeasibility shows.
    while (true) {
      if (sol.iterations++ >= opts.max_iter) {
        sol.active_set = ws.rows;
        std::sort(sol.active_set.begin(), sol.active_set.end());
        sol.status = QpStatus::kMaxIter;
        return sol;
      }

      const Eigen::MatrixXd nmat = stack_normals(prob, ws);
      const Eigen::Index w = nmat.rows();
      Eigen::VectorXd z;   // primal direction, x <- x - t z
      Eigen::VectorXd r;   // multiplier rates for the working set
      if (w == 0) {
        z = hf.solve(np);
        r.resize(0);
      } else {
        const Eigen::MatrixXd hi_nt = hf.solve(nmat.transpose());
        const Eigen::MatrixXd sw = nmat * hi_nt;
        r = Eigen::LDLT<Eigen::MatrixXd>(sw).solve(nmat * hf.solve(np));
        z = hf.solve(np) - hi_nt * r;
      }

      // Full step reaches the hyperplane of row p.
      const double denom = np.dot(z);
      const double viol = np.dot(sol.x) - prob.b_ineq(p);
      const double t_full = denom > 1e-14 ? viol / denom : kInf;

      // Partial step: first working-set multiplier driven to zero.
      double t_part = kInf;
      int drop = -1;
      for (size_t i = 0; i < ws.rows.size(); ++i) {
        const double rate = r(m + static_cast<Eigen::Index>(i));
        if (rate > 1e-14) {
          const double t = ws.mult[i] / rate;
          if (t < t_part) { t_part = t; drop = static_cast<int>(i); }
        }
      }

      const double t = std::min(t_full, t_part);
      if (t == kInf) {
        sol.active_set = ws.rows;
        std::sort(sol.active_set.begin(), sol.active_set.end());
        sol.status = QpStatus::kInfeasible;
        return sol;
      }

      if (t > 0.0) {
        if (denom > 1e-14) sol.x -= t * z;
        for (size_t i = 0; i < ws.rows.size(); ++i) {
          ws.mult[i] -= t * r(m + static_cast<Eigen::Index>(i));
        }
        mult_p += t;
      }

      if (t == t_full) {
        ws.rows.push_back(p);
        ws.mult.push_back(mult_p);
        break;
      }
      ws.rows.erase(ws.rows.begin() + drop);
      ws.mult.erase(ws.mult.begin() + drop);
    }
  }
}

StateVector15 project_state(const StateVector15& x_prior, const Mat15& p,
                            const Eigen::MatrixXd& c, const Eigen::VectorXd& d,
                            double tol) {
  if (c.rows() == 0) return x_prior;
  if (c.cols() != kStateDim || d.size() != c.rows()) {
    throw std::invalid_argument("project_state: bad constraint dimensions");
  }
  if (((c * x_prior - d).array() <= tol).all()) return x_prior;

  const Mat15 pr = p + 1e-9 * Mat15::Identity();
  Eigen::LLT<Mat15> llt(pr);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("project_state: covariance not positive definite");
  }
  const Mat15 pinv = llt.solve(Mat15::Identity());

  QpProblem prob;
  prob.hessian = 2.0 * pinv;
  prob.gradient = -2.0 * (pinv * x_prior);
  prob.a_ineq = c;
  prob.b_ineq = d;
  prob.a_eq.resize(0, kStateDim);
  prob.b_eq.resize(0);

  QpOptions opts;
  opts.tol = tol;
  const QpSolution sol = solve_qp(prob, opts);
  if (sol.status != QpStatus::kOptimal) {
    throw std::runtime_error("project_state: QP solve failed");
  }
  return sol.x;
}

}  // namespace cnav
