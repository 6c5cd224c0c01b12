// Dense convex QP solver for the small problems raised by the constraint
// branch: at most a few dozen variables and a dozen inequality rows.
//
//   minimize  0.5 x'H x + g'x
//   s.t.      A_ineq x <= b_ineq
//             A_eq   x  = b_eq
//
// Active-set scheme: start from the unconstrained (or equality-constrained)
// minimizer, repeatedly pick the most violated inequality, take the dual
// step that activates it, dropping working-set rows whose multipliers
// would cross zero. Terminates at a KKT point or reports failure.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cnav/types.hpp"

namespace cnav {

enum class QpStatus { kOptimal, kInfeasible, kMaxIter };

struct QpProblem {
  Eigen::MatrixXd hessian;   // n x n, symmetric PSD (regularized if singular)
  Eigen::VectorXd gradient;  // n
  Eigen::MatrixXd a_ineq;    // l x n, may have zero rows
  Eigen::VectorXd b_ineq;    // l
  Eigen::MatrixXd a_eq;      // m x n, may have zero rows
  Eigen::VectorXd b_eq;      // m
};

struct QpOptions {
  double tol = 1e-8;
  int max_iter = 50;  // working-set changes
};

struct QpSolution {
  Eigen::VectorXd x;
  std::vector<int> active_set;  // binding inequality rows, ascending
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
};

QpSolution solve_qp(const QpProblem& prob, const QpOptions& opts = {});

// Nearest point to x_prior in the P-weighted metric subject to C x <= d.
// P gets a 1e-9 ridge before inversion. A prior already satisfying every
// row within tol is returned unchanged. Solver failure throws
// std::runtime_error; callers that can fall back should catch it.
StateVector15 project_state(const StateVector15& x_prior, const Mat15& p,
                            const Eigen::MatrixXd& c, const Eigen::VectorXd& d,
                            double tol = 1e-8);

}  // namespace cnav
