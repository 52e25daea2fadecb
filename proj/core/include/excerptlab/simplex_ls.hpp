// Ridge-regularized least squares over the probability simplex:
//
//   minimize  ||A x - b||^2 + ridge * ||x||^2
//   subject to  x >= 0,  sum(x) = 1
//
// solved with the Frank-Wolfe method plus away steps and exact line
// search, so the objective never increases and convergence is linear on
// these quadratics.  The returned duality gap certifies optimality.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace excerptlab {

struct SimplexLsResult {
  Eigen::VectorXd x;
  double objective{0.0};
  double gap{0.0};       // Frank-Wolfe duality gap at exit
  int iterations{0};
  std::vector<double> objective_trace;  // filled only when requested
};

// Throws ConfigError for empty problems or negative ridge, NumericError
// when the duality gap is still above `tol` after `max_iter` iterations
// (the message carries the final gap).
SimplexLsResult solve_simplex_ls(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b, double ridge,
                                 double tol = 1e-8, int max_iter = 100000,
                                 bool record_trace = false);

}  // namespace excerptlab
