#include "excerptlab/simplex_ls.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "excerptlab/errors.hpp"

namespace excerptlab {

SimplexLsResult solve_simplex_ls(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b, double ridge,
                                 double tol, int max_iter, bool record_trace) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (n < 1 || m < 1)
    throw ConfigError("solve_simplex_ls: empty system");
  if (b.size() != m)
    throw ConfigError("solve_simplex_ls: rhs length mismatch");
  if (ridge < 0.0)
    throw ConfigError("solve_simplex_ls: ridge must be >= 0");

  SimplexLsResult res;
  res.x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  // Residual and gradient are maintained incrementally; a full refresh
  // every so often stops drift from accumulating.
  Eigen::VectorXd r = a * res.x - b;
  auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& resid) {
    return resid.squaredNorm() + ridge * x.squaredNorm();
  };
  double f = objective(res.x, r);
  if (record_trace) res.objective_trace.push_back(f);

  Eigen::VectorXd g(n), ad(n > 0 ? m : 0), d(n);
  for (int it = 0; it < max_iter; ++it) {
    g.noalias() = 2.0 * (a.transpose() * r);
    g += 2.0 * ridge * res.x;

    // Frank-Wolfe vertex: coordinate with the smallest gradient.
    Eigen::Index j_fw = 0;
    double g_min = g[0];
    for (Eigen::Index j = 1; j < n; ++j)
      if (g[j] < g_min) {
        g_min = g[j];
        j_fw = j;
      }
    const double gap = g.dot(res.x) - g_min;
    res.gap = gap;
    res.iterations = it;
    if (gap <= tol) {
      res.objective = f;
      return res;
    }

    // Away vertex: support coordinate with the largest gradient.
    Eigen::Index j_aw = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (res.x[j] > 0.0 && g[j] > g_max) {
        g_max = g[j];
        j_aw = j;
      }

    // Pick the steeper of the two feasible directions.
    const double slope_fw = g_min - g.dot(res.x);        // g . (e_fw - x)
    const double slope_aw = g.dot(res.x) - g_max;        // g . (x - e_aw)
    bool use_away = j_aw >= 0 && slope_aw < slope_fw && res.x[j_aw] < 1.0;

    double gamma_max;
    if (use_away) {
      d = res.x;
      d[j_aw] -= 1.0;  // x - e_aw
      gamma_max = res.x[j_aw] / (1.0 - res.x[j_aw]);
    } else {
      d = -res.x;
      d[j_fw] += 1.0;  // e_fw - x
      gamma_max = 1.0;
    }

    ad.noalias() = a * d;
    const double slope = use_away ? slope_aw : slope_fw;
    const double curv = ad.squaredNorm() + ridge * d.squaredNorm();
    double gamma;
    if (curv <= 0.0) {
      gamma = gamma_max;
    } else {
      gamma = std::min(gamma_max, -slope / (2.0 * curv));
      if (gamma <= 0.0) gamma = 0.0;
    }
    if (gamma == 0.0) {
      // Exact line search refuses both directions: the gap above is the
      // honest certificate, so treat this as converged-as-far-as-possible.
      res.objective = f;
      if (gap <= tol) return res;
      throw NumericError(
          "solve_simplex_ls: stalled with duality gap " + std::to_string(gap) +
          " above tolerance " + std::to_string(tol));
    }

    res.x += gamma * d;
    r += gamma * ad;
    // Clip the tiny negatives produced by floating point and renormalize.
    if ((it & 0x3f) == 0x3f) {
      for (Eigen::Index j = 0; j < n; ++j)
        if (res.x[j] < 0.0) res.x[j] = 0.0;
      res.x /= res.x.sum();
      r = a * res.x - b;
    } else if (use_away && gamma >= gamma_max) {
      res.x[j_aw] = 0.0;  // drop step lands exactly on the face
    }
    f = objective(res.x, r);
    if (record_trace) res.objective_trace.push_back(f);
  }
  throw NumericError("solve_simplex_ls: no convergence in " +
                     std::to_string(max_iter) + " iterations, duality gap " +
                     std::to_string(res.gap) + " above tolerance " +
                     std::to_string(tol));
}

}  // namespace excerptlab
