#include "excerptlab/estimators.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "excerptlab/errors.hpp"
#include "excerptlab/simplex_ls.hpp"
#include "excerptlab/stats.hpp"

namespace excerptlab {

double EstimateResult::se(Eigen::Index i) const {
  return std::sqrt(vcov(i, i));
}

Eigen::Index EstimateResult::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  throw DataError("no coefficient named '" + std::string(name) + "'");
}

double EstimateResult::coef_of(std::string_view name) const {
  return coef[index_of(name)];
}

double EstimateResult::se_of(std::string_view name) const {
  return se(index_of(name));
}

Eigen::MatrixXd within_transform(Eigen::MatrixXd x,
                                 const std::vector<std::vector<int>>& fe_groups,
                                 double tol, int max_iter) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw DataError("within_transform: empty matrix");
  if (!(tol > 0.0)) throw ConfigError("within_transform: tol must be > 0");
  if (max_iter < 1)
    throw ConfigError("within_transform: max_iter must be >= 1");
  if (fe_groups.empty()) return x;

  struct Group {
    const std::vector<int>* labels;
    int n_levels;
  };
  std::vector<Group> groups;
  groups.reserve(fe_groups.size());
  for (const auto& labels : fe_groups) {
    if (static_cast<Eigen::Index>(labels.size()) != n)
      throw DataError("within_transform: group label length mismatch");
    int max_label = 0;
    for (int code : labels) {
      if (code < 0)
        throw DataError("within_transform: negative group label");
      max_label = std::max(max_label, code);
    }
    groups.push_back(Group{&labels, max_label + 1});
  }

  std::vector<double> sums;
  std::vector<Eigen::Index> counts;
  double delta = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    delta = 0.0;
    for (const auto& g : groups) {
      const std::vector<int>& lab = *g.labels;
      counts.assign(g.n_levels, 0);
      for (Eigen::Index i = 0; i < n; ++i) ++counts[lab[i]];
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        sums.assign(g.n_levels, 0.0);
        double* col = x.col(c).data();
        for (Eigen::Index i = 0; i < n; ++i) sums[lab[i]] += col[i];
        for (int l = 0; l < g.n_levels; ++l)
          if (counts[l] > 0) sums[l] /= static_cast<double>(counts[l]);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double m = sums[lab[i]];
          col[i] -= m;
          const double am = std::abs(m);
          if (am > delta) delta = am;
        }
      }
    }
    if (delta < tol) return x;
  }
  throw NumericError(
      "within_transform: no convergence after " + std::to_string(max_iter) +
      " sweeps; the last sweep still moved values by " +
      std::to_string(delta));
}

Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& residuals,
                                    const std::vector<int>& clusters) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (residuals.size() != n || static_cast<Eigen::Index>(clusters.size()) != n)
    throw DataError("cluster_robust_vcov: length mismatch");
  if (k < 1) throw DataError("cluster_robust_vcov: empty design");
  if (n <= k)
    throw DataError("cluster_robust_vcov: need more observations than "
                    "regressors");
  int n_clusters = 0;
  for (int c : clusters) {
    if (c < 0) throw DataError("cluster_robust_vcov: negative cluster label");
    n_clusters = std::max(n_clusters, c + 1);
  }
  std::vector<char> seen(n_clusters, 0);
  for (int c : clusters) seen[c] = 1;
  const long g = std::count(seen.begin(), seen.end(), 1);
  if (g < 2)
    throw DataError("cluster_robust_vcov: need at least two clusters, got " +
                    std::to_string(g));

  // Bread from the R factor of X so no UNSCALED normal equations form.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::MatrixXd r_inv =
      qr.matrixQR()
          .topLeftCorner(k, k)
          .triangularView<Eigen::Upper>()
          .solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd bread = r_inv * r_inv.transpose();  // (X'X)^-1

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_clusters, k);
  for (Eigen::Index i = 0; i < n; ++i)
    scores.row(clusters[i]) += residuals[i] * x.row(i);
  Eigen::MatrixXd meat = scores.transpose() * scores;

  const double gd = static_cast<double>(g);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double factor = gd / (gd - 1.0) * (nd - 1.0) / (nd - kd);
  Eigen::MatrixXd v = bread * meat * bread * factor;
  return 0.5 * (v + v.transpose());
}

namespace {

// Deterministic integer codes (sorted label order) for the panel's
// grouping dimensions.
struct PanelCodes {
  std::vector<int> unit;
  std::vector<int> period;
  std::vector<int> age;
  std::vector<int> cluster;
  std::vector<std::string> unit_ids;  // sorted distinct
  int n_units{0};
  int n_clusters{0};
};

PanelCodes build_codes(const PanelDataset& ds) {
  PanelCodes codes;
  std::map<std::string, int> unit_map;
  std::map<int, int> period_map, age_map;
  std::map<std::string, int> cluster_map;
  for (const auto& obs : ds.observations) {
    unit_map.emplace(obs.unit_id, 0);
    period_map.emplace(obs.period, 0);
    age_map.emplace(obs.age_years, 0);
    cluster_map.emplace(obs.cluster_id, 0);
  }
  int next = 0;
  for (auto& [id, code] : unit_map) {
    code = next++;
    codes.unit_ids.push_back(id);
  }
  next = 0;
  for (auto& [p, code] : period_map) code = next++;
  next = 0;
  for (auto& [a, code] : age_map) code = next++;
  next = 0;
  for (auto& [c, code] : cluster_map) code = next++;
  codes.n_units = static_cast<int>(unit_map.size());
  codes.n_clusters = static_cast<int>(cluster_map.size());
  const std::size_t n = ds.observations.size();
  codes.unit.resize(n);
  codes.period.resize(n);
  codes.age.resize(n);
  codes.cluster.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obs = ds.observations[i];
    codes.unit[i] = unit_map[obs.unit_id];
    codes.period[i] = period_map[obs.period];
    codes.age[i] = age_map[obs.age_years];
    codes.cluster[i] = cluster_map[obs.cluster_id];
  }
  return codes;
}

std::vector<std::vector<int>> select_groups(const PanelCodes& codes,
                                            const EstimatorOptions& opts) {
  std::vector<std::vector<int>> groups;
  for (FixedEffect fe : opts.fixed_effects) {
    switch (fe) {
      case FixedEffect::Unit: groups.push_back(codes.unit); break;
      case FixedEffect::Period: groups.push_back(codes.period); break;
      case FixedEffect::Age: groups.push_back(codes.age); break;
    }
  }
  return groups;
}

Eigen::VectorXd log_outcomes(const PanelDataset& ds) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.observations.size()));
  for (std::size_t i = 0; i < ds.observations.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = log1_outcome(ds.observations[i].outcome);
  return y;
}

}  // namespace

EstimateResult twfe_ols(const PanelDataset& ds, const DesignMatrix& regressors,
                        const EstimatorOptions& opts) {
  validate_panel(ds, opts.allow_unbalanced);
  const Eigen::Index n =
      static_cast<Eigen::Index>(ds.observations.size());
  const Eigen::Index k = regressors.cols.cols();
  if (regressors.cols.rows() != n)
    throw DataError("twfe_ols: design has " +
                    std::to_string(regressors.cols.rows()) + " rows for " +
                    std::to_string(n) + " observations");
  if (static_cast<Eigen::Index>(regressors.names.size()) != k)
    throw DataError("twfe_ols: design needs one name per column");
  if (k < 1) throw DataError("twfe_ols: empty design");

  const PanelCodes codes = build_codes(ds);
  const auto groups = select_groups(codes, opts);

  Eigen::MatrixXd z(n, k + 1);
  z.col(0) = log_outcomes(ds);
  z.rightCols(k) = regressors.cols;
  z = within_transform(std::move(z), groups, opts.demean_tol,
                       opts.demean_max_iter);

  // Greedy rank selection in column order: a column absorbed by the fixed
  // effects, or spanned by columns to its left, is dropped and reported.
  EstimateResult res;
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd q(n, k);  // orthonormal basis of the kept columns
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd v = z.col(1 + j);
    const double scale = std::max(1.0, v.norm());
    for (std::size_t b = 0; b < kept.size(); ++b)
      v -= q.col(static_cast<Eigen::Index>(b)).dot(v) *
           q.col(static_cast<Eigen::Index>(b));
    // One re-orthogonalization pass keeps the basis clean.
    for (std::size_t b = 0; b < kept.size(); ++b)
      v -= q.col(static_cast<Eigen::Index>(b)).dot(v) *
           q.col(static_cast<Eigen::Index>(b));
    if (v.norm() <= 1e-8 * scale) {
      res.dropped.push_back(regressors.names[j]);
      continue;
    }
    q.col(static_cast<Eigen::Index>(kept.size())) = v / v.norm();
    kept.push_back(j);
  }
  if (kept.empty()) {
    std::string msg = "twfe_ols: design is rank deficient, every regressor "
                      "is collinear with the fixed effects:";
    for (const auto& name : res.dropped) msg += " " + name;
    throw DataError(msg);
  }

  Eigen::MatrixXd xk(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    xk.col(static_cast<Eigen::Index>(j)) = z.col(1 + kept[j]);
    res.names.push_back(regressors.names[kept[j]]);
  }
  const Eigen::VectorXd yt = z.col(0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(xk);
  res.coef = qr.solve(yt);
  const Eigen::VectorXd resid = yt - xk * res.coef;
  res.vcov = cluster_robust_vcov(xk, resid, codes.cluster);
  res.nobs = n;
  res.cluster_count = codes.n_clusters;
  return res;
}

DesignMatrix did_design(const PanelDataset& ds) {
  DesignMatrix d;
  const Eigen::Index n = static_cast<Eigen::Index>(ds.observations.size());
  d.cols.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = ds.observations[static_cast<std::size_t>(i)];
    d.cols(i, 0) = obs.treated && obs.post ? 1.0 : 0.0;
  }
  d.names = {"D"};
  return d;
}

EstimateResult twfe_did(const PanelDataset& ds, const EstimatorOptions& opts) {
  return twfe_ols(ds, did_design(ds), opts);
}

EstimateResult event_study(const PanelDataset& ds,
                           const EventStudyOptions& opts) {
  if (opts.k_min >= opts.k_max)
    throw ConfigError("event_study: need k_min < k_max");
  if (opts.reference_k < opts.k_min || opts.reference_k > opts.k_max)
    throw ConfigError("event_study: reference event time " +
                      std::to_string(opts.reference_k) +
                      " outside the window [" + std::to_string(opts.k_min) +
                      "," + std::to_string(opts.k_max) + "]");
  validate_panel(ds, opts.base.allow_unbalanced);

  std::set<int> ks;
  for (int p : ds.periods) ks.insert(p - ds.policy_period);
  if (*ks.begin() < opts.k_min || *ks.rbegin() > opts.k_max)
    throw DataError("event_study: panel event times span [" +
                    std::to_string(*ks.begin()) + "," +
                    std::to_string(*ks.rbegin()) +
                    "], outside the requested window [" +
                    std::to_string(opts.k_min) + "," +
                    std::to_string(opts.k_max) + "]");
  if (!ks.count(opts.reference_k))
    throw DataError("event_study: reference event time " +
                    std::to_string(opts.reference_k) +
                    " is not observed in the panel");

  std::vector<int> est_ks;
  for (int kk : ks)
    if (kk != opts.reference_k) est_ks.push_back(kk);

  const Eigen::Index n = static_cast<Eigen::Index>(ds.observations.size());
  DesignMatrix design;
  design.cols = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(est_ks.size()));
  std::map<int, Eigen::Index> col_of;
  for (std::size_t j = 0; j < est_ks.size(); ++j) {
    design.names.push_back("k=" + std::to_string(est_ks[j]));
    col_of[est_ks[j]] = static_cast<Eigen::Index>(j);
  }
  std::vector<long> treated_in_bin(est_ks.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = ds.observations[static_cast<std::size_t>(i)];
    if (!obs.treated) continue;
    const int kk = obs.period - ds.policy_period;
    auto it = col_of.find(kk);
    if (it == col_of.end()) continue;  // reference event time
    design.cols(i, it->second) = 1.0;
    ++treated_in_bin[static_cast<std::size_t>(it->second)];
  }

  EstimateResult res = twfe_ols(ds, design, opts.base);
  res.reference = "k=" + std::to_string(opts.reference_k);
  res.n_treated_in_bin.clear();
  for (std::size_t j = 0; j < res.names.size(); ++j) {
    const Eigen::Index full = col_of.at(
        std::stoi(res.names[j].substr(2)));
    res.n_treated_in_bin.push_back(treated_in_bin[static_cast<std::size_t>(full)]);
  }
  return res;
}

EstimateResult dose_response(const PanelDataset& ds, int reference_decile,
                             const EstimatorOptions& opts) {
  if (reference_decile < 1 || reference_decile > 10)
    throw ConfigError("dose_response: reference decile must lie in 1..10");
  validate_panel(ds, opts.allow_unbalanced);
  std::set<int> observed;
  for (const auto& obs : ds.observations) {
    if (!obs.dose_decile)
      throw DataError("dose_response: unit '" + obs.unit_id + "' period " +
                      std::to_string(obs.period) + " has no dose decile");
    observed.insert(*obs.dose_decile);
  }
  if (!observed.count(reference_decile))
    throw DataError("dose_response: reference decile " +
                    std::to_string(reference_decile) +
                    " is not observed in the panel");

  std::vector<int> est_ds;
  for (int d : observed)
    if (d != reference_decile) est_ds.push_back(d);
  if (est_ds.empty())
    throw DataError("dose_response: every observation sits in the reference "
                    "decile, nothing to estimate");

  const Eigen::Index n = static_cast<Eigen::Index>(ds.observations.size());
  DesignMatrix design;
  design.cols = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(est_ds.size()));
  std::map<int, Eigen::Index> col_of;
  for (std::size_t j = 0; j < est_ds.size(); ++j) {
    design.names.push_back("decile=" + std::to_string(est_ds[j]));
    col_of[est_ds[j]] = static_cast<Eigen::Index>(j);
  }
  std::vector<long> treated_in_bin(est_ds.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = ds.observations[static_cast<std::size_t>(i)];
    auto it = col_of.find(*obs.dose_decile);
    if (it == col_of.end()) continue;
    design.cols(i, it->second) = 1.0;
    if (obs.treated && obs.post)
      ++treated_in_bin[static_cast<std::size_t>(it->second)];
  }

  EstimateResult res = twfe_ols(ds, design, opts);
  res.reference = "decile=" + std::to_string(reference_decile);
  res.n_treated_in_bin.clear();
  for (const auto& name : res.names) {
    const Eigen::Index full = col_of.at(std::stoi(name.substr(7)));
    res.n_treated_in_bin.push_back(treated_in_bin[static_cast<std::size_t>(full)]);
  }
  return res;
}

EstimateResult interaction_did(const PanelDataset& ds, PopularityFlag flag,
                               const EstimatorOptions& opts) {
  validate_panel(ds, opts.allow_unbalanced);
  const char* mod_name =
      flag == PopularityFlag::Unit ? "popular_unit" : "popular_artist";
  auto moderator = [&](const PanelObservation& obs) {
    return flag == PopularityFlag::Unit ? obs.popular_unit
                                        : obs.popular_artist;
  };
  std::map<std::string, bool> unit_level;
  bool any_true = false, any_false = false;
  bool treated_true = false, treated_false = false;
  for (const auto& obs : ds.observations) {
    const bool m = moderator(obs);
    auto [it, inserted] = unit_level.emplace(obs.unit_id, m);
    if (!inserted && it->second != m)
      throw DataError(std::string("interaction_did: moderator ") + mod_name +
                      " varies within unit '" + obs.unit_id + "'");
    (m ? any_true : any_false) = true;
    if (obs.treated) (m ? treated_true : treated_false) = true;
  }
  if (any_true && any_false && !(treated_true && treated_false))
    throw DataError(std::string("interaction_did: moderator ") + mod_name +
                    " takes a single level among treated units, the "
                    "interaction is not identified");

  const Eigen::Index n = static_cast<Eigen::Index>(ds.observations.size());
  DesignMatrix design;
  design.cols.resize(n, 3);
  design.names = {"D", "DxPopular", "PostxPopular"};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = ds.observations[static_cast<std::size_t>(i)];
    const double d = obs.treated && obs.post ? 1.0 : 0.0;
    const double m = moderator(obs) ? 1.0 : 0.0;
    design.cols(i, 0) = d;
    design.cols(i, 1) = d * m;
    design.cols(i, 2) = (obs.post ? 1.0 : 0.0) * m;
  }
  return twfe_ols(ds, design, opts);
}

EstimateResult did_m(const PanelDataset& ds) {
  validate_panel(ds, true);
  if (!std::count(ds.periods.begin(), ds.periods.end(), ds.policy_period))
    throw DataError("did_m: the policy period is not observed");
  int baseline = INT_MIN;
  for (int p : ds.periods)
    if (p < ds.policy_period) baseline = std::max(baseline, p);
  if (baseline == INT_MIN)
    throw DataError("did_m: no pre period available as the baseline");

  struct Pair {
    double base{0.0}, sw{0.0};
    bool has_base{false}, has_sw{false}, treated{false};
  };
  std::map<std::string, Pair> per_unit;
  for (const auto& obs : ds.observations) {
    if (obs.period != baseline && obs.period != ds.policy_period) continue;
    Pair& pr = per_unit[obs.unit_id];
    pr.treated = obs.treated;
    const double y = log1_outcome(obs.outcome);
    if (obs.period == baseline) {
      pr.base = y;
      pr.has_base = true;
    } else {
      pr.sw = y;
      pr.has_sw = true;
    }
  }
  std::vector<double> d_treated, d_control;
  for (const auto& [unit, pr] : per_unit) {
    if (!pr.has_base || !pr.has_sw)
      throw DataError("did_m: unit '" + unit +
                      "' lacks the baseline or the switch period");
    (pr.treated ? d_treated : d_control).push_back(pr.sw - pr.base);
  }
  if (d_treated.size() < 2 || d_control.size() < 2)
    throw DataError("did_m: need at least two treated and two control units");

  const double att = sample_mean(d_treated) - sample_mean(d_control);
  const double var = sample_variance(d_treated) /
                         static_cast<double>(d_treated.size()) +
                     sample_variance(d_control) /
                         static_cast<double>(d_control.size());
  EstimateResult res;
  res.names = {"att"};
  res.coef = Eigen::VectorXd::Constant(1, att);
  res.vcov = Eigen::MatrixXd::Constant(1, 1, var);
  res.nobs = 2 * static_cast<long>(per_unit.size());
  res.cluster_count = static_cast<int>(per_unit.size());
  return res;
}

SdidResult synthetic_did(const PanelDataset& ds, const SdidOptions& opts) {
  validate_panel(ds, false);
  std::vector<int> pre, post;
  for (int p : ds.periods)
    (p < ds.policy_period ? pre : post).push_back(p);
  if (pre.size() < 2)
    throw DataError("synthetic_did: need at least two pre periods");
  if (post.empty())
    throw DataError("synthetic_did: need at least one post period");

  std::map<std::string, bool> unit_treated;
  for (const auto& obs : ds.observations)
    unit_treated.emplace(obs.unit_id, obs.treated);
  std::vector<std::string> treated_units, control_units;
  for (const auto& [id, tr] : unit_treated)
    (tr ? treated_units : control_units).push_back(id);
  const Eigen::Index n_tr = static_cast<Eigen::Index>(treated_units.size());
  const Eigen::Index n_co = static_cast<Eigen::Index>(control_units.size());
  if (n_tr < 2)
    throw DataError("synthetic_did: need at least two treated units for the "
                    "jackknife");
  if (n_co < 2)
    throw DataError("synthetic_did: need at least two control units");

  // Dense unit x period matrix of log outcomes.
  std::map<std::string, Eigen::Index> unit_row;
  for (Eigen::Index i = 0; i < n_tr; ++i) unit_row[treated_units[i]] = i;
  for (Eigen::Index i = 0; i < n_co; ++i)
    unit_row[control_units[i]] = n_tr + i;
  std::map<int, Eigen::Index> period_col;
  for (std::size_t t = 0; t < ds.periods.size(); ++t)
    period_col[ds.periods[t]] = static_cast<Eigen::Index>(t);
  Eigen::MatrixXd y(n_tr + n_co, static_cast<Eigen::Index>(ds.periods.size()));
  for (const auto& obs : ds.observations)
    y(unit_row[obs.unit_id], period_col[obs.period]) =
        log1_outcome(obs.outcome);

  const Eigen::Index t_pre = static_cast<Eigen::Index>(pre.size());
  const Eigen::Index t_post = static_cast<Eigen::Index>(post.size());

  // Noise scale: sd of control-unit first differences over the pre window.
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(n_co * (t_pre - 1)));
  for (Eigen::Index i = 0; i < n_co; ++i)
    for (Eigen::Index t = 1; t < t_pre; ++t)
      diffs.push_back(y(n_tr + i, t) - y(n_tr + i, t - 1));
  const double sigma = sample_sd(diffs);
  const double zeta =
      opts.zeta_scale *
      std::pow(static_cast<double>(n_tr * t_post), 0.25) * sigma;

  // Unit weights: match the treated pre trajectory.
  Eigen::MatrixXd a_unit(t_pre, n_co);
  Eigen::VectorXd b_unit(t_pre);
  for (Eigen::Index t = 0; t < t_pre; ++t) {
    for (Eigen::Index i = 0; i < n_co; ++i) a_unit(t, i) = y(n_tr + i, t);
    b_unit[t] = y.col(t).head(n_tr).mean();
  }
  const double ridge = zeta * zeta * static_cast<double>(t_pre);
  SimplexLsResult omega = solve_simplex_ls(a_unit, b_unit, ridge, opts.fw_tol,
                                           opts.fw_max_iter);

  // Time weights: match each control unit's post mean from its pre values.
  Eigen::MatrixXd a_time(n_co, t_pre);
  Eigen::VectorXd b_time(n_co);
  for (Eigen::Index i = 0; i < n_co; ++i) {
    for (Eigen::Index t = 0; t < t_pre; ++t) a_time(i, t) = y(n_tr + i, t);
    b_time[i] =
        y.row(n_tr + i).segment(t_pre, t_post).mean();
  }
  SimplexLsResult lambda = solve_simplex_ls(a_time, b_time, 0.0, opts.fw_tol,
                                            opts.fw_max_iter);

  // Weighted double difference.  d_u = post mean - lambda-weighted pre.
  Eigen::VectorXd d(n_tr + n_co);
  for (Eigen::Index u = 0; u < n_tr + n_co; ++u)
    d[u] = y.row(u).segment(t_pre, t_post).mean() -
           y.row(u).head(t_pre).dot(lambda.x);
  const double treated_part = d.head(n_tr).mean();
  const double control_part = d.tail(n_co).dot(omega.x);
  const double att = treated_part - control_part;

  // Leave-one-unit-out jackknife with the weights held fixed; dropping a
  // control renormalizes the remaining unit weights.
  const Eigen::Index n_all = n_tr + n_co;
  std::vector<double> loo(static_cast<std::size_t>(n_all));
  const double treated_sum = d.head(n_tr).sum();
  for (Eigen::Index u = 0; u < n_tr; ++u)
    loo[static_cast<std::size_t>(u)] =
        (treated_sum - d[u]) / static_cast<double>(n_tr - 1) - control_part;
  for (Eigen::Index i = 0; i < n_co; ++i) {
    const double w = omega.x[i];
    const double rest = 1.0 - w;
    if (rest <= 1e-12)
      throw NumericError(
          "synthetic_did: jackknife is degenerate, control unit '" +
          control_units[static_cast<std::size_t>(i)] +
          "' carries all the weight");
    loo[static_cast<std::size_t>(n_tr + i)] =
        treated_part - (control_part - w * d[n_tr + i]) / rest;
  }
  double jk_mean = 0.0;
  for (double v : loo) jk_mean += v;
  jk_mean /= static_cast<double>(n_all);
  double jk_ss = 0.0;
  for (double v : loo) jk_ss += (v - jk_mean) * (v - jk_mean);
  const double var =
      (static_cast<double>(n_all) - 1.0) / static_cast<double>(n_all) * jk_ss;

  SdidResult out;
  out.estimate.names = {"att"};
  out.estimate.coef = Eigen::VectorXd::Constant(1, att);
  out.estimate.vcov = Eigen::MatrixXd::Constant(1, 1, var);
  out.estimate.nobs = static_cast<long>(ds.observations.size());
  out.estimate.cluster_count = static_cast<int>(n_all);
  out.weights.omega = omega.x;
  out.weights.lambda = lambda.x;
  out.weights.zeta = zeta;
  out.weights.control_units = control_units;
  out.weights.pre_periods = pre;
  return out;
}

}  // namespace excerptlab
