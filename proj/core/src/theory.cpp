#include "excerptlab/theory.hpp"

#include <cmath>
#include <random>
#include <string>

#include "excerptlab/errors.hpp"
#include "excerptlab/rng.hpp"

namespace excerptlab {

namespace {

void check_domain(const DemandParams& q) {
  if (!(q.p > 0.0 && q.p < 1.0))
    throw ConfigError("demand: p must lie in (0,1), got " +
                      std::to_string(q.p));
  if (!(q.theta > 0.0 && q.theta <= 1.0))
    throw ConfigError("demand: theta must lie in (0,1], got " +
                      std::to_string(q.theta));
  if (!(q.tau > 0.0 && q.tau < 1.0))
    throw ConfigError("demand: tau must lie in (0,1), got " +
                      std::to_string(q.tau));
}

}  // namespace

double demand(const DemandParams& q) {
  check_domain(q);
  const double lo = (1.0 - q.theta) * q.p;  // perceived match at m = 0
  const double hi = q.theta + lo;           // perceived match at m = 1
  if (q.tau <= lo) return 1.0;
  if (q.tau >= hi) return 0.0;
  return 1.0 - (q.tau - lo) / q.theta;
}

DemandComparativeStatics demand_comparative_statics(const DemandParams& q) {
  check_domain(q);
  const double lo = (1.0 - q.theta) * q.p;
  const double hi = q.theta + lo;
  if (!(q.tau > lo && q.tau < hi))
    throw ConfigError(
        "demand_comparative_statics: tau is outside the interior regime, "
        "demand is clamped and the derivatives are zero or undefined");
  return DemandComparativeStatics{
      (q.tau - q.p) / (q.theta * q.theta),
      -1.0 / (q.theta * q.theta),
  };
}

PanelDataset simulate_depreciation(const DepreciationSpec& spec) {
  if (spec.horizon < 2)
    throw ConfigError("simulate_depreciation: horizon must be at least 2");
  if (spec.policy_period < 1 || spec.policy_period >= spec.horizon)
    throw ConfigError(
        "simulate_depreciation: policy period must fall inside the horizon");
  if (!(spec.treated_peak > 0.0 && spec.control_peak > 0.0))
    throw ConfigError("simulate_depreciation: peaks must be positive");
  PanelDataset ds;
  ds.policy_period = spec.policy_period;
  ds.periods.resize(spec.horizon);
  for (int t = 0; t < spec.horizon; ++t) ds.periods[t] = t;
  for (int unit = 0; unit < 2; ++unit) {
    const bool treated = unit == 0;
    const double peak = treated ? spec.treated_peak : spec.control_peak;
    const std::string id = treated ? "treated" : "control";
    for (int t = 0; t < spec.horizon; ++t) {
      PanelObservation obs;
      obs.unit_id = id;
      obs.period = t;
      obs.outcome = peak * std::exp(-spec.decay_rate * t);
      obs.treated = treated;
      obs.post = t >= spec.policy_period;
      obs.age_years = 0;
      obs.cluster_id = id;
      ds.observations.push_back(std::move(obs));
    }
  }
  return ds;
}

SimulatedPanel simulate_panel(const SimPanelSpec& spec) {
  if (spec.n_treated < 1 || spec.n_control < 1)
    throw ConfigError("simulate_panel: need at least one unit per arm");
  if (spec.periods < 2)
    throw ConfigError("simulate_panel: need at least two periods");
  if (spec.policy_period < 1 || spec.policy_period >= spec.periods)
    throw ConfigError(
        "simulate_panel: policy period must fall inside the panel");
  if (spec.beta_true.size() != 1 && spec.beta_true.size() != 10)
    throw ConfigError(
        "simulate_panel: beta_true must have one entry or ten per-decile "
        "entries");
  if (!(spec.noise_sd >= 0.0 && spec.unit_fe_sd >= 0.0 &&
        spec.period_fe_sd >= 0.0))
    throw ConfigError("simulate_panel: standard deviations must be >= 0");
  if (!(spec.ar1_rho > -1.0 && spec.ar1_rho < 1.0))
    throw ConfigError("simulate_panel: ar1_rho must lie in (-1,1)");
  if (!(spec.popular_share >= 0.0 && spec.popular_share <= 1.0))
    throw ConfigError("simulate_panel: popular_share must lie in [0,1]");
  const bool per_decile = spec.beta_true.size() == 10;
  std::vector<int> pool = spec.dose_pool;
  if (pool.empty())
    for (int d = 1; d <= 10; ++d) pool.push_back(d);
  for (int d : pool)
    if (d < 1 || d > 10)
      throw ConfigError("simulate_panel: dose_pool entries must lie in 1..10");

  const int n_units = spec.n_treated + spec.n_control;
  SimulatedPanel out;
  out.truth.beta = spec.beta_true;
  out.truth.unit_fe.resize(n_units);
  out.truth.period_fe.resize(spec.periods);

  // Stream 0: shared effects.  Stream u+1: unit u's own noise path.
  {
    auto eng = make_engine(derive_seed(spec.seed, 0));
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int u = 0; u < n_units; ++u)
      out.truth.unit_fe[u] = spec.unit_fe_sd * n01(eng);
    for (int t = 0; t < spec.periods; ++t)
      out.truth.period_fe[t] = spec.period_fe_sd * n01(eng);
  }

  PanelDataset& ds = out.panel;
  ds.policy_period = spec.policy_period;
  ds.periods.resize(spec.periods);
  for (int t = 0; t < spec.periods; ++t) ds.periods[t] = t;
  ds.observations.reserve(static_cast<std::size_t>(n_units) * spec.periods);

  const int n_popular_treated =
      static_cast<int>(std::lround(spec.popular_share * spec.n_treated));
  const int n_popular_control =
      static_cast<int>(std::lround(spec.popular_share * spec.n_control));

  char idbuf[32];
  for (int u = 0; u < n_units; ++u) {
    const bool treated = u < spec.n_treated;
    const int arm_index = treated ? u : u - spec.n_treated;
    const bool popular =
        arm_index < (treated ? n_popular_treated : n_popular_control);
    const int dose =
        treated && per_decile ? pool[arm_index % pool.size()] : 1;

    auto eng = make_engine(derive_seed(spec.seed, 1 + u));
    std::normal_distribution<double> n01(0.0, 1.0);
    // Stationary AR(1): marginal sd stays noise_sd for any rho.
    double eps = spec.noise_sd * n01(eng);
    const double innov_scale =
        spec.noise_sd * std::sqrt(1.0 - spec.ar1_rho * spec.ar1_rho);

    std::snprintf(idbuf, sizeof idbuf, "%c%06d", treated ? 't' : 'c',
                  arm_index);
    const std::string unit_id = idbuf;
    for (int t = 0; t < spec.periods; ++t) {
      if (t > 0) eps = spec.ar1_rho * eps + innov_scale * n01(eng);
      const bool post = t >= spec.policy_period;
      const bool on = treated && post;
      double effect = 0.0;
      if (on) {
        if (per_decile)
          effect = spec.beta_true[dose - 1];
        else if (popular && spec.beta_popular)
          effect = *spec.beta_popular;
        else
          effect = spec.beta_true[0];
      }
      double v = spec.alpha + out.truth.unit_fe[u] + out.truth.period_fe[t] +
                 effect + eps;
      double outcome;
      if (spec.decay_rate > 0.0) {
        // Level decay: outcomes die out geometrically, so log(y + 1) is
        // deliberately misspecified relative to the planted design.
        if (treated) v += spec.treated_level_shift;
        outcome = std::exp(v - spec.decay_rate * t);
      } else {
        // Exactly log-linear: log(outcome + 1) reproduces v.
        outcome = std::expm1(std::max(v, 0.0));
      }
      PanelObservation obs;
      obs.unit_id = unit_id;
      obs.period = t;
      obs.outcome = outcome;
      obs.treated = treated;
      obs.post = post;
      // Unit age advances at a unit-specific month so the age grid is not
      // collinear with the period grid.
      obs.age_years = 1 + (u % 5) + (t >= (u % spec.periods) ? 1 : 0);
      obs.cluster_id = unit_id;
      obs.popular_unit = popular;
      obs.popular_artist = popular;
      if (per_decile)
        obs.dose_decile = on ? dose : 1;
      ds.observations.push_back(std::move(obs));
    }
  }
  return out;
}

}  // namespace excerptlab
