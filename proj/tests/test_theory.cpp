#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "excerptlab/errors.hpp"
#include "excerptlab/panel.hpp"
#include "excerptlab/rng.hpp"
#include "excerptlab/stats.hpp"
#include "excerptlab/theory.hpp"

using namespace excerptlab;

namespace {

double log_outcome(const PanelObservation& obs) {
  return std::log1p(obs.outcome);
}

const PanelObservation& find_obs(const PanelDataset& ds,
                                 const std::string& unit, int period) {
  for (const auto& obs : ds.observations)
    if (obs.unit_id == unit && obs.period == period) return obs;
  throw std::runtime_error("observation not found");
}

}  // namespace

TEST_CASE("demand worked example and clamped regimes") {
  CHECK(demand({0.5, 0.5, 0.6}) == doctest::Approx(0.3).epsilon(1e-12));
  // tau below the lowest perceivable match: everyone buys.
  CHECK(demand({0.8, 0.2, 0.5}) == 1.0);
  // tau above the highest perceivable match: nobody buys.
  CHECK(demand({0.2, 0.3, 0.5}) == 0.0);
}

TEST_CASE("demand is continuous at both clamp boundaries") {
  const double p = 0.5, theta = 0.4;
  const double lo = (1.0 - theta) * p;
  const double hi = theta + lo;
  const double eps = 1e-13;
  CHECK(std::abs(demand({p, theta, lo}) - demand({p, theta, lo + eps})) <
        1e-12);
  CHECK(std::abs(demand({p, theta, hi}) - demand({p, theta, hi - eps})) <
        1e-12);
}

TEST_CASE("demand matches its Monte Carlo definition") {
  // A buyer with match m ~ U(0,1) purchases when the theta-weighted blend
  // of signal and match clears tau.
  const DemandParams grid[] = {
      {0.5, 0.5, 0.6}, {0.3, 0.6, 0.45}, {0.7, 0.25, 0.66}};
  auto eng = make_engine(12345);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const DemandParams& q : grid) {
    const int n = 2000000;
    int bought = 0;
    for (int i = 0; i < n; ++i) {
      const double m = u01(eng);
      if ((1.0 - q.theta) * q.p + q.theta * m >= q.tau) ++bought;
    }
    const double mc = static_cast<double>(bought) / n;
    CHECK(std::abs(demand(q) - mc) < 2e-3);
  }
}

TEST_CASE("comparative statics match finite differences") {
  const DemandParams grid[] = {
      {0.5, 0.5, 0.6}, {0.4, 0.7, 0.5}, {0.6, 0.45, 0.55}};
  for (const DemandParams& q : grid) {
    const DemandComparativeStatics cs = demand_comparative_statics(q);
    const double h = 1e-6;
    const double d_theta = (demand({q.p, q.theta + h, q.tau}) -
                            demand({q.p, q.theta - h, q.tau})) /
                           (2.0 * h);
    CHECK(cs.d_demand_d_theta == doctest::Approx(d_theta).epsilon(1e-6));
    const double hh = 1e-4;
    const double cross =
        (demand({q.p + hh, q.theta + hh, q.tau}) -
         demand({q.p - hh, q.theta + hh, q.tau}) -
         demand({q.p + hh, q.theta - hh, q.tau}) +
         demand({q.p - hh, q.theta - hh, q.tau})) /
        (4.0 * hh * hh);
    CHECK(cs.d2_demand_d_theta_d_p == doctest::Approx(cross).epsilon(1e-6));
  }
}

TEST_CASE("longer excerpts help exactly the tracks with tau above p") {
  // Spreading perceived match helps marginal (high-threshold) tracks and
  // hurts safe bets; the cross effect is uniformly negative.
  for (double p : {0.3, 0.5, 0.7}) {
    for (double theta : {0.3, 0.5, 0.8}) {
      for (double tau_shift : {-0.05, 0.05}) {
        const double tau = p + tau_shift;
        DemandParams q{p, theta, tau};
        const double lo = (1.0 - theta) * p;
        if (!(tau > lo && tau < theta + lo)) continue;
        const DemandComparativeStatics cs = demand_comparative_statics(q);
        if (tau > p) CHECK(cs.d_demand_d_theta > 0.0);
        if (tau < p) CHECK(cs.d_demand_d_theta < 0.0);
        CHECK(cs.d2_demand_d_theta_d_p < 0.0);
      }
    }
  }
}

TEST_CASE("demand rejects out-of-domain parameters") {
  CHECK_THROWS_AS((void)demand({0.0, 0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS((void)demand({1.0, 0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS((void)demand({0.5, 0.0, 0.5}), ConfigError);
  CHECK_THROWS_AS((void)demand({0.5, 1.1, 0.5}), ConfigError);
  CHECK_THROWS_AS((void)demand({0.5, 0.5, 0.0}), ConfigError);
  CHECK_THROWS_AS((void)demand({0.5, 0.5, 1.0}), ConfigError);
  // Statics are undefined once demand is clamped.
  CHECK_THROWS_AS((void)demand_comparative_statics({0.8, 0.2, 0.5}),
                  ConfigError);
}

TEST_CASE("depreciation panel reproduces the exponential decay exactly") {
  const PanelDataset ds = simulate_depreciation();
  CHECK(ds.observations.size() == 36);
  CHECK(ds.periods.size() == 18);
  CHECK(ds.policy_period == 9);
  for (int t = 0; t < 18; ++t) {
    CHECK(find_obs(ds, "treated", t).outcome == 20.0 * std::exp(-0.5 * t));
    CHECK(find_obs(ds, "control", t).outcome == 10.0 * std::exp(-0.5 * t));
    CHECK(find_obs(ds, "treated", t).post == (t >= 9));
  }
}

TEST_CASE("depreciation log gap shrinks from 0.6466 toward zero") {
  const PanelDataset ds = simulate_depreciation();
  auto gap = [&](int t) {
    return log_outcome(find_obs(ds, "treated", t)) -
           log_outcome(find_obs(ds, "control", t));
  };
  CHECK(gap(0) == doctest::Approx(std::log(21.0 / 11.0)).epsilon(1e-12));
  CHECK(gap(0) == doctest::Approx(0.6466).epsilon(1e-4));
  for (int t = 1; t < 18; ++t) CHECK(gap(t) < gap(t - 1));
  // The level ratio is constant at 2, so the log(y+1) gap decaying to
  // zero is purely the dying-out trap, not a real convergence.
  CHECK(gap(12) == doctest::Approx(0.0239015).epsilon(1e-4));
  CHECK(gap(17) < 0.01);
}

TEST_CASE("depreciation spec validation") {
  DepreciationSpec bad;
  bad.horizon = 1;
  CHECK_THROWS_AS((void)simulate_depreciation(bad), ConfigError);
  bad = {};
  bad.policy_period = 18;
  CHECK_THROWS_AS((void)simulate_depreciation(bad), ConfigError);
  bad = {};
  bad.control_peak = 0.0;
  CHECK_THROWS_AS((void)simulate_depreciation(bad), ConfigError);
}

TEST_CASE("simulate_panel is bit-reproducible") {
  SimPanelSpec spec;
  spec.n_treated = 40;
  spec.n_control = 40;
  spec.seed = 99;
  const SimulatedPanel a = simulate_panel(spec);
  const SimulatedPanel b = simulate_panel(spec);
  REQUIRE(a.panel.observations.size() == b.panel.observations.size());
  for (std::size_t i = 0; i < a.panel.observations.size(); ++i) {
    CHECK(a.panel.observations[i].outcome == b.panel.observations[i].outcome);
    CHECK(a.panel.observations[i].unit_id == b.panel.observations[i].unit_id);
  }
  CHECK(a.truth.unit_fe == b.truth.unit_fe);
  CHECK(a.truth.period_fe == b.truth.period_fe);

  spec.seed = 100;
  const SimulatedPanel c = simulate_panel(spec);
  CHECK(a.panel.observations[0].outcome != c.panel.observations[0].outcome);
}

TEST_CASE("simulate_panel output validates and plants the effect exactly") {
  SimPanelSpec spec;
  spec.n_treated = 6;
  spec.n_control = 5;
  spec.periods = 8;
  spec.policy_period = 4;
  spec.unit_fe_sd = 0.0;
  spec.period_fe_sd = 0.0;
  spec.noise_sd = 0.0;
  spec.beta_true = {0.054};
  const SimulatedPanel sim = simulate_panel(spec);
  validate_panel(sim.panel);
  CHECK(sim.panel.observations.size() == 88);
  for (const auto& obs : sim.panel.observations) {
    const double expected =
        spec.alpha + ((obs.treated && obs.post) ? 0.054 : 0.0);
    CHECK(std::log1p(obs.outcome) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("simulate_panel popular units get the override effect") {
  SimPanelSpec spec;
  spec.n_treated = 10;
  spec.n_control = 10;
  spec.periods = 4;
  spec.policy_period = 2;
  spec.unit_fe_sd = 0.0;
  spec.period_fe_sd = 0.0;
  spec.noise_sd = 0.0;
  spec.beta_true = {0.10};
  spec.beta_popular = 0.02;
  spec.popular_share = 0.3;
  const SimulatedPanel sim = simulate_panel(spec);
  int popular_treated = 0;
  for (const auto& obs : sim.panel.observations) {
    if (!(obs.treated && obs.post)) continue;
    const double effect = std::log1p(obs.outcome) - spec.alpha;
    if (obs.popular_unit) {
      ++popular_treated;
      CHECK(effect == doctest::Approx(0.02).epsilon(1e-12));
    } else {
      CHECK(effect == doctest::Approx(0.10).epsilon(1e-12));
    }
  }
  CHECK(popular_treated == 3 * 2);  // 3 popular treated units, 2 post periods
}

TEST_CASE("simulate_panel per-decile mode cycles the dose pool") {
  SimPanelSpec spec;
  spec.n_treated = 4;
  spec.n_control = 3;
  spec.periods = 4;
  spec.policy_period = 2;
  spec.unit_fe_sd = 0.0;
  spec.period_fe_sd = 0.0;
  spec.noise_sd = 0.0;
  spec.beta_true = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09};
  spec.dose_pool = {3, 7};
  const SimulatedPanel sim = simulate_panel(spec);
  for (const auto& obs : sim.panel.observations) {
    REQUIRE(obs.dose_decile.has_value());
    if (obs.treated && obs.post) {
      const int expected_dose = (std::stoi(obs.unit_id.substr(1)) % 2 == 0)
                                    ? 3
                                    : 7;
      CHECK(*obs.dose_decile == expected_dose);
      CHECK(std::log1p(obs.outcome) - spec.alpha ==
            doctest::Approx(spec.beta_true[*obs.dose_decile - 1])
                .epsilon(1e-10));
    } else {
      CHECK(*obs.dose_decile == 1);
    }
  }
}

TEST_CASE("simulate_panel AR(1) noise is stationary with the right sd") {
  SimPanelSpec spec;
  spec.n_treated = 1;
  spec.n_control = 2500;
  spec.periods = 2;
  spec.policy_period = 1;
  spec.alpha = 20.0;  // keep v far from the expm1 clamp at zero
  spec.unit_fe_sd = 0.0;
  spec.period_fe_sd = 0.0;
  spec.noise_sd = 1.0;
  spec.ar1_rho = 0.95;
  spec.beta_true = {0.0};
  spec.seed = 42;
  const SimulatedPanel sim = simulate_panel(spec);
  std::vector<double> e0, e1;
  for (const auto& obs : sim.panel.observations) {
    if (!obs.treated) {
      if (obs.period == 0) e0.push_back(std::log1p(obs.outcome) - spec.alpha);
      if (obs.period == 1) e1.push_back(std::log1p(obs.outcome) - spec.alpha);
    }
  }
  // Marginal sd equals noise_sd at every period (stationary start), and
  // the lag-1 correlation equals rho.
  CHECK(sample_sd(e0) == doctest::Approx(1.0).epsilon(0.06));
  CHECK(sample_sd(e1) == doctest::Approx(1.0).epsilon(0.06));
  CHECK(pearson_correlation(e0, e1) == doctest::Approx(0.95).epsilon(0.02));
}

TEST_CASE("simulate_panel decay mode reproduces the depreciation trap") {
  SimPanelSpec spec;
  spec.n_treated = 1;
  spec.n_control = 1;
  spec.periods = 18;
  spec.policy_period = 9;
  spec.alpha = std::log(10.0);
  spec.unit_fe_sd = 0.0;
  spec.period_fe_sd = 0.0;
  spec.noise_sd = 0.0;
  spec.beta_true = {0.0};
  spec.decay_rate = 0.5;
  spec.treated_level_shift = std::log(2.0);
  const SimulatedPanel sim = simulate_panel(spec);
  // Levels: control 10*exp(-t/2), treated double that, no planted effect.
  for (const auto& obs : sim.panel.observations) {
    const double peak = obs.treated ? 20.0 : 10.0;
    CHECK(obs.outcome ==
          doctest::Approx(peak * std::exp(-0.5 * obs.period)).epsilon(1e-12));
  }
}

TEST_CASE("simulate_panel rejects inconsistent specs") {
  SimPanelSpec spec;
  spec.n_treated = 0;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.periods = 1;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.policy_period = 18;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.beta_true = {0.1, 0.2};
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.ar1_rho = 1.0;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.popular_share = 1.5;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.dose_pool = {0};
  spec.beta_true.assign(10, 0.0);
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
  spec = {};
  spec.noise_sd = -0.1;
  CHECK_THROWS_AS((void)simulate_panel(spec), ConfigError);
}
