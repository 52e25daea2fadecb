#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "excerptlab/errors.hpp"
#include "excerptlab/estimators.hpp"
#include "excerptlab/stats.hpp"
#include "excerptlab/theory.hpp"

using namespace excerptlab;

namespace {

PanelObservation obs_of(std::string unit, int period, double y, bool treated,
                        bool post, bool popular = false) {
  PanelObservation obs;
  obs.unit_id = unit;
  obs.period = period;
  obs.outcome = y;
  obs.treated = treated;
  obs.post = post;
  obs.cluster_id = std::move(unit);
  obs.popular_unit = popular;
  return obs;
}

// Balanced two-group panel on the given periods, outcomes chosen so the
// log scale is exact: outcome = expm1(level).
PanelDataset level_panel(int n_treated, int n_control, int periods,
                         int policy, double att) {
  PanelDataset ds;
  ds.policy_period = policy;
  for (int t = 0; t < periods; ++t) ds.periods.push_back(t);
  for (int u = 0; u < n_treated + n_control; ++u) {
    const bool treated = u < n_treated;
    const std::string id = (treated ? "t" : "c") + std::to_string(u);
    for (int t = 0; t < periods; ++t) {
      const bool post = t >= policy;
      const double level = 0.3 * u + 0.1 * t +
                           (treated && post ? att : 0.0);
      ds.observations.push_back(
          obs_of(id, t, std::expm1(level), treated, post));
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("dose-response recovers per-decile effects relative to the reference") {
  SimPanelSpec spec;
  spec.n_treated = 9;
  spec.n_control = 9;
  spec.periods = 6;
  spec.policy_period = 3;
  spec.noise_sd = 0.0;
  spec.dose_pool = {1, 2, 3};
  spec.beta_true = {0.0, 0.02, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  spec.seed = 21;
  const SimulatedPanel sim = simulate_panel(spec);
  const EstimateResult res = dose_response(sim.panel);
  CHECK(res.reference == "decile=1");
  REQUIRE(res.names == std::vector<std::string>{"decile=2", "decile=3"});
  CHECK(res.coef_of("decile=2") == doctest::Approx(0.02).epsilon(1e-8));
  CHECK(res.coef_of("decile=3") == doctest::Approx(0.05).epsilon(1e-8));
  // Three treated units per decile, three post periods each.
  REQUIRE(res.n_treated_in_bin.size() == 2);
  CHECK(res.n_treated_in_bin[0] == 9);
  CHECK(res.n_treated_in_bin[1] == 9);
}

TEST_CASE("dose-response validation") {
  SimPanelSpec spec;
  spec.n_treated = 4;
  spec.n_control = 4;
  spec.periods = 4;
  spec.policy_period = 2;
  spec.dose_pool = {2, 3};
  spec.beta_true = {0.0, 0.02, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  spec.seed = 22;
  SimulatedPanel sim = simulate_panel(spec);
  CHECK_THROWS_AS((void)dose_response(sim.panel, 0), ConfigError);
  CHECK_THROWS_AS((void)dose_response(sim.panel, 11), ConfigError);
  CHECK_THROWS_AS((void)dose_response(sim.panel, 7), DataError);  // unobserved

  SimulatedPanel no_dose = sim;
  no_dose.panel.observations.front().dose_decile.reset();
  CHECK_THROWS_AS((void)dose_response(no_dose.panel), DataError);

  SimPanelSpec flat = spec;
  flat.dose_pool = {1};
  flat.beta_true = {0.0};
  const SimulatedPanel all_ref = simulate_panel(flat);
  CHECK_THROWS_AS((void)dose_response(all_ref.panel), DataError);
}

TEST_CASE("interaction splits the effect by the popularity flag") {
  SimPanelSpec spec;
  spec.n_treated = 10;
  spec.n_control = 10;
  spec.periods = 6;
  spec.policy_period = 3;
  spec.noise_sd = 0.0;
  spec.beta_true = {0.04};
  spec.beta_popular = 0.10;
  spec.popular_share = 0.5;
  spec.seed = 31;
  const SimulatedPanel sim = simulate_panel(spec);
  bool treated_pop = false, treated_unpop = false;
  for (const auto& obs : sim.panel.observations)
    if (obs.treated) (obs.popular_unit ? treated_pop : treated_unpop) = true;
  REQUIRE(treated_pop);
  REQUIRE(treated_unpop);
  const EstimateResult res =
      interaction_did(sim.panel, PopularityFlag::Unit);
  CHECK(res.coef_of("D") == doctest::Approx(0.04).epsilon(1e-8));
  CHECK(res.coef_of("DxPopular") ==
        doctest::Approx(0.06).epsilon(1e-7));
  CHECK(std::abs(res.coef_of("PostxPopular")) < 1e-8);
}

TEST_CASE("interaction rejects unidentified moderators") {
  // Moderator changing over time within a unit is malformed input.
  PanelDataset ds;
  ds.policy_period = 1;
  ds.periods = {0, 1};
  ds.observations = {
      obs_of("t0", 0, 1.0, true, false, false),
      obs_of("t0", 1, 2.0, true, true, true),  // flips mid-panel
      obs_of("c0", 0, 1.0, false, false, false),
      obs_of("c0", 1, 1.5, false, true, false),
  };
  CHECK_THROWS_AS((void)interaction_did(ds, PopularityFlag::Unit), DataError);

  // Moderator varies in the panel but not among treated units.
  PanelDataset one_sided;
  one_sided.policy_period = 1;
  one_sided.periods = {0, 1};
  for (const std::string& id : {"t0", "t1"})
    for (int t = 0; t < 2; ++t)
      one_sided.observations.push_back(
          obs_of(id, t, 1.0 + t, true, t == 1, true));
  one_sided.observations.push_back(obs_of("c0", 0, 1.0, false, false, true));
  one_sided.observations.push_back(obs_of("c0", 1, 1.2, false, true, true));
  one_sided.observations.push_back(obs_of("c1", 0, 1.0, false, false, false));
  one_sided.observations.push_back(obs_of("c1", 1, 1.1, false, true, false));
  CHECK_THROWS_AS((void)interaction_did(one_sided, PopularityFlag::Unit),
                  DataError);
}

TEST_CASE("a constant moderator degrades to the plain policy regression") {
  SimPanelSpec spec;
  spec.n_treated = 6;
  spec.n_control = 6;
  spec.periods = 4;
  spec.policy_period = 2;
  spec.noise_sd = 0.2;
  spec.beta_true = {0.05};
  spec.seed = 33;
  const SimulatedPanel sim = simulate_panel(spec);  // nobody is popular
  const EstimateResult inter =
      interaction_did(sim.panel, PopularityFlag::Unit);
  REQUIRE(inter.names == std::vector<std::string>{"D"});
  CHECK(inter.dropped ==
        std::vector<std::string>{"DxPopular", "PostxPopular"});
  const EstimateResult plain = twfe_did(sim.panel);
  CHECK(inter.coef_of("D") ==
        doctest::Approx(plain.coef_of("D")).epsilon(1e-12));
}

TEST_CASE("switcher contrast matches the hand computation") {
  PanelDataset ds;
  ds.policy_period = 1;
  ds.periods = {0, 1};
  const struct {
    const char* id;
    double pre, post;
    bool treated;
  } rows[] = {
      {"t0", 10.0, 30.0, true},
      {"t1", 5.0, 10.0, true},
      {"c0", 8.0, 9.0, false},
      {"c1", 3.0, 4.0, false},
  };
  for (const auto& r : rows) {
    ds.observations.push_back(obs_of(r.id, 0, r.pre, r.treated, false));
    ds.observations.push_back(obs_of(r.id, 1, r.post, r.treated, true));
  }
  const EstimateResult res = did_m(ds);
  const std::vector<double> dt = {std::log1p(30.0) - std::log1p(10.0),
                                  std::log1p(10.0) - std::log1p(5.0)};
  const std::vector<double> dc = {std::log1p(9.0) - std::log1p(8.0),
                                  std::log1p(4.0) - std::log1p(3.0)};
  const double att = sample_mean(dt) - sample_mean(dc);
  const double var = sample_variance(dt) / 2.0 + sample_variance(dc) / 2.0;
  REQUIRE(res.names == std::vector<std::string>{"att"});
  CHECK(res.coef_of("att") == doctest::Approx(att).epsilon(1e-12));
  CHECK(res.se_of("att") == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(res.nobs == 8);
  CHECK(res.cluster_count == 4);
}

TEST_CASE("with two periods the switcher contrast equals TWFE") {
  SimPanelSpec spec;
  spec.n_treated = 6;
  spec.n_control = 6;
  spec.periods = 2;
  spec.policy_period = 1;
  spec.noise_sd = 0.3;
  spec.beta_true = {0.1};
  spec.seed = 44;
  const SimulatedPanel sim = simulate_panel(spec);
  const double a = did_m(sim.panel).coef_of("att");
  const double b = twfe_did(sim.panel).coef_of("D");
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("switcher contrast validation") {
  PanelDataset ds = level_panel(2, 2, 2, 1, 0.1);
  ds.policy_period = 5;  // never observed
  for (auto& obs : ds.observations) obs.post = false;
  CHECK_THROWS_AS((void)did_m(ds), DataError);

  PanelDataset no_pre = level_panel(2, 2, 2, 0, 0.0);
  for (auto& obs : no_pre.observations) obs.post = true;
  CHECK_THROWS_AS((void)did_m(no_pre), DataError);

  PanelDataset thin = level_panel(1, 3, 2, 1, 0.1);
  CHECK_THROWS_AS((void)did_m(thin), DataError);

  PanelDataset gap = level_panel(3, 3, 2, 1, 0.1);
  // Drop one unit's policy-period row: its change is undefined.
  std::erase_if(gap.observations, [](const PanelObservation& obs) {
    return obs.unit_id == "c4" && obs.period == 1;
  });
  CHECK_THROWS_AS((void)did_m(gap), DataError);
}

TEST_CASE("synthetic DiD is exact under shared trends") {
  // Unit levels cancel out of the double difference, so the estimate hits
  // the planted effect for any simplex weights; the treated pre mean also
  // sits exactly at the uniform control average, keeping the unit weights
  // interior.
  PanelDataset ds;
  ds.policy_period = 3;
  ds.periods = {0, 1, 2, 3, 4, 5};
  const struct {
    const char* id;
    double alpha;
    bool treated;
  } units[] = {{"t0", 0.5, true},  {"t1", 1.0, true},  {"t2", 1.5, true},
               {"c0", 0.8, false}, {"c1", 1.0, false}, {"c2", 1.2, false}};
  for (const auto& u : units) {
    for (int t = 0; t < 6; ++t) {
      const bool post = t >= 3;
      const double level =
          u.alpha + 0.1 * t + (u.treated && post ? 0.07 : 0.0);
      ds.observations.push_back(
          obs_of(u.id, t, std::expm1(level), u.treated, post));
    }
  }
  const SdidResult res = synthetic_did(ds);
  CHECK(res.estimate.coef_of("att") == doctest::Approx(0.07).epsilon(1e-8));
  // Every leave-one-out replicate equals the full estimate.
  CHECK(res.estimate.se_of("att") < 1e-7);
}

TEST_CASE("synthetic DiD weights live on the simplex") {
  SimPanelSpec spec;
  spec.n_treated = 8;
  spec.n_control = 12;
  spec.periods = 8;
  spec.policy_period = 5;
  spec.noise_sd = 0.15;
  spec.beta_true = {0.06};
  spec.seed = 51;
  const SimulatedPanel sim = simulate_panel(spec);
  const SdidResult res = synthetic_did(sim.panel);
  REQUIRE(res.weights.omega.size() == 12);
  REQUIRE(res.weights.lambda.size() == 5);
  CHECK(res.weights.omega.minCoeff() >= -1e-12);
  CHECK(res.weights.lambda.minCoeff() >= -1e-12);
  CHECK(res.weights.omega.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.weights.lambda.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.weights.zeta > 0.0);
  CHECK(res.weights.control_units.size() == 12);
  CHECK(res.weights.pre_periods == std::vector<int>{0, 1, 2, 3, 4});
  // The estimate should land near the planted effect on this quiet panel.
  CHECK(res.estimate.coef_of("att") ==
        doctest::Approx(0.06).epsilon(0.5));
  CHECK(res.estimate.se_of("att") > 0.0);
}

TEST_CASE("synthetic DiD validation") {
  PanelDataset one_pre = level_panel(2, 2, 2, 1, 0.1);
  CHECK_THROWS_AS((void)synthetic_did(one_pre), DataError);

  PanelDataset no_post = level_panel(2, 2, 3, 3, 0.0);
  for (auto& obs : no_post.observations) obs.post = false;
  CHECK_THROWS_AS((void)synthetic_did(no_post), DataError);

  PanelDataset one_treated = level_panel(1, 3, 6, 3, 0.1);
  CHECK_THROWS_AS((void)synthetic_did(one_treated), DataError);

  PanelDataset one_control = level_panel(3, 1, 6, 3, 0.1);
  CHECK_THROWS_AS((void)synthetic_did(one_control), DataError);
}

TEST_CASE("a control that carries all the weight breaks the jackknife") {
  // Control "c3" tracks the treated pre mean exactly while "c4" sits far
  // away, and flat pre trajectories make the regularizer vanish, so the
  // unit weights put everything on one control.
  PanelDataset ds;
  ds.policy_period = 3;
  ds.periods = {0, 1, 2, 3};
  auto add_unit = [&](const std::string& id, double pre_level,
                      double post_level, bool treated) {
    for (int t = 0; t < 4; ++t) {
      const bool post = t >= 3;
      ds.observations.push_back(obs_of(
          id, t, std::expm1(post ? post_level : pre_level), treated, post));
    }
  };
  add_unit("t0", 1.0, 1.4, true);
  add_unit("t1", 1.0, 1.5, true);
  add_unit("c3", 1.0, 1.1, false);
  add_unit("c4", 9.0, 9.1, false);
  CHECK_THROWS_AS((void)synthetic_did(ds), NumericError);
}
