// Stylized demand model and panel simulators.
//
// The demand side: a consumer hears an excerpt covering a share theta of a
// track whose true match is the average of a public signal p and an
// idiosyncratic component m ~ Uniform(0,1), weighted (1-theta) and theta.
// She buys when perceived match clears a threshold tau, so demand is the
// probability mass of m above the implied cutoff.  Longer excerpts raise
// theta and spread perceived match, which helps low-p tracks and hurts
// high-p ones.
//
// The simulators generate panels with known ground truth for validating
// the estimators: a two-unit exponential taste-depreciation panel, and a
// configurable many-unit panel with planted effects.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "excerptlab/panel.hpp"

namespace excerptlab {

struct DemandParams {
  double p{0.5};      // public signal, in (0,1)
  double theta{0.5};  // excerpt share, in (0,1]
  double tau{0.5};    // purchase threshold, in (0,1)
};

// Purchase probability.  Interior regime tau in (p, theta + (1-theta)p):
//   1 - (tau - (1-theta)p) / theta,
// clamped to 1 below the interior window and 0 above it.
// Throws ConfigError for parameters outside the domain.
double demand(const DemandParams& params);

struct DemandComparativeStatics {
  double d_demand_d_theta;        // (tau - p) / theta^2
  double d2_demand_d_theta_d_p;   // -1 / theta^2
};

// Closed-form derivatives, defined on the interior regime only; throws
// ConfigError at or beyond the kinks where demand is clamped.
DemandComparativeStatics demand_comparative_statics(const DemandParams& params);

struct DepreciationSpec {
  double treated_peak{20.0};
  double control_peak{10.0};
  double decay_rate{0.5};  // sales = peak * exp(-decay_rate * t)
  int horizon{18};
  int policy_period{9};    // pseudo policy, no effect is planted
};

// Two-unit panel (one treated, one control) with exponentially decaying
// sales.  Levels keep a constant ratio, but log(sales + 1) gaps shrink
// toward zero as both series die out, which is exactly the parallel-trends
// trap the estimators must be checked against.
PanelDataset simulate_depreciation(const DepreciationSpec& spec = {});

struct SimPanelSpec {
  int n_treated{1000};
  int n_control{1000};
  int periods{18};
  int policy_period{9};
  double alpha{5.0};          // grand intercept of the log outcome
  double unit_fe_sd{0.5};
  double period_fe_sd{0.2};
  double noise_sd{0.1};
  double ar1_rho{0.0};        // within-unit AR(1) noise correlation
  // Planted effect on the log scale.  Size 1: homogeneous.  Size 10:
  // per-decile effects; treated units cycle through `dose_pool` deciles
  // and beta_true[d-1] is the effect of landing in decile d.
  std::vector<double> beta_true{0.054};
  std::vector<int> dose_pool{};            // defaults to 1..10 when empty
  std::optional<double> beta_popular;      // effect override for popular units
  double popular_share{0.0};               // leading share of each arm flagged popular
  // Level-decay mode (taste depreciation): when decay_rate > 0 the outcome
  // is exp(alpha + unit fe + shift - decay_rate*t + ...) instead of the
  // exactly log-linear design, and treated units sit `treated_level_shift`
  // higher in logs.
  double decay_rate{0.0};
  double treated_level_shift{0.0};
  std::uint64_t seed{1};
};

struct SimTruth {
  std::vector<double> beta;        // planted effect(s), as given
  std::vector<double> unit_fe;     // drawn unit effects, treated first
  std::vector<double> period_fe;   // drawn period effects
};

struct SimulatedPanel {
  PanelDataset panel;
  SimTruth truth;
};

// Bit-reproducible for a fixed spec; every draw is derived from the single
// top-level seed.  Throws ConfigError on inconsistent spec values.
SimulatedPanel simulate_panel(const SimPanelSpec& spec);

}  // namespace excerptlab
