// Panel difference-in-differences estimators.
//
// All estimators model log(outcome + 1).  Fixed effects are absorbed by
// alternating within-group demeaning rather than dummy expansion, and the
// coefficient solve always goes through a rank-revealing QR of the
// demeaned design; columns absorbed by the fixed effects or collinear
// with earlier columns are dropped and reported, never pseudo-inverted
// away.  Standard errors are cluster-robust (CR1) throughout.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "excerptlab/panel.hpp"

namespace excerptlab {

// Regressors of interest, one named column each.  Fixed effect groups are
// supplied separately as integer labels per observation.
struct DesignMatrix {
  Eigen::MatrixXd cols;
  std::vector<std::string> names;
};

enum class FixedEffect { Unit, Period, Age };

struct EstimatorOptions {
  std::vector<FixedEffect> fixed_effects{FixedEffect::Unit,
                                         FixedEffect::Period};
  double demean_tol{1e-10};
  int demean_max_iter{10000};
  bool allow_unbalanced{false};
};

struct EstimateResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::MatrixXd vcov;
  long nobs{0};
  int cluster_count{0};
  std::string reference;             // omitted-category label, empty if none
  std::vector<std::string> dropped;  // collinear columns removed from the fit
  std::vector<long> n_treated_in_bin;  // per-coefficient treated-obs counts
                                       // for binned designs, else empty

  double se(Eigen::Index i) const;
  Eigen::Index index_of(std::string_view name) const;  // DataError if absent
  double coef_of(std::string_view name) const;
  double se_of(std::string_view name) const;
};

// Alternating within-group demeaning of every column of `x` until the
// largest absolute change in a sweep falls below `tol`.  Each fe_groups
// entry assigns one group label per row.  Throws NumericError (with the
// residual change) if `max_iter` sweeps do not converge.
Eigen::MatrixXd within_transform(
    Eigen::MatrixXd x, const std::vector<std::vector<int>>& fe_groups,
    double tol = 1e-10, int max_iter = 10000);

// CR1 cluster-robust sandwich:
//   (X'X)^-1 (sum_g X_g' u_g u_g' X_g) (X'X)^-1 * G/(G-1) * (N-1)/(N-K).
// With one observation per cluster this reproduces HC1 exactly.  Requires
// at least two clusters.
Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& residuals,
                                    const std::vector<int>& clusters);

// OLS of log(outcome + 1) on the given regressors after absorbing the
// requested fixed effects; clustering on cluster_id.
EstimateResult twfe_ols(const PanelDataset& ds, const DesignMatrix& regressors,
                        const EstimatorOptions& opts = {});

// Canonical policy regressor D = treated x post, coefficient named "D".
EstimateResult twfe_did(const PanelDataset& ds,
                        const EstimatorOptions& opts = {});
DesignMatrix did_design(const PanelDataset& ds);

struct EventStudyOptions {
  int k_min{-9};
  int k_max{8};
  int reference_k{-1};
  EstimatorOptions base{};
};

// Dynamic effects: one treated-group dummy per event time (period minus
// policy period), the reference event time omitted and recorded.
// Coefficients are named "k=<event time>".
EstimateResult event_study(const PanelDataset& ds,
                           const EventStudyOptions& opts = {});

// Dose-response: one dummy per observed dose decile, the reference decile
// omitted.  Coefficients are named "decile=<d>"; n_treated_in_bin counts
// treated post-policy observations per estimated decile.
EstimateResult dose_response(const PanelDataset& ds, int reference_decile = 1,
                             const EstimatorOptions& opts = {});

// Effect heterogeneity by a binary moderator: D, D x M ("DxPopular") and
// post x M ("PostxPopular").  A moderator that varies in the panel but not
// among treated units cannot identify the interaction and raises
// DataError; a constant moderator degrades to the plain policy regression
// via collinear-column dropping.
EstimateResult interaction_did(const PanelDataset& ds, PopularityFlag flag,
                               const EstimatorOptions& opts = {});

// Instantaneous switcher contrast, robust to treatment-effect
// heterogeneity: mean change of treated units from the last pre period to
// the policy period, minus the same mean change among controls.  The
// standard error clusters by unit (each unit contributes one change).
EstimateResult did_m(const PanelDataset& ds);

struct SdidWeights {
  Eigen::VectorXd omega;   // one weight per control unit
  Eigen::VectorXd lambda;  // one weight per pre period
  double zeta{0.0};
  std::vector<std::string> control_units;
  std::vector<int> pre_periods;
};

struct SdidOptions {
  double zeta_scale{1.0};  // multiplies the default regularization
  double fw_tol{1e-8};
  int fw_max_iter{100000};
  EstimatorOptions base{};
};

struct SdidResult {
  EstimateResult estimate;  // single coefficient "att"
  SdidWeights weights;
};

// Synthetic difference-in-differences: control-unit weights reproduce the
// treated pre trajectory (ridge toward uniform), pre-period weights
// reproduce control post means, and the estimate is the weighted two-way
// difference.  Standard error by leave-one-unit-out jackknife with the
// weights held fixed.
SdidResult synthetic_did(const PanelDataset& ds, const SdidOptions& opts = {});

}  // namespace excerptlab
