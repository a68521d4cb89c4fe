#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "smartlmm/design.hpp"

namespace smartlmm {

// Random-effects design: intercept-only (Z row = 1) or intercept and slope
// (Z row = [1, t]).
enum class RandomEffectsKind { InterceptOnly, InterceptSlope };

struct RandomEffectsSpec {
  RandomEffectsKind kind = RandomEffectsKind::InterceptOnly;
  int q() const { return kind == RandomEffectsKind::InterceptOnly ? 1 : 2; }
};

Eigen::MatrixXd build_Z(const RandomEffectsSpec& spec, std::span<const double> times);

// Layout of the piecewise-linear marginal mean with a knot at the end of
// stage 1. Column order: intercept, t_pre, t_pre*a1, t_post, t_post*a1,
// [t_post*a2], [t_post*a1*a2], covariates. With `a2_requires_a1_plus` the a2
// slope carries the indicator 1{a1=+1} (the autism layout); an undefined a2
// always contributes 0.
struct PiecewiseLayout {
  double knot = 0.0;
  double t_max = 0.0;
  bool stage2_a2 = true;
  bool stage2_a1a2 = false;
  bool a2_requires_a1_plus = false;
  std::vector<std::string> covariate_names;
};

class MeanModel {
 public:
  using RowBuilder = std::function<Eigen::RowVectorXd(
      double t, const DtrIndex& dtr, const Eigen::VectorXd& covariates)>;

  static MeanModel piecewise(PiecewiseLayout layout);
  // Piecewise model of the autism trial: knot at week 12, a2 slope only in
  // the a1=+1 arm, one covariate (mean-centered age).
  static MeanModel autism(double knot = 12.0, double t_max = 36.0,
                          std::vector<std::string> covariates = {"age"});
  // Symmetric four-DTR layout with full a2 and a1*a2 stage-2 interactions.
  static MeanModel symmetric(double knot = 2.0, double t_max = 3.0,
                             std::vector<std::string> covariates = {"L"});
  static MeanModel custom(std::vector<std::string> column_names,
                          int n_covariates, RowBuilder builder);

  Eigen::RowVectorXd row(double t, const DtrIndex& dtr,
                         const Eigen::VectorXd& covariates) const;
  int cols() const { return static_cast<int>(column_names_.size()); }
  int n_covariates() const { return n_covariates_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  // Null for custom-rowbuilder models.
  const PiecewiseLayout* piecewise_layout() const { return layout_.get(); }

 private:
  MeanModel() = default;
  std::vector<std::string> column_names_;
  int n_covariates_ = 0;
  RowBuilder builder_;
  std::shared_ptr<const PiecewiseLayout> layout_;
};

// n_obs x p fixed-effects design matrix over `times`. Throws SchemaError when
// the covariate vector length does not match the model.
Eigen::MatrixXd build_X(const MeanModel& model, std::span<const double> times,
                        const DtrIndex& dtr, const Eigen::VectorXd& covariates);

// Unconstrained parameterization of (G, sigma^2): log-Cholesky factor of G
// (log diagonal first, then the strict lower triangle row by row) plus
// log sigma^2. Any real vector maps to a valid covariance pair; log-diagonals
// are clamped at kLogCholFloor so a degenerate G stays representable.
struct VarianceParams {
  static constexpr double kLogCholFloor = -15.0;

  int q = 1;
  Eigen::VectorXd g_lower;  // length q(q+1)/2
  double log_sigma2 = 0.0;

  Eigen::MatrixXd chol_factor() const;  // lower-triangular L with G = L L^T
  Eigen::MatrixXd G() const;
  double sigma2() const { return std::exp(log_sigma2); }
  bool at_boundary() const;

  Eigen::VectorXd pack() const;
  static VarianceParams unpack(const Eigen::VectorXd& x, int q);
  static VarianceParams from_moments(const Eigen::MatrixXd& G, double sigma2);
  static int n_params(int q) { return q * (q + 1) / 2 + 1; }
};

// V = Z G Z^T + sigma^2 I, symmetric positive definite for any Z.
Eigen::MatrixXd marginal_covariance(const VarianceParams& params,
                                    const Eigen::MatrixXd& Z);

// Mean + random-effects specification used by the estimators.
struct ModelSpec {
  MeanModel mean;
  RandomEffectsSpec random_effects;
};

}  // namespace smartlmm
