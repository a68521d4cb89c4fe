#include "smartlmm/model.hpp"

#include <cmath>

#include "smartlmm/errors.hpp"

namespace smartlmm {

Eigen::MatrixXd build_Z(const RandomEffectsSpec& spec, std::span<const double> times) {
  const int n = static_cast<int>(times.size());
  Eigen::MatrixXd Z(n, spec.q());
  for (int i = 0; i < n; ++i) {
    Z(i, 0) = 1.0;
    if (spec.kind == RandomEffectsKind::InterceptSlope) Z(i, 1) = times[i];
  }
  return Z;
}

MeanModel MeanModel::piecewise(PiecewiseLayout layout) {
  MeanModel m;
  m.layout_ = std::make_shared<const PiecewiseLayout>(layout);
  m.n_covariates_ = static_cast<int>(layout.covariate_names.size());
  m.column_names_ = {"(Intercept)", "t_pre", "t_pre:a1", "t_post", "t_post:a1"};
  if (layout.stage2_a2)
    m.column_names_.push_back(layout.a2_requires_a1_plus ? "t_post:1{a1=+1}:a2"
                                                         : "t_post:a2");
  if (layout.stage2_a1a2) m.column_names_.push_back("t_post:a1:a2");
  for (const auto& c : layout.covariate_names) m.column_names_.push_back(c);

  const PiecewiseLayout* lay = m.layout_.get();
  m.builder_ = [lay](double t, const DtrIndex& dtr,
                     const Eigen::VectorXd& covs) -> Eigen::RowVectorXd {
    const double pre = std::min(t, lay->knot);
    const double post = std::max(t - lay->knot, 0.0);
    const double a1 = static_cast<double>(dtr.a1);
    const double a2 = dtr.a2 ? static_cast<double>(*dtr.a2) : 0.0;
    int p = 5 + (lay->stage2_a2 ? 1 : 0) + (lay->stage2_a1a2 ? 1 : 0) +
            static_cast<int>(covs.size());
    Eigen::RowVectorXd row(p);
    int k = 0;
    row(k++) = 1.0;
    row(k++) = pre;
    row(k++) = pre * a1;
    row(k++) = post;
    row(k++) = post * a1;
    if (lay->stage2_a2) {
      const double gate = lay->a2_requires_a1_plus ? (dtr.a1 == 1 ? 1.0 : 0.0) : 1.0;
      row(k++) = post * gate * a2;
    }
    if (lay->stage2_a1a2) row(k++) = post * a1 * a2;
    for (Eigen::Index j = 0; j < covs.size(); ++j) row(k++) = covs(j);
    return row;
  };
  return m;
}

MeanModel MeanModel::autism(double knot, double t_max,
                            std::vector<std::string> covariates) {
  PiecewiseLayout lay;
  lay.knot = knot;
  lay.t_max = t_max;
  lay.stage2_a2 = true;
  lay.stage2_a1a2 = false;
  lay.a2_requires_a1_plus = true;
  lay.covariate_names = std::move(covariates);
  return piecewise(lay);
}

MeanModel MeanModel::symmetric(double knot, double t_max,
                               std::vector<std::string> covariates) {
  PiecewiseLayout lay;
  lay.knot = knot;
  lay.t_max = t_max;
  lay.stage2_a2 = true;
  lay.stage2_a1a2 = true;
  lay.a2_requires_a1_plus = false;
  lay.covariate_names = std::move(covariates);
  return piecewise(lay);
}

MeanModel MeanModel::custom(std::vector<std::string> column_names,
                            int n_covariates, RowBuilder builder) {
  MeanModel m;
  m.column_names_ = std::move(column_names);
  m.n_covariates_ = n_covariates;
  m.builder_ = std::move(builder);
  return m;
}

Eigen::RowVectorXd MeanModel::row(double t, const DtrIndex& dtr,
                                  const Eigen::VectorXd& covariates) const {
  if (covariates.size() != n_covariates_)
    throw SchemaError("mean model expects " + std::to_string(n_covariates_) +
                      " covariates, got " + std::to_string(covariates.size()));
  Eigen::RowVectorXd r = builder_(t, dtr, covariates);
  if (r.size() != cols())
    throw SchemaError("row builder returned " + std::to_string(r.size()) +
                      " columns, expected " + std::to_string(cols()));
  return r;
}

Eigen::MatrixXd build_X(const MeanModel& model, std::span<const double> times,
                        const DtrIndex& dtr, const Eigen::VectorXd& covariates) {
  Eigen::MatrixXd X(static_cast<int>(times.size()), model.cols());
  for (std::size_t i = 0; i < times.size(); ++i)
    X.row(static_cast<int>(i)) = model.row(times[i], dtr, covariates);
  return X;
}

Eigen::MatrixXd VarianceParams::chol_factor() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q, q);
  int k = 0;
  for (int i = 0; i < q; ++i) L(i, i) = std::exp(std::max(g_lower(k++), kLogCholFloor));
  for (int i = 1; i < q; ++i)
    for (int j = 0; j < i; ++j) L(i, j) = g_lower(k++);
  return L;
}

Eigen::MatrixXd VarianceParams::G() const {
  const Eigen::MatrixXd L = chol_factor();
  return L * L.transpose();
}

bool VarianceParams::at_boundary() const {
  for (int i = 0; i < q; ++i)
    if (g_lower(i) <= kLogCholFloor + 1e-9) return true;
  return false;
}

Eigen::VectorXd VarianceParams::pack() const {
  Eigen::VectorXd x(n_params(q));
  x.head(g_lower.size()) = g_lower;
  x(x.size() - 1) = log_sigma2;
  return x;
}

VarianceParams VarianceParams::unpack(const Eigen::VectorXd& x, int q) {
  VarianceParams p;
  p.q = q;
  p.g_lower = x.head(q * (q + 1) / 2);
  for (int i = 0; i < q; ++i) p.g_lower(i) = std::max(p.g_lower(i), kLogCholFloor);
  p.log_sigma2 = x(x.size() - 1);
  return p;
}

VarianceParams VarianceParams::from_moments(const Eigen::MatrixXd& G, double sigma2) {
  const int q = static_cast<int>(G.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  Eigen::MatrixXd L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // PSD but singular: fall back to an eigendecomposition square root
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd sqrtG = es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sqrtG.transpose());
    L = qr.matrixQR().triangularView<Eigen::Upper>();
    L = Eigen::MatrixXd(L.transpose());
    for (int i = 0; i < q; ++i)
      if (L(i, i) < 0) L.col(i) = -L.col(i);
  }
  VarianceParams p;
  p.q = q;
  p.g_lower.resize(q * (q + 1) / 2);
  int k = 0;
  for (int i = 0; i < q; ++i)
    p.g_lower(k++) = std::log(std::max(L(i, i), std::exp(kLogCholFloor)));
  for (int i = 1; i < q; ++i)
    for (int j = 0; j < i; ++j) p.g_lower(k++) = L(i, j);
  p.log_sigma2 = std::log(sigma2);
  return p;
}

Eigen::MatrixXd marginal_covariance(const VarianceParams& params,
                                    const Eigen::MatrixXd& Z) {
  const int n = static_cast<int>(Z.rows());
  Eigen::MatrixXd V = Z * params.G() * Z.transpose();
  V.diagonal().array() += params.sigma2();
  return V;
}

}  // namespace smartlmm
