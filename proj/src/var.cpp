#include "spillover/var.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "spillover/error.hpp"

namespace spillover {

VarDesign build_var_design(const Eigen::MatrixXd& data, int p, bool intercept, Eigen::Index first) {
  if (p < 1) throw ParameterError("VAR lag must be at least 1");
  if (first < p) throw ParameterError("design must start at or after row p");
  const Eigen::Index T = data.rows();
  const Eigen::Index N = data.cols();
  const Eigen::Index n = T - first;
  if (n <= 0) throw DataError("no observations left after lagging");
  const Eigen::Index offset = intercept ? 1 : 0;

  VarDesign d;
  d.Y = data.bottomRows(n);
  d.X.resize(n, offset + N * p);
  if (intercept) d.X.col(0).setOnes();
  for (int j = 1; j <= p; ++j)
    d.X.middleCols(offset + N * (j - 1), N) = data.middleRows(first - j, n);
  return d;
}

VarDesign build_var_design(const Eigen::MatrixXd& data, int p, bool intercept) {
  return build_var_design(data, p, intercept, p);
}

Eigen::MatrixXd ols_coefficients(const VarDesign& design) {
  if (design.X.rows() <= design.X.cols())
    throw DataError("insufficient observations: " + std::to_string(design.X.rows()) + " rows for " +
                    std::to_string(design.X.cols()) + " regressors");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < design.X.cols()) throw NumericalError("rank-deficient regressor matrix");
  return qr.solve(design.Y);
}

namespace {

VarModel unpack(const Eigen::MatrixXd& B, const VarDesign& design, std::vector<std::string> names, int p,
                bool intercept) {
  const Eigen::Index N = design.Y.cols();
  const Eigen::Index offset = intercept ? 1 : 0;
  VarModel m;
  m.names = std::move(names);
  m.lag = p;
  m.has_intercept = intercept;
  m.intercept = intercept ? Eigen::VectorXd(B.row(0).transpose()) : Eigen::VectorXd::Zero(N);
  for (int j = 0; j < p; ++j) m.coeffs.emplace_back(B.middleRows(offset + N * j, N).transpose());
  m.residuals = design.Y - design.X * B;
  m.sigma = m.residuals.transpose() * m.residuals / static_cast<double>(design.Y.rows());
  return m;
}

double log_det_spd(const Eigen::MatrixXd& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("residual covariance is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

VarModel fit_var(const Eigen::MatrixXd& data, std::vector<std::string> names, int p, bool intercept) {
  if (p < 1) throw ParameterError("VAR lag must be at least 1");
  const Eigen::Index T = data.rows();
  const Eigen::Index N = data.cols();
  if (static_cast<Eigen::Index>(names.size()) != N) throw DataError("name count does not match columns");
  if (data.array().isNaN().any()) throw DataError("VAR input contains missing values");
  if (T - p <= N * p + 1)
    throw DataError("insufficient observations for VAR(" + std::to_string(p) + "): T - p = " +
                    std::to_string(T - p) + " must exceed N*p + 1 = " + std::to_string(N * p + 1));
  auto design = build_var_design(data, p, intercept);
  return unpack(ols_coefficients(design), design, std::move(names), p, intercept);
}

VarModel fit_var(const PanelSeries& panel, int p, bool intercept) {
  return fit_var(panel.values, panel.names, p, intercept);
}

int select_lag(const PanelSeries& panel, int p_max, LagCriterion criterion, bool intercept) {
  if (p_max < 1) throw ParameterError("maximum lag must be at least 1");
  const Eigen::Index N = panel.cols();
  const Eigen::Index T = panel.rows();
  if (T - p_max <= N * p_max + 1)
    throw DataError("insufficient observations for lag search up to " + std::to_string(p_max));

  int best = 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    auto design = build_var_design(panel.values, p, intercept, p_max);
    auto B = ols_coefficients(design);
    Eigen::MatrixXd U = design.Y - design.X * B;
    const double n = static_cast<double>(design.Y.rows());
    Eigen::MatrixXd sigma = U.transpose() * U / n;
    const double k = static_cast<double>(N * (N * p + (intercept ? 1 : 0)));
    const double penalty = criterion == LagCriterion::bic ? std::log(n) : 2.0;
    const double value = log_det_spd(sigma) + penalty * k / n;
    if (value < best_value) {
      best_value = value;
      best = p;
    }
  }
  return best;
}

std::vector<Eigen::MatrixXd> ma_coefficients(const std::vector<Eigen::MatrixXd>& coeffs, Eigen::Index dim,
                                             int n_terms) {
  if (n_terms < 1) throw ParameterError("need at least one moving-average term");
  std::vector<Eigen::MatrixXd> A;
  A.reserve(static_cast<std::size_t>(n_terms));
  A.push_back(Eigen::MatrixXd::Identity(dim, dim));
  const int p = static_cast<int>(coeffs.size());
  for (int s = 1; s < n_terms; ++s) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 1; j <= std::min(s, p); ++j) next.noalias() += coeffs[static_cast<std::size_t>(j - 1)] * A[static_cast<std::size_t>(s - j)];
    A.push_back(std::move(next));
  }
  return A;
}

std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int n_terms) {
  return ma_coefficients(model.coeffs, model.dim(), n_terms);
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& coeffs) {
  if (coeffs.empty()) throw ParameterError("companion matrix of an empty coefficient list");
  const Eigen::Index N = coeffs.front().rows();
  const Eigen::Index p = static_cast<Eigen::Index>(coeffs.size());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(N * p, N * p);
  for (Eigen::Index j = 0; j < p; ++j) F.block(0, N * j, N, N) = coeffs[static_cast<std::size_t>(j)];
  if (p > 1) F.bottomLeftCorner(N * (p - 1), N * (p - 1)).setIdentity();
  return F;
}

double spectral_radius(const VarModel& model) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(model.coeffs), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd simulate_var(const Eigen::VectorXd& intercept, const std::vector<Eigen::MatrixXd>& coeffs,
                             const Eigen::MatrixXd& initial, const Eigen::MatrixXd& shocks) {
  const Eigen::Index p = static_cast<Eigen::Index>(coeffs.size());
  const Eigen::Index T = shocks.rows();
  if (initial.rows() != p || T < p) throw ParameterError("simulate_var needs p initial rows");
  Eigen::MatrixXd x(T, shocks.cols());
  x.topRows(p) = initial;
  for (Eigen::Index t = p; t < T; ++t) {
    Eigen::VectorXd v = intercept + shocks.row(t).transpose();
    for (Eigen::Index j = 1; j <= p; ++j) v.noalias() += coeffs[static_cast<std::size_t>(j - 1)] * x.row(t - j).transpose();
    x.row(t) = v.transpose();
  }
  return x;
}

}  // namespace spillover
