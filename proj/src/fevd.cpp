#include "spillover/fevd.hpp"

#include <algorithm>
#include <cmath>

#include "spillover/error.hpp"

namespace spillover {

void FevdTable::validate(double tolerance) const {
  const Eigen::Index n = shares.rows();
  if (shares.cols() != n || static_cast<Eigen::Index>(names.size()) != n)
    throw DataError("FEVD table shape does not match its names");
  if (!shares.allFinite()) throw NumericalError("FEVD table has non-finite entries");
  if ((shares.array() < -tolerance).any()) throw DataError("FEVD table has negative shares");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(shares.row(i).sum() - 1.0) > tolerance)
      throw DataError("FEVD row '" + names[static_cast<std::size_t>(i)] + "' does not sum to one");
}

FevdTable fevd_from_shares(std::vector<std::string> names, Eigen::MatrixXd shares, int horizon,
                           double tolerance) {
  FevdTable t;
  t.names = std::move(names);
  t.horizon = horizon;
  t.raw = shares;
  t.shares = std::move(shares);
  t.validate(tolerance);
  return t;
}

namespace {

void require_spd(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success || (sigma.diagonal().array() <= 0.0).any())
    throw NumericalError("covariance matrix is not positive definite");
}

FevdTable standardize(std::vector<std::string> names, int horizon, Eigen::MatrixXd raw) {
  FevdTable t;
  t.names = std::move(names);
  t.horizon = horizon;
  t.shares = raw;
  for (Eigen::Index i = 0; i < raw.rows(); ++i) t.shares.row(i) /= raw.row(i).sum();
  t.raw = std::move(raw);
  return t;
}

}  // namespace

FevdTable gfevd(const std::vector<Eigen::MatrixXd>& coeffs, const Eigen::MatrixXd& sigma,
                std::vector<std::string> names, int horizon) {
  if (horizon < 1) throw ParameterError("FEVD horizon must be at least 1");
  require_spd(sigma);
  const Eigen::Index N = sigma.rows();
  const auto A = ma_coefficients(coeffs, N, horizon);

  Eigen::MatrixXd numerator = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd denominator = Eigen::VectorXd::Zero(N);
  for (const auto& As : A) {
    Eigen::MatrixXd AS = As * sigma;
    numerator += AS.array().square().matrix();
    denominator += (AS * As.transpose()).diagonal();
  }
  Eigen::MatrixXd raw(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) raw(i, j) = numerator(i, j) / sigma(j, j) / denominator(i);
  return standardize(std::move(names), horizon, std::move(raw));
}

FevdTable gfevd(const VarModel& model, int horizon) {
  return gfevd(model.coeffs, model.sigma, model.names, horizon);
}

FevdTable cholesky_fevd(const VarModel& model, int horizon, std::span<const std::string> order) {
  if (horizon < 1) throw ParameterError("FEVD horizon must be at least 1");
  const Eigen::Index N = model.dim();
  if (static_cast<Eigen::Index>(order.size()) != N)
    throw ParameterError("Cholesky order must list every variable exactly once");
  Eigen::VectorXi perm(N);  // perm[k] = model index of the k-th ordered variable
  std::vector<bool> used(static_cast<std::size_t>(N), false);
  for (Eigen::Index k = 0; k < N; ++k) {
    auto it = std::find(model.names.begin(), model.names.end(), order[static_cast<std::size_t>(k)]);
    if (it == model.names.end()) throw ParameterError("unknown variable '" + order[static_cast<std::size_t>(k)] + "' in Cholesky order");
    auto idx = static_cast<std::size_t>(it - model.names.begin());
    if (used[idx]) throw ParameterError("variable listed twice in Cholesky order");
    used[idx] = true;
    perm[k] = static_cast<int>(idx);
  }
  require_spd(model.sigma);

  // Lower-triangular factor in the chosen order, mapped back to model order.
  Eigen::MatrixXd ordered(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) ordered(a, b) = model.sigma(perm[a], perm[b]);
  Eigen::MatrixXd L = ordered.llt().matrixL();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);  // rows: model variables, cols: model shocks
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) P(perm[a], perm[b]) = L(a, b);

  const auto A = ma_coefficients(model, horizon);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(N, N);
  for (const auto& As : A) raw += (As * P).array().square().matrix();
  return standardize(model.names, horizon, std::move(raw));
}

}  // namespace spillover
