#include "spillover/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spillover/error.hpp"

namespace spillover {

CorrelationKind parse_correlation_kind(std::string_view text) {
  if (text == "pearson") return CorrelationKind::pearson;
  if (text == "spearman") return CorrelationKind::spearman;
  if (text == "kendall") return CorrelationKind::kendall;
  if (text == "var-conditional") return CorrelationKind::var_conditional;
  if (text == "var-partial") return CorrelationKind::var_partial;
  throw ParameterError("unknown correlation kind '" + std::string(text) + "'");
}

std::string_view to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::pearson: return "pearson";
    case CorrelationKind::spearman: return "spearman";
    case CorrelationKind::kendall: return "kendall";
    case CorrelationKind::var_conditional: return "var-conditional";
    case CorrelationKind::var_partial: return "var-partial";
  }
  return "pearson";
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double r = (dx * dy).sum() / std::sqrt(dx.square().sum() * dy.square().sum());
  return std::clamp(r, -1.0, 1.0);
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a) < x(b); });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[static_cast<std::size_t>(j + 1)]) == x(order[static_cast<std::size_t>(i)])) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = rank;
    i = j + 1;
  }
  return ranks;
}

bool constant(const Eigen::VectorXd& x) { return (x.array() == x(0)).all(); }

}  // namespace

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

double kendall_tau_b(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sx = x(i) - x(j);
      const double sy = y(i) - y(j);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) ties_x += 1;
      else if (sy == 0) ties_y += 1;
      else if ((sx > 0) == (sy > 0)) concordant += 1;
      else discordant += 1;
    }
  const double denom = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
  return std::clamp((concordant - discordant) / denom, -1.0, 1.0);
}

CorrelationMatrix static_correlation(const PanelSeries& panel, CorrelationKind kind) {
  if (kind == CorrelationKind::var_conditional || kind == CorrelationKind::var_partial)
    throw ParameterError("VAR-based correlations are computed from a fitted model");
  if (panel.rows() < 3) throw DataError("correlation needs at least 3 observations");
  if (panel.has_missing()) throw DataError("correlation input contains missing values");
  const Eigen::Index N = panel.cols();
  for (Eigen::Index j = 0; j < N; ++j)
    if (constant(panel.values.col(j)))
      throw DataError("zero variance in column '" + panel.names[static_cast<std::size_t>(j)] + "'");

  CorrelationMatrix out{panel.names, Eigen::MatrixXd::Identity(N, N), kind};
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const Eigen::VectorXd a = panel.values.col(i), b = panel.values.col(j);
      double r = 0.0;
      switch (kind) {
        case CorrelationKind::pearson: r = pearson(a, b); break;
        case CorrelationKind::spearman: r = spearman(a, b); break;
        default: r = kendall_tau_b(a, b); break;
      }
      out.values(i, j) = out.values(j, i) = r;
    }
  return out;
}

CorrelationMatrix var_conditional_correlation(const VarModel& model) {
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success || (model.sigma.diagonal().array() <= 0).any())
    throw NumericalError("residual covariance is not positive definite");
  const Eigen::VectorXd inv_sd = model.sigma.diagonal().array().rsqrt();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * model.sigma * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return {model.names, r.cwiseMax(-1.0).cwiseMin(1.0), CorrelationKind::var_conditional};
}

CorrelationMatrix var_partial_correlation(const VarModel& model) {
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("residual covariance is singular or not positive definite");
  const Eigen::Index N = model.dim();
  const Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(N, N));
  const Eigen::VectorXd inv_sd = P.diagonal().array().rsqrt();
  Eigen::MatrixXd r = -(inv_sd.asDiagonal() * P * inv_sd.asDiagonal());
  r = (0.5 * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return {model.names, r.cwiseMax(-1.0).cwiseMin(1.0), CorrelationKind::var_partial};
}

}  // namespace spillover
