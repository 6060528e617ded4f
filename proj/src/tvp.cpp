#include "spillover/tvp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "spillover/error.hpp"
#include "spillover/parallel.hpp"
#include "spillover/var.hpp"

namespace spillover {

int TvpConfig::resolved_burn_in(Eigen::Index n_variables) const {
  return burn_in.value_or(std::max(30, static_cast<int>(4 * n_variables)));
}

void TvpConfig::validate(Eigen::Index n_variables, Eigen::Index n_rows) const {
  if (lag < 1) throw ParameterError("TVP lag must be at least 1");
  if (!(kappa1 > 0.9 && kappa1 <= 1.0)) throw ParameterError("kappa1 must lie in (0.9, 1]");
  if (!(kappa2 > 0.9 && kappa2 <= 1.0)) throw ParameterError("kappa2 must lie in (0.9, 1]");
  if (!(prior_scale >= 0.0)) throw ParameterError("prior_scale must be nonnegative");
  const int b = resolved_burn_in(n_variables);
  if (b < 1) throw ParameterError("burn_in must be positive");
  if (b >= n_rows - lag)
    throw DataError("burn_in (" + std::to_string(b) + ") must be smaller than T - p (" +
                    std::to_string(n_rows - lag) + ")");
  const Eigen::Index regressors = 1 + n_variables * lag;
  if (b < regressors + n_variables)
    throw DataError("burn_in (" + std::to_string(b) + ") too short for the initial OLS fit; need at least " +
                    std::to_string(regressors + n_variables));
}

std::vector<Eigen::MatrixXd> TvpTrajectory::lag_matrices(std::size_t k) const {
  const Eigen::Index N = static_cast<Eigen::Index>(names.size());
  std::vector<Eigen::MatrixXd> out;
  for (int j = 0; j < config.lag; ++j) out.emplace_back(coeffs[k].middleCols(1 + N * j, N));
  return out;
}

namespace {

// Symmetrizes S and floors its spectrum at 1e-10 if the Cholesky test fails.
void keep_spd(Eigen::MatrixXd& S, const Date& date) {
  S = (0.5 * (S + S.transpose())).eval();
  if (!S.allFinite()) throw NumericalError("non-finite measurement covariance at " + format_date(date));
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() == Eigen::Success) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-10);
  S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  S = (0.5 * (S + S.transpose())).eval();
  if (!S.allFinite() || Eigen::LLT<Eigen::MatrixXd>(S).info() != Eigen::Success)
    throw NumericalError("measurement covariance lost positive definiteness at " + format_date(date));
}

}  // namespace

TvpTrajectory tvp_filter(const PanelSeries& panel, const TvpConfig& config) {
  if (panel.has_missing()) throw DataError("TVP-VAR input contains missing values");
  const Eigen::Index N = panel.cols();
  const Eigen::Index T = panel.rows();
  config.validate(N, T);
  const int p = config.lag;
  const int burn_in = config.resolved_burn_in(N);
  const Eigen::Index K = 1 + N * p;
  const Eigen::Index D = N * K;

  // Initial state: OLS on the first burn_in regression observations.
  auto init = build_var_design(panel.values.topRows(p + burn_in), p, true);
  Eigen::MatrixXd B = ols_coefficients(init);  // K x N
  Eigen::MatrixXd U = init.Y - init.X * B;
  Eigen::MatrixXd S = U.transpose() * U / static_cast<double>(init.Y.rows());
  const Eigen::MatrixXd xtx_inv = (init.X.transpose() * init.X).ldlt().solve(Eigen::MatrixXd::Identity(K, K));

  Eigen::VectorXd beta = Eigen::Map<Eigen::VectorXd>(B.data(), D);  // equation blocks
  Eigen::MatrixXd P(D, D);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) P.block(a * K, b * K, K, K) = config.prior_scale * S(a, b) * xtx_inv;

  TvpTrajectory out;
  out.names = panel.names;
  out.config = config;
  const auto n_out = static_cast<std::size_t>(T - p - burn_in);
  out.dates.reserve(n_out);
  out.coeffs.reserve(n_out);
  out.covariances.reserve(n_out);

  Eigen::VectorXd z(K);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(N, D);
  for (Eigen::Index t = p + burn_in; t < T; ++t) {
    const Date& date = panel.dates[static_cast<std::size_t>(t)];
    z(0) = 1.0;
    for (int j = 1; j <= p; ++j) z.segment(1 + N * (j - 1), N) = panel.values.row(t - j).transpose();
    for (Eigen::Index a = 0; a < N; ++a) Z.block(a, a * K, 1, K) = z.transpose();
    const Eigen::VectorXd x = panel.values.row(t).transpose();

    P /= config.kappa1;
    const Eigen::MatrixXd PZt = P * Z.transpose();  // D x N
    Eigen::MatrixXd F = Z * PZt + S;
    F = (0.5 * (F + F.transpose())).eval();
    Eigen::LLT<Eigen::MatrixXd> fllt(F);
    if (fllt.info() != Eigen::Success)
      throw NumericalError("innovation covariance not positive definite at " + format_date(date));
    const Eigen::MatrixXd gain = fllt.solve(PZt.transpose()).transpose();  // D x N

    beta += gain * (x - Z * beta);
    P -= gain * PZt.transpose();
    P = (0.5 * (P + P.transpose())).eval();
    if (!beta.allFinite() || !P.allFinite())
      throw NumericalError("filter diverged at " + format_date(date));

    const Eigen::VectorXd u = x - Z * beta;
    S = config.kappa2 * S + (1.0 - config.kappa2) * u * u.transpose();
    keep_spd(S, date);

    out.dates.push_back(date);
    out.coeffs.emplace_back(Eigen::Map<const Eigen::MatrixXd>(beta.data(), K, N).transpose());
    out.covariances.push_back(S);
  }
  return out;
}

FevdSeries trajectory_fevd(const TvpTrajectory& trajectory, int horizon, int threads) {
  if (horizon < 1) throw ParameterError("FEVD horizon must be at least 1");
  FevdSeries out;
  out.dates = trajectory.dates;
  out.tables.resize(trajectory.size());
  parallel_for(trajectory.size(), threads, [&](std::size_t k) {
    out.tables[k] = gfevd(trajectory.lag_matrices(k), trajectory.covariances[k], trajectory.names, horizon);
  });
  return out;
}

FevdSeries rolling_var_fevd(const PanelSeries& panel, int window, int lag, int horizon, int threads) {
  const Eigen::Index N = panel.cols();
  if (lag < 1) throw ParameterError("VAR lag must be at least 1");
  const Eigen::Index minimum = N * lag + lag + 10;
  if (window < minimum)
    throw ParameterError("rolling window of " + std::to_string(window) + " is below N*p + p + 10 = " +
                         std::to_string(minimum));
  // Each window needs more residual degrees of freedom than variables for a
  // nonsingular covariance, which binds once N exceeds 9.
  const Eigen::Index feasible = N * lag + 1 + N + lag;
  if (window < feasible)
    throw ParameterError("rolling window of " + std::to_string(window) + " leaves fewer residual degrees of freedom " +
                         "than variables; need at least " + std::to_string(feasible));
  if (window > panel.rows()) throw DataError("rolling window longer than the sample");
  const auto count = static_cast<std::size_t>(panel.rows() - window + 1);
  FevdSeries out;
  out.tables.resize(count);
  for (std::size_t k = 0; k < count; ++k) out.dates.push_back(panel.dates[k + static_cast<std::size_t>(window) - 1]);
  parallel_for(count, threads, [&](std::size_t k) {
    const auto model = fit_var(panel.values.middleRows(static_cast<Eigen::Index>(k), window), panel.names, lag, true);
    out.tables[k] = gfevd(model, horizon);
  });
  return out;
}

}  // namespace spillover
