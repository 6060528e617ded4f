#include "spillover/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spillover/error.hpp"
#include "spillover/parallel.hpp"
#include "spillover/stats.hpp"
#include "spillover/var.hpp"

namespace spillover {

std::string significance_stars(double p_value) {
  if (p_value <= 0.005) return "***";
  if (p_value <= 0.01) return "**";
  if (p_value <= 0.05) return "*";
  return "";
}

namespace {

struct CentralMoments {
  double mean, m2, m3, m4;
};

CentralMoments central_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = stats::mean(x);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  return {mean, m2 / n, m3 / n, m4 / n};
}

// Variance indistinguishable from rounding noise relative to the data scale.
bool zero_variance(std::span<const double> x, double m2) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  return !(m2 > 1e-24 * std::max(scale * scale, 1e-300));
}

void require_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw DataError("series contains missing or non-finite values");
}

TestResult decide(TestResult r) {
  r.reject = r.p_value <= r.level;
  return r;
}

}  // namespace

DescriptiveStats describe(std::span<const double> x, std::string name) {
  if (x.size() < 4) throw DataError("describe needs at least 4 observations");
  require_finite(x);
  const auto m = central_moments(x);
  if (zero_variance(x, m.m2))
    throw DataError("zero variance" + (name.empty() ? std::string() : " in column '" + name + "'"));
  DescriptiveStats d;
  d.name = std::move(name);
  d.mean = m.mean;
  d.median = stats::quantile(x, 0.5);
  d.q1 = stats::quantile(x, 0.25);
  d.q3 = stats::quantile(x, 0.75);
  d.sd = std::sqrt(m.m2 * static_cast<double>(x.size()) / static_cast<double>(x.size() - 1));
  d.skewness = m.m3 / std::pow(m.m2, 1.5);
  d.excess_kurtosis = m.m4 / (m.m2 * m.m2) - 3.0;
  return d;
}

std::vector<DescriptiveStats> describe(const PanelSeries& panel) {
  std::vector<DescriptiveStats> out;
  for (Eigen::Index j = 0; j < panel.cols(); ++j) {
    Eigen::VectorXd col = panel.values.col(j);
    out.push_back(describe(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                           panel.names[static_cast<std::size_t>(j)]));
  }
  return out;
}

TestResult jarque_bera(std::span<const double> x, double level) {
  if (x.size() < 8) throw DataError("Jarque-Bera needs at least 8 observations");
  require_finite(x);
  const auto m = central_moments(x);
  if (zero_variance(x, m.m2)) throw DataError("zero variance");
  const double s = m.m3 / std::pow(m.m2, 1.5);
  const double k = m.m4 / (m.m2 * m.m2) - 3.0;
  TestResult r;
  r.test = "jarque-bera";
  r.statistic = static_cast<double>(x.size()) / 6.0 * (s * s + k * k / 4.0);
  r.p_value = stats::chi_square_sf(r.statistic, 2.0);
  r.level = level;
  return decide(r);
}

TestResult ljung_box_squared(std::span<const double> x, int lags, double level) {
  if (lags < 1 || static_cast<std::size_t>(lags) >= x.size())
    throw ParameterError("Ljung-Box needs 1 <= lags < T");
  require_finite(x);
  const double mean = stats::mean(x);
  std::vector<double> z(x.size());
  std::transform(x.begin(), x.end(), z.begin(), [mean](double v) { return (v - mean) * (v - mean); });
  const double zbar = stats::mean(z);
  double denom = 0.0;
  for (double v : z) denom += (v - zbar) * (v - zbar);
  if (zero_variance(z, denom / static_cast<double>(z.size())))
    throw DataError("squared series is constant; Ljung-Box is undefined");

  const auto T = static_cast<double>(z.size());
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < z.size(); ++t)
      num += (z[t] - zbar) * (z[t - static_cast<std::size_t>(k)] - zbar);
    const double r = num / denom;
    q += r * r / (T - k);
  }
  TestResult res;
  res.test = "ljung-box-squared";
  res.statistic = T * (T + 2.0) * q;
  res.p_value = stats::chi_square_sf(res.statistic, lags);
  res.lags = lags;
  res.level = level;
  return decide(res);
}

int default_adf_max_lags(std::size_t T) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

namespace {

struct OlsFit {
  Eigen::VectorXd beta;
  double ssr;
  double se_first;  // standard error of beta[0]
  Eigen::Index n, k;
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (n <= k) throw DataError("insufficient observations after lagging");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  if ((R.diagonal().array().abs() <= 1e-12 * R.diagonal().array().abs().maxCoeff()).any())
    throw NumericalError("rank-deficient test regression");
  OlsFit f;
  f.beta = qr.solve(y);
  f.ssr = (y - X * f.beta).squaredNorm();
  f.n = n;
  f.k = k;
  // [(X'X)^{-1}]_{00} = || R^{-T} e_0 ||^2
  Eigen::VectorXd e0 = Eigen::VectorXd::Unit(k, 0);
  Eigen::VectorXd z = R.transpose().triangularView<Eigen::Lower>().solve(e0);
  const double s2 = f.ssr / static_cast<double>(n - k);
  f.se_first = std::sqrt(s2 * z.squaredNorm());
  return f;
}

// Regression of dy_t on y_{t-1}, deterministics and k lagged differences for
// t = first .. T-1 (indices into the level series).
OlsFit adf_regression(std::span<const double> y, int k, std::size_t first, Deterministic det) {
  const std::size_t T = y.size();
  const auto n = static_cast<Eigen::Index>(T - first);
  const Eigen::Index n_det = det == Deterministic::none ? 0 : det == Deterministic::constant ? 1 : 2;
  Eigen::MatrixXd X(n, 1 + n_det + k);
  Eigen::VectorXd dep(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t t = first + static_cast<std::size_t>(r);
    dep(r) = y[t] - y[t - 1];
    X(r, 0) = y[t - 1];
    if (n_det >= 1) X(r, 1) = 1.0;
    if (n_det == 2) X(r, 2) = static_cast<double>(t);
    for (int i = 1; i <= k; ++i) X(r, n_det + i) = y[t - static_cast<std::size_t>(i)] - y[t - static_cast<std::size_t>(i) - 1];
  }
  return ols(X, dep);
}

struct AdfCore {
  double statistic;
  int lags;
};

AdfCore adf_core(std::span<const double> y, int max_lags, Deterministic det) {
  if (max_lags < 0) throw ParameterError("max_lags must be nonnegative");
  if (y.size() < static_cast<std::size_t>(max_lags) + 10)
    throw DataError("ADF needs at least max_lags + 10 observations");
  int best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  const auto common = static_cast<std::size_t>(max_lags) + 1;
  for (int k = 0; k <= max_lags; ++k) {
    const auto fit = adf_regression(y, k, common, det);
    const double n = static_cast<double>(fit.n);
    const double aic = n * std::log(fit.ssr / n) + 2.0 * static_cast<double>(fit.k);
    if (aic < best_aic) {
      best_aic = aic;
      best = k;
    }
  }
  const auto fit = adf_regression(y, best, static_cast<std::size_t>(best) + 1, det);
  if (!(fit.se_first > 0.0)) throw DataError("degenerate ADF regression (zero residual variance)");
  return {fit.beta(0) / fit.se_first, best};
}

}  // namespace

TestResult adf_test(std::span<const double> x, std::optional<int> max_lags, Deterministic deterministic,
                    double level) {
  require_finite(x);
  const auto m = central_moments(x);
  if (zero_variance(x, m.m2)) throw DataError("zero variance");
  const int maxl = max_lags.value_or(default_adf_max_lags(x.size()));
  const auto core = adf_core(x, maxl, deterministic);
  const auto p = mackinnon_p(core.statistic, deterministic, 1);
  TestResult r;
  r.test = "adf";
  r.statistic = core.statistic;
  r.p_value = p.p_value;
  r.p_value_bound = p.clipped;
  r.lags = core.lags;
  r.level = level;
  return decide(r);
}

TestResult engle_granger(std::span<const double> x, std::span<const double> y, Deterministic deterministic,
                         std::optional<int> max_lags, double level) {
  if (x.size() != y.size()) throw DataError("Engle-Granger series must have equal length");
  if (x.size() < 30) throw DataError("Engle-Granger needs at least 30 observations");
  require_finite(x);
  require_finite(y);
  const auto T = static_cast<Eigen::Index>(x.size());
  const Eigen::Index n_det = deterministic == Deterministic::none ? 0 : deterministic == Deterministic::constant ? 1 : 2;
  Eigen::MatrixXd X(T, n_det + 1);
  Eigen::VectorXd dep(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (n_det >= 1) X(t, 0) = 1.0;
    if (n_det == 2) X(t, 1) = static_cast<double>(t + 1);
    X(t, n_det) = y[static_cast<std::size_t>(t)];
    dep(t) = x[static_cast<std::size_t>(t)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw NumericalError("rank-deficient cointegrating regression");
  Eigen::VectorXd resid = dep - X * qr.solve(dep);
  const double tss = (dep.array() - dep.mean()).square().sum();
  if (!(resid.squaredNorm() > 1e-20 * std::max(tss, dep.squaredNorm())))
    throw DataError("zero residual variance in cointegrating regression");

  std::span<const double> u(resid.data(), static_cast<std::size_t>(resid.size()));
  const int maxl = max_lags.value_or(default_adf_max_lags(u.size()));
  const auto core = adf_core(u, maxl, Deterministic::none);
  const auto p = mackinnon_p(core.statistic, deterministic, 2);
  TestResult r;
  r.test = "engle-granger";
  r.statistic = core.statistic;
  r.p_value = p.p_value;
  r.p_value_bound = p.clipped;
  r.lags = core.lags;
  r.level = level;
  return decide(r);
}

namespace {

double log_det(const Eigen::MatrixXd& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("sub-sample residual covariance is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd residual_cov(const VarDesign& d, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd U = d.Y - d.X * B;
  return U.transpose() * U / static_cast<double>(d.Y.rows());
}

}  // namespace

double chow_statistic(const Eigen::MatrixXd& data, int lag, Eigen::Index break_index, ChowVariant variant) {
  const Eigen::Index T = data.rows();
  const Eigen::Index N = data.cols();
  if (break_index <= 0 || break_index >= T) throw ParameterError("break outside sample");
  const Eigen::Index minimum = N * lag + 1 + N;
  const Eigen::Index n1 = break_index - lag;
  const Eigen::Index n2 = T - break_index - lag;
  if (n1 <= minimum || n2 <= minimum)
    throw DataError("sub-sample too short for a VAR(" + std::to_string(lag) + ") on each side of the break");

  auto d1 = build_var_design(data.topRows(break_index), lag, true);
  auto d2 = build_var_design(data.bottomRows(T - break_index), lag, true);
  VarDesign pooled;
  pooled.Y.resize(n1 + n2, N);
  pooled.Y << d1.Y, d2.Y;
  pooled.X.resize(n1 + n2, d1.X.cols());
  pooled.X << d1.X, d2.X;

  const Eigen::MatrixXd s1 = residual_cov(d1, ols_coefficients(d1));
  const Eigen::MatrixXd s2 = residual_cov(d2, ols_coefficients(d2));
  const Eigen::MatrixXd s12 = residual_cov(pooled, ols_coefficients(pooled));
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);

  if (variant == ChowVariant::break_point) return (a + b) * log_det(s12) - a * log_det(s1) - b * log_det(s2);
  return (a + b) * (log_det(s12) - log_det((a * s1 + b * s2) / (a + b)));
}

TestResult chow_test(const PanelSeries& panel, const ChowOptions& options) {
  if (options.bootstrap_reps < 99) throw ParameterError("Chow bootstrap needs at least 99 replications");
  if (panel.has_missing()) throw DataError("Chow test input contains missing values");
  const Eigen::MatrixXd& data = panel.values;
  const double observed = chow_statistic(data, options.lag, options.break_index, options.variant);

  const VarModel null_model = fit_var(panel, options.lag, true);
  Eigen::MatrixXd resid = null_model.residuals;
  resid.rowwise() -= resid.colwise().mean();
  const Eigen::Index T = data.rows();
  const Eigen::Index p = options.lag;
  const Eigen::MatrixXd initial = data.topRows(p);

  std::vector<double> boot(static_cast<std::size_t>(options.bootstrap_reps));
  parallel_for(boot.size(), options.threads, [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<Eigen::Index> pick(0, resid.rows() - 1);
    Eigen::MatrixXd shocks = Eigen::MatrixXd::Zero(T, data.cols());
    for (Eigen::Index t = p; t < T; ++t) shocks.row(t) = resid.row(pick(rng));
    const Eigen::MatrixXd sim = simulate_var(null_model.intercept, null_model.coeffs, initial, shocks);
    boot[r] = chow_statistic(sim, options.lag, options.break_index, options.variant);
  });

  const auto exceed = std::count_if(boot.begin(), boot.end(), [&](double s) { return s >= observed; });
  TestResult r;
  r.test = options.variant == ChowVariant::break_point ? "chow-break-point" : "chow-sample-split";
  r.statistic = observed;
  r.p_value = static_cast<double>(exceed + 1) / static_cast<double>(options.bootstrap_reps + 1);
  r.lags = options.lag;
  r.level = options.level;
  r.critical_value = stats::quantile(boot, 1.0 - options.level);
  return decide(r);
}

Deterministic parse_deterministic(std::string_view text) {
  if (text == "n" || text == "none") return Deterministic::none;
  if (text == "c" || text == "constant") return Deterministic::constant;
  if (text == "ct" || text == "constant+trend" || text == "trend") return Deterministic::constant_trend;
  throw ParameterError("unknown deterministic term '" + std::string(text) + "'");
}

std::string_view to_string(Deterministic d) {
  switch (d) {
    case Deterministic::none: return "none";
    case Deterministic::constant: return "constant";
    case Deterministic::constant_trend: return "constant+trend";
  }
  return "constant";
}

ChowVariant parse_chow_variant(std::string_view text) {
  if (text == "break-point") return ChowVariant::break_point;
  if (text == "sample-split") return ChowVariant::sample_split;
  throw ParameterError("unknown Chow variant '" + std::string(text) + "'");
}

std::string_view to_string(ChowVariant v) {
  return v == ChowVariant::break_point ? "break-point" : "sample-split";
}

}  // namespace spillover
