#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spillover/mackinnon.hpp"
#include "spillover/panel.hpp"

namespace spillover {

struct DescriptiveStats {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Outcome of a hypothesis test.
struct TestResult {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  /// True when p_value is a clipped bound (statistic outside the tabulated range).
  bool p_value_bound = false;
  std::optional<int> lags;
  double level = 0.05;
  bool reject = false;
  /// Bootstrap critical value at 1 - level, where the test has one.
  std::optional<double> critical_value;
};

/// Paper-table significance marks: *** p <= 0.005, ** p <= 0.01, * p <= 0.05.
std::string significance_stars(double p_value);

/// Sample moments per column. Skewness and kurtosis are the standardized
/// third and fourth central moments (kurtosis in excess of 3); sd uses n - 1.
std::vector<DescriptiveStats> describe(const PanelSeries& panel);
DescriptiveStats describe(std::span<const double> x, std::string name = {});

TestResult jarque_bera(std::span<const double> x, double level = 0.05);

/// Ljung-Box Q on the squares of the demeaned series (McLeod-Li form).
TestResult ljung_box_squared(std::span<const double> x, int lags = 20, double level = 0.05);

/// Schwert's rule floor(12 (T/100)^(1/4)).
int default_adf_max_lags(std::size_t T);

/// Augmented Dickey-Fuller t-test. The augmentation order minimizes AIC over
/// 0..max_lags on a common sample, then the chosen regression is refitted on
/// all available observations.
TestResult adf_test(std::span<const double> x, std::optional<int> max_lags = std::nullopt,
                    Deterministic deterministic = Deterministic::constant, double level = 0.05);

/// Engle-Granger two-step test of no cointegration: OLS of x on y (plus
/// deterministics), then an ADF regression without deterministics on the
/// residuals, judged against the two-variable MacKinnon surface.
TestResult engle_granger(std::span<const double> x, std::span<const double> y,
                         Deterministic deterministic = Deterministic::constant,
                         std::optional<int> max_lags = std::nullopt, double level = 0.05);

enum class ChowVariant { break_point, sample_split };

struct ChowOptions {
  int lag = 1;
  /// First row of the second sub-sample.
  Eigen::Index break_index = 0;
  ChowVariant variant = ChowVariant::break_point;
  int bootstrap_reps = 399;
  std::uint64_t seed = 1;
  double level = 0.05;
  int threads = 1;
};

/// Chow stability test for a VAR with an intercept. The break-point form lets
/// the residual covariance differ across regimes, the sample-split form keeps
/// it common. Null distribution from a residual bootstrap of the full-sample
/// fit; replication r draws from its own generator seeded by (seed, r).
TestResult chow_test(const PanelSeries& panel, const ChowOptions& options);

/// The statistic alone, for the given sub-sample boundary.
double chow_statistic(const Eigen::MatrixXd& data, int lag, Eigen::Index break_index, ChowVariant variant);

Deterministic parse_deterministic(std::string_view text);
std::string_view to_string(Deterministic d);
ChowVariant parse_chow_variant(std::string_view text);
std::string_view to_string(ChowVariant v);

}  // namespace spillover
