#pragma once

namespace spillover {

enum class Deterministic { none, constant, constant_trend };

/// Approximate asymptotic p-value of a Dickey-Fuller type t-statistic from
/// MacKinnon's (1994) response surfaces. `n_variables` is 1 for a unit-root
/// test and 2 for a bivariate Engle-Granger residual test.
struct MacKinnonP {
  double p_value;
  /// Set when the statistic lies outside the tabulated range and the value
  /// above is clipped to 0 or 1.
  bool clipped;
};

MacKinnonP mackinnon_p(double statistic, Deterministic deterministic, int n_variables);

}  // namespace spillover
