#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/fevd.hpp"
#include "spillover/panel.hpp"

namespace spillover {

struct TvpConfig {
  int lag = 1;
  /// Forgetting factor on the coefficient-state covariance, in (0.9, 1].
  double kappa1 = 0.99;
  /// Decay of the exponentially weighted measurement covariance, in (0.9, 1].
  double kappa2 = 0.99;
  /// Multiplies the sampling covariance of the burn-in OLS estimate to give
  /// the initial state covariance. 1 continues the burn-in fit exactly.
  double prior_scale = 1.0;
  /// Regression observations used for the initial OLS fit and not reported.
  /// Defaults to max(30, 4N).
  std::optional<int> burn_in;

  int resolved_burn_in(Eigen::Index n_variables) const;
  void validate(Eigen::Index n_variables, Eigen::Index n_rows) const;
};

/// Filtered time-varying VAR. coeffs[k] is N x (1 + N p): intercept column
/// followed by Phi_1 .. Phi_p at dates[k]; covariances[k] is S at dates[k].
struct TvpTrajectory {
  std::vector<std::string> names;
  std::vector<Date> dates;
  std::vector<Eigen::MatrixXd> coeffs;
  std::vector<Eigen::MatrixXd> covariances;
  TvpConfig config;

  std::size_t size() const { return dates.size(); }
  /// Phi_1 .. Phi_p at position k.
  std::vector<Eigen::MatrixXd> lag_matrices(std::size_t k) const;
};

/// Forward Kalman filter for x_t = B_t' z_t + w_t, vec(B_t) = vec(B_{t-1}) + v_t.
/// The predicted state covariance is the filtered one divided by kappa1; the
/// measurement covariance is S_t = kappa2 S_{t-1} + (1 - kappa2) u_t u_t' with
/// u_t the filtered residual.
TvpTrajectory tvp_filter(const PanelSeries& panel, const TvpConfig& config);

/// Generalized FEVD at every filtered date.
FevdSeries trajectory_fevd(const TvpTrajectory& trajectory, int horizon, int threads = 1);

/// Fixed-length windows of OLS VAR fits, dated at each window's last row.
FevdSeries rolling_var_fevd(const PanelSeries& panel, int window, int lag, int horizon, int threads = 1);

}  // namespace spillover
