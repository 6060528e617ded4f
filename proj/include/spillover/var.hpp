#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"

namespace spillover {

/// Reduced-form VAR(p):  x_t = d + sum_j Phi_j x_{t-j} + w_t,  w_t ~ (0, Sigma).
struct VarModel {
  std::vector<std::string> names;
  int lag = 1;
  bool has_intercept = true;
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> coeffs;  // Phi_1 .. Phi_p, each N x N
  Eigen::MatrixXd sigma;                // ML residual covariance
  Eigen::MatrixXd residuals;            // (T - p) x N

  Eigen::Index dim() const { return sigma.rows(); }
};

/// Stacked regression Y = X B + U for a VAR(p). Rows of X are
/// [1, x_{t-1}', ..., x_{t-p}'] (the leading 1 only with an intercept).
/// Observations run from row `first` (>= p) to the end of `data`.
struct VarDesign {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd X;
};

VarDesign build_var_design(const Eigen::MatrixXd& data, int p, bool intercept, Eigen::Index first);
VarDesign build_var_design(const Eigen::MatrixXd& data, int p, bool intercept);

/// Equation-by-equation OLS; Sigma uses the T - p (ML) denominator.
VarModel fit_var(const PanelSeries& panel, int p, bool intercept = true);
VarModel fit_var(const Eigen::MatrixXd& data, std::vector<std::string> names, int p,
                 bool intercept = true);

/// OLS on an explicit design; shared by the lag search and the Chow test.
/// Returns the coefficient matrix B ((Np+1) x N); throws on rank deficiency.
Eigen::MatrixXd ols_coefficients(const VarDesign& design);

enum class LagCriterion { bic, aic };

/// Lag in 1..p_max minimizing the criterion, all candidates fitted on the
/// sample left after dropping the first p_max rows.
int select_lag(const PanelSeries& panel, int p_max, LagCriterion criterion = LagCriterion::bic,
               bool intercept = true);

/// Wold moving-average matrices A_0 .. A_{n_terms-1}.
std::vector<Eigen::MatrixXd> ma_coefficients(const std::vector<Eigen::MatrixXd>& coeffs,
                                             Eigen::Index dim, int n_terms);
std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int n_terms);

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& coeffs);
/// Largest eigenvalue modulus of the companion matrix; < 1 means stable.
double spectral_radius(const VarModel& model);

/// Simulates T observations from a VAR driven by the given shocks (rows of
/// `shocks` are w_t). The first p rows of the result are the supplied
/// `initial` values; shocks for those rows are ignored.
Eigen::MatrixXd simulate_var(const Eigen::VectorXd& intercept, const std::vector<Eigen::MatrixXd>& coeffs,
                             const Eigen::MatrixXd& initial, const Eigen::MatrixXd& shocks);

}  // namespace spillover
