#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spillover/panel.hpp"
#include "spillover/var.hpp"

namespace spillover {

enum class CorrelationKind { pearson, spearman, kendall, var_conditional, var_partial };

CorrelationKind parse_correlation_kind(std::string_view text);
std::string_view to_string(CorrelationKind kind);

struct CorrelationMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
  CorrelationKind kind = CorrelationKind::pearson;
};

/// Pearson, Spearman (average ranks) or Kendall tau-b.
CorrelationMatrix static_correlation(const PanelSeries& panel, CorrelationKind kind);

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double kendall_tau_b(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Correlation of the VAR innovations: Sigma_ij / sqrt(Sigma_ii Sigma_jj).
CorrelationMatrix var_conditional_correlation(const VarModel& model);

/// Partial correlation of the innovations from the precision matrix
/// P = Sigma^-1:  -P_ij / sqrt(P_ii P_jj), unit diagonal.
CorrelationMatrix var_partial_correlation(const VarModel& model);

}  // namespace spillover
