#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/date.hpp"
#include "spillover/var.hpp"

namespace spillover {

/// h-step forecast-error variance decomposition. Row i of `shares` is the
/// fraction of variable i's forecast-error variance attributed to shocks in
/// each column variable; rows sum to one.
struct FevdTable {
  std::vector<std::string> names;
  int horizon = 0;
  Eigen::MatrixXd raw;     // d_ij(h), unnormalized
  Eigen::MatrixXd shares;  // l_ij(h)

  Eigen::Index dim() const { return shares.rows(); }
  /// Checks shape, nonnegativity and unit row sums (within `tolerance`).
  void validate(double tolerance = 1e-8) const;
};

/// Wraps an already row-standardized share matrix.
FevdTable fevd_from_shares(std::vector<std::string> names, Eigen::MatrixXd shares, int horizon = 0,
                           double tolerance = 1e-8);

/// Generalized (order-invariant) FEVD of Koop-Pesaran-Potter / Pesaran-Shin:
///   d_ij(h) = sigma_jj^-1 sum_{s<h} (e_i' A_s Sigma e_j)^2 / sum_{s<h} e_i' A_s Sigma A_s' e_i
/// followed by row standardization.
FevdTable gfevd(const VarModel& model, int horizon);
FevdTable gfevd(const std::vector<Eigen::MatrixXd>& coeffs, const Eigen::MatrixXd& sigma,
                std::vector<std::string> names, int horizon);

/// Orthogonalized FEVD with Cholesky identification in the given variable
/// order. The result is reported in the model's own variable order.
FevdTable cholesky_fevd(const VarModel& model, int horizon, std::span<const std::string> order);

/// A date-indexed sequence of decompositions.
struct FevdSeries {
  std::vector<Date> dates;
  std::vector<FevdTable> tables;
};

}  // namespace spillover
