#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spillover/fevd.hpp"

namespace spillover {

/// Orientation of net pairwise directional connectedness. `dominance` makes
/// npdc(i, j) > 0 mean i transmits more to j than it receives from j
/// (100 (l_ji - l_ij)); `literal` is 100 (l_ij - l_ji).
enum class NpdcSign { dominance, literal };

/// Spillover indices of one decomposition, all in percent except PCI and PII.
struct ConnectednessReport {
  std::vector<std::string> names;
  Eigen::MatrixXd shares;    // 100 l_ij
  Eigen::VectorXd receiver;  // from others: 100 (1 - l_ii)
  Eigen::VectorXd giver;     // to others: 100 sum_{j != i} l_ji
  Eigen::VectorXd inc_own;   // giver + own share
  Eigen::VectorXd net;       // giver - receiver
  std::vector<int> npt;      // number of counterparties dominated
  double tci = 0.0;          // mean receiver
  Eigen::MatrixXd npdc;
  Eigen::MatrixXd pci;       // zero diagonal
  Eigen::MatrixXd pii;       // NaN where l_ij + l_ji = 0
  NpdcSign npdc_sign = NpdcSign::dominance;

  Eigen::Index index_of(std::string_view name) const;
};

ConnectednessReport connectedness_report(const FevdTable& fevd, NpdcSign sign = NpdcSign::dominance);

double npdc(const FevdTable& fevd, Eigen::Index i, Eigen::Index j, NpdcSign sign = NpdcSign::dominance);
/// (l_ij + l_ji) / (l_ii + l_jj + l_ij + l_ji)
double pci(const FevdTable& fevd, Eigen::Index i, Eigen::Index j);
/// (l_ij - l_ji) / (l_ij + l_ji)
double pii(const FevdTable& fevd, Eigen::Index i, Eigen::Index j);

enum class PairMeasure { npdc, pci, pii };
PairMeasure parse_pair_measure(std::string_view text);
std::string_view to_string(PairMeasure m);

struct DynamicConnectedness {
  std::vector<Date> dates;
  std::vector<ConnectednessReport> reports;

  std::vector<double> pair_series(std::string_view a, std::string_view b, PairMeasure measure) const;
  std::vector<double> net_series(std::string_view name) const;
  std::vector<double> tci_series() const;
};

DynamicConnectedness dynamic_report(const FevdSeries& series, NpdcSign sign = NpdcSign::dominance,
                                    int threads = 1);

/// Directed network in Graphviz DOT. Nodes are classed "giver" (net > 0) or
/// "receiver"; each unordered pair with a nonzero |npdc| >= threshold gets one
/// edge from the dominating to the dominated variable, bold when above the
/// 90th percentile of the drawn edge weights.
std::string export_network(const ConnectednessReport& report, double threshold);

}  // namespace spillover
