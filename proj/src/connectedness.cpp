#include "spillover/connectedness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/parallel.hpp"
#include "spillover/stats.hpp"

namespace spillover {

Eigen::Index ConnectednessReport::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ParameterError("no variable named '" + std::string(name) + "'");
  return it - names.begin();
}

namespace {

void check_pair(const FevdTable& fevd, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = fevd.dim();
  if (i < 0 || j < 0 || i >= n || j >= n) throw ParameterError("pair index out of range");
  if (i == j) throw ParameterError("pairwise measures need two distinct variables");
}

// Sums in ascending order so the result does not depend on variable order.
double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

double npdc(const FevdTable& fevd, Eigen::Index i, Eigen::Index j, NpdcSign sign) {
  check_pair(fevd, i, j);
  const auto& l = fevd.shares;
  const double v = 100.0 * (l(j, i) - l(i, j));
  return sign == NpdcSign::dominance ? v : -v;
}

double pci(const FevdTable& fevd, Eigen::Index i, Eigen::Index j) {
  check_pair(fevd, i, j);
  const auto& l = fevd.shares;
  const double denom = (l(i, i) + l(j, j)) + (l(i, j) + l(j, i));
  if (!(denom > 0.0)) throw NumericalError("PCI denominator is zero");
  return (l(i, j) + l(j, i)) / denom;
}

double pii(const FevdTable& fevd, Eigen::Index i, Eigen::Index j) {
  check_pair(fevd, i, j);
  const auto& l = fevd.shares;
  const double sum = l(i, j) + l(j, i);
  if (!(sum > 0.0)) throw DataError("no pairwise linkage between '" + fevd.names[static_cast<std::size_t>(i)] +
                                    "' and '" + fevd.names[static_cast<std::size_t>(j)] + "'");
  return (l(i, j) - l(j, i)) / sum;
}

ConnectednessReport connectedness_report(const FevdTable& fevd, NpdcSign sign) {
  const Eigen::Index N = fevd.dim();
  if (fevd.shares.cols() != N || static_cast<Eigen::Index>(fevd.names.size()) != N)
    throw DataError("FEVD table shape does not match its names");
  if (N < 2) throw DataError("connectedness needs at least two variables");
  const Eigen::MatrixXd& l = fevd.shares;

  ConnectednessReport r;
  r.names = fevd.names;
  r.npdc_sign = sign;
  r.shares = 100.0 * l;
  r.receiver = 100.0 * (Eigen::VectorXd::Ones(N) - l.diagonal());
  r.giver.resize(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    std::vector<double> col;
    for (Eigen::Index i = 0; i < N; ++i)
      if (i != j) col.push_back(l(i, j));
    r.giver(j) = 100.0 * ordered_sum(std::move(col));
  }
  r.inc_own = r.giver + 100.0 * l.diagonal();
  r.net = r.giver - r.receiver;
  r.tci = ordered_sum({r.receiver.data(), r.receiver.data() + N}) / static_cast<double>(N);

  r.npdc = Eigen::MatrixXd::Zero(N, N);
  r.pci = Eigen::MatrixXd::Zero(N, N);
  r.pii = Eigen::MatrixXd::Zero(N, N);
  r.npt.assign(static_cast<std::size_t>(N), 0);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) {
      if (i == j) continue;
      r.npdc(i, j) = npdc(fevd, i, j, sign);
      r.pci(i, j) = pci(fevd, i, j);
      r.pii(i, j) = l(i, j) + l(j, i) > 0.0 ? pii(fevd, i, j) : std::numeric_limits<double>::quiet_NaN();
      if (l(j, i) > l(i, j)) ++r.npt[static_cast<std::size_t>(i)];
    }
  return r;
}

PairMeasure parse_pair_measure(std::string_view text) {
  if (text == "npdc") return PairMeasure::npdc;
  if (text == "pci") return PairMeasure::pci;
  if (text == "pii") return PairMeasure::pii;
  throw ParameterError("unknown pairwise measure '" + std::string(text) + "'");
}

std::string_view to_string(PairMeasure m) {
  switch (m) {
    case PairMeasure::npdc: return "npdc";
    case PairMeasure::pci: return "pci";
    case PairMeasure::pii: return "pii";
  }
  return "npdc";
}

std::vector<double> DynamicConnectedness::pair_series(std::string_view a, std::string_view b,
                                                      PairMeasure measure) const {
  std::vector<double> out;
  out.reserve(reports.size());
  for (const auto& r : reports) {
    const auto i = r.index_of(a), j = r.index_of(b);
    if (i == j) throw ParameterError("pairwise measures need two distinct variables");
    const Eigen::MatrixXd& m = measure == PairMeasure::npdc ? r.npdc : measure == PairMeasure::pci ? r.pci : r.pii;
    out.push_back(m(i, j));
  }
  return out;
}

std::vector<double> DynamicConnectedness::net_series(std::string_view name) const {
  std::vector<double> out;
  for (const auto& r : reports) out.push_back(r.net(r.index_of(name)));
  return out;
}

std::vector<double> DynamicConnectedness::tci_series() const {
  std::vector<double> out;
  for (const auto& r : reports) out.push_back(r.tci);
  return out;
}

DynamicConnectedness dynamic_report(const FevdSeries& series, NpdcSign sign, int threads) {
  if (series.tables.empty()) throw DataError("dynamic connectedness needs at least one date");
  if (series.tables.size() != series.dates.size()) throw DataError("FEVD series dates and tables differ in length");
  DynamicConnectedness out;
  out.dates = series.dates;
  out.reports.resize(series.tables.size());
  parallel_for(series.tables.size(), threads,
               [&](std::size_t k) { out.reports[k] = connectedness_report(series.tables[k], sign); });
  return out;
}

namespace {

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, ptr);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_network(const ConnectednessReport& report, double threshold) {
  if (!(threshold >= 0.0)) throw ParameterError("network threshold must be nonnegative");
  const Eigen::Index N = static_cast<Eigen::Index>(report.names.size());

  struct Edge {
    Eigen::Index from, to;
    double weight;
  };
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = i + 1; j < N; ++j) {
      // Dominance orientation regardless of how the report stores npdc.
      double v = report.npdc(i, j);
      if (report.npdc_sign == NpdcSign::literal) v = -v;
      if (v == 0.0 || std::abs(v) < threshold) continue;
      edges.push_back(v > 0 ? Edge{i, j, v} : Edge{j, i, -v});
    }
  double bold_above = std::numeric_limits<double>::infinity();
  if (!edges.empty()) {
    std::vector<double> w;
    for (const auto& e : edges) w.push_back(e.weight);
    bold_above = stats::quantile(w, 0.9);
  }

  std::ostringstream out;
  out << "digraph connectedness {\n";
  out << "  node [shape=circle, style=filled];\n";
  for (Eigen::Index i = 0; i < N; ++i) {
    const bool giver = report.net(i) > 0.0;
    out << "  " << quoted(report.names[static_cast<std::size_t>(i)]) << " [class=\""
        << (giver ? "giver" : "receiver") << "\", fillcolor=\"" << (giver ? "#4a90d9" : "#f2c14e")
        << "\", weight=" << number(std::abs(report.net(i))) << "];\n";
  }
  for (const auto& e : edges) {
    out << "  " << quoted(report.names[static_cast<std::size_t>(e.from)]) << " -> "
        << quoted(report.names[static_cast<std::size_t>(e.to)]) << " [weight=" << number(e.weight);
    if (e.weight > bold_above) out << ", style=bold, penwidth=3";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace spillover
