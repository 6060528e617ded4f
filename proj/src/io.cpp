#include "spillover/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "spillover/error.hpp"

namespace spillover {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(std::isnan(m(i, j)) ? json() : json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

json to_json(const TestResult& r, bool stars) {
  json j;
  j["test"] = r.test;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["lags"] = r.lags ? json(*r.lags) : json();
  j["decision"] = r.reject ? "reject" : "fail-to-reject";
  j["level"] = r.level;
  if (r.p_value_bound) j["p_value_bound"] = true;
  if (r.critical_value) j["critical_value"] = *r.critical_value;
  if (stars) j["stars"] = significance_stars(r.p_value);
  return j;
}

json to_json(const DescriptiveStats& s) {
  return json{{"name", s.name},  {"mean", s.mean},           {"median", s.median},
              {"sd", s.sd},      {"skewness", s.skewness},   {"excess_kurtosis", s.excess_kurtosis},
              {"q1", s.q1},      {"q3", s.q3}};
}

json to_json(const CorrelationMatrix& m, bool upper_only) {
  Eigen::MatrixXd v = m.values;
  if (upper_only)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j) v(i, j) = std::nan("");
  return json{{"kind", std::string(to_string(m.kind))}, {"names", m.names}, {"values", matrix_json(v)}};
}

json to_json(const FevdTable& t) {
  return json{{"horizon", t.horizon}, {"names", t.names}, {"shares", matrix_json(t.shares)}};
}

json to_json(const ConnectednessReport& r) {
  return json{{"names", r.names},
              {"tci", r.tci},
              {"receiver", vector_json(r.receiver)},
              {"giver", vector_json(r.giver)},
              {"inc_own", vector_json(r.inc_own)},
              {"net", vector_json(r.net)},
              {"npt", r.npt},
              {"npdc_sign", r.npdc_sign == NpdcSign::dominance ? "dominance" : "literal"},
              {"shares", matrix_json(r.shares)},
              {"npdc", matrix_json(r.npdc)},
              {"pci", matrix_json(r.pci)},
              {"pii", matrix_json(r.pii)}};
}

json to_json(const DynamicConnectedness& d) {
  json reports = json::array();
  for (std::size_t k = 0; k < d.dates.size(); ++k) {
    json r = to_json(d.reports[k]);
    r.erase("shares");
    reports.push_back(json{{"date", format_date(d.dates[k])}, {"report", std::move(r)}});
  }
  return json{{"names", d.reports.front().names}, {"series", std::move(reports)}};
}

void write_csv(std::ostream& out, const CorrelationMatrix& m, bool upper_only) {
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    out << m.names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      out << ',';
      if (!(upper_only && j < i)) out << format_double(m.values(i, j));
    }
    out << '\n';
  }
}

void write_fevd_csv(std::ostream& out, const FevdTable& t) {
  for (const auto& n : t.names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < t.shares.rows(); ++i) {
    out << t.names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < t.shares.cols(); ++j) out << ',' << format_double(t.shares(i, j));
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

FevdTable read_fevd_csv(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(source) + ": empty FEVD file");
  auto header = split_line(line);
  if (header.size() < 3) throw DataError(std::string(source) + ": FEVD file needs at least two variables");
  std::vector<std::string> names(header.begin() + 1, header.end());
  const auto N = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd shares(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (!std::getline(in, line)) throw DataError(std::string(source) + ": FEVD file has too few rows");
    auto cells = split_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != N + 1 || cells[0] != names[static_cast<std::size_t>(i)])
      throw DataError(std::string(source) + ": FEVD row " + std::to_string(i + 1) + " does not match the header");
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto& c = cells[static_cast<std::size_t>(j + 1)];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), shares(i, j));
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw DataError(std::string(source) + ": cannot parse FEVD cell '" + c + "'");
    }
  }
  return fevd_from_shares(std::move(names), std::move(shares), 0, 1e-6);
}

void write_report_table(std::ostream& out, const ConnectednessReport& r, int decimals) {
  const auto N = static_cast<Eigen::Index>(r.names.size());
  for (const auto& n : r.names) out << ',' << n;
  out << ",Receiver\n";
  for (Eigen::Index i = 0; i < N; ++i) {
    out << r.names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < N; ++j) out << ',' << format_fixed(r.shares(i, j), decimals);
    out << ',' << format_fixed(r.receiver(i), decimals) << '\n';
  }
  out << "Giver";
  for (Eigen::Index i = 0; i < N; ++i) out << ',' << format_fixed(r.giver(i), decimals);
  out << ",\nInc.Own";
  for (Eigen::Index i = 0; i < N; ++i) out << ',' << format_fixed(r.inc_own(i), decimals);
  out << ",TCI\nNET";
  for (Eigen::Index i = 0; i < N; ++i) out << ',' << format_fixed(r.net(i), decimals);
  out << ',' << format_fixed(r.tci, decimals) << "\nNPT";
  for (int v : r.npt) out << ',' << v;
  out << ",\n";
}

void write_dynamic_long_csv(std::ostream& out, const DynamicConnectedness& d) {
  out << "date,measure,i,j,value\n";
  for (std::size_t k = 0; k < d.dates.size(); ++k) {
    const std::string date = format_date(d.dates[k]);
    const auto& r = d.reports[k];
    const auto N = static_cast<Eigen::Index>(r.names.size());
    out << date << ",tci,,," << format_double(r.tci) << '\n';
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto& n = r.names[static_cast<std::size_t>(i)];
      out << date << ",receiver," << n << ",," << format_double(r.receiver(i)) << '\n';
      out << date << ",giver," << n << ",," << format_double(r.giver(i)) << '\n';
      out << date << ",net," << n << ",," << format_double(r.net(i)) << '\n';
    }
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) {
        if (i == j) continue;
        const auto& a = r.names[static_cast<std::size_t>(i)];
        const auto& b = r.names[static_cast<std::size_t>(j)];
        out << date << ",npdc," << a << ',' << b << ',' << format_double(r.npdc(i, j)) << '\n';
        if (i < j) {
          out << date << ",pci," << a << ',' << b << ',' << format_double(r.pci(i, j)) << '\n';
        }
        out << date << ",pii," << a << ',' << b << ',' << format_double(r.pii(i, j)) << '\n';
      }
  }
}

void write_pair_csv(std::ostream& out, const DynamicConnectedness& d, std::string_view a, std::string_view b,
                    PairMeasure measure) {
  const auto values = d.pair_series(a, b, measure);
  out << "date," << to_string(measure) << '\n';
  for (std::size_t k = 0; k < values.size(); ++k) out << format_date(d.dates[k]) << ',' << format_double(values[k]) << '\n';
}

void write_net_csv(std::ostream& out, const DynamicConnectedness& d) {
  out << "date";
  for (const auto& n : d.reports.front().names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < d.dates.size(); ++k) {
    out << format_date(d.dates[k]);
    for (Eigen::Index i = 0; i < d.reports[k].net.size(); ++i) out << ',' << format_double(d.reports[k].net(i));
    out << '\n';
  }
}

namespace {

std::vector<std::string> regressor_labels(const TvpTrajectory& t) {
  std::vector<std::string> labels{"const"};
  for (int j = 1; j <= t.config.lag; ++j)
    for (const auto& n : t.names) labels.push_back(n + ".l" + std::to_string(j));
  return labels;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TvpTrajectory& t) {
  const auto labels = regressor_labels(t);
  out << "date,equation,regressor,coefficient\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string date = format_date(t.dates[k]);
    for (Eigen::Index i = 0; i < t.coeffs[k].rows(); ++i) {
      const auto& eq = t.names[static_cast<std::size_t>(i)];
      for (Eigen::Index c = 0; c < t.coeffs[k].cols(); ++c)
        out << date << ',' << eq << ',' << labels[static_cast<std::size_t>(c)] << ',' << format_double(t.coeffs[k](i, c)) << '\n';
      for (Eigen::Index c = 0; c < t.covariances[k].cols(); ++c)
        out << date << ',' << eq << ",cov:" << t.names[static_cast<std::size_t>(c)] << ','
            << format_double(t.covariances[k](i, c)) << '\n';
    }
  }
}

void write_trajectory_json_dir(const std::filesystem::path& dir, const TvpTrajectory& t) {
  std::filesystem::create_directories(dir);
  const auto labels = regressor_labels(t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string date = format_date(t.dates[k]);
    json rec{{"date", date},
             {"names", t.names},
             {"regressors", labels},
             {"coefficients", matrix_json(t.coeffs[k])},
             {"covariance", matrix_json(t.covariances[k])}};
    std::ofstream f(dir / (date + ".json"));
    if (!f) throw DataError("cannot write trajectory record for " + date);
    f << rec.dump(2) << '\n';
  }
}

}  // namespace spillover
