#include "spillover/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "spillover/error.hpp"

namespace spillover {

double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

bool is_missing(double value) { return std::isnan(value); }

Eigen::Index PanelSeries::column(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<Eigen::Index>(j);
  throw DataError("no column named '" + std::string(name) + "'");
}

bool PanelSeries::has_missing() const { return values.array().isNaN().any(); }

PanelSeries PanelSeries::select(std::span<const std::string> columns) const {
  PanelSeries out;
  out.dates = dates;
  out.values.resize(rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = values.col(column(columns[k]));
    out.names.push_back(columns[k]);
  }
  return out;
}

PanelSeries PanelSeries::slice(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > rows())
    throw ParameterError("panel slice out of range");
  PanelSeries out;
  out.names = names;
  out.dates.assign(dates.begin() + first, dates.begin() + first + count);
  out.values = values.middleRows(first, count);
  return out;
}

void PanelSeries::validate() const {
  if (static_cast<Eigen::Index>(dates.size()) != values.rows())
    throw DataError("panel has " + std::to_string(dates.size()) + " dates but " +
                    std::to_string(values.rows()) + " rows");
  if (static_cast<Eigen::Index>(names.size()) != values.cols())
    throw DataError("panel has " + std::to_string(names.size()) + " names but " +
                    std::to_string(values.cols()) + " columns");
  for (std::size_t t = 1; t < dates.size(); ++t)
    if (!(dates[t - 1] < dates[t]))
      throw DataError("dates not strictly increasing at " + format_date(dates[t]));
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw DataError("duplicate variable name '" + n + "'");
}

bool operator==(const PanelSeries& a, const PanelSeries& b) {
  if (a.names != b.names || a.dates != b.dates) return false;
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) return false;
  for (Eigen::Index i = 0; i < a.values.size(); ++i) {
    double x = a.values.data()[i], y = b.values.data()[i];
    if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
  }
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    else if (line[i] == delimiter && !quoted) {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  fields.push_back(trim(line.substr(start)));
  return fields;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "." || s == "#N/A";
}

}  // namespace

PanelSeries read_csv(std::istream& in, const CsvOptions& options, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(source) + ": empty file");
  auto header = split(line, options.delimiter);

  std::ptrdiff_t date_col = -1;
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == options.date_column) date_col = static_cast<std::ptrdiff_t>(k);
  if (date_col < 0)
    throw DataError(std::string(source) + ": no date column '" + options.date_column + "'");

  std::vector<std::size_t> picked;
  std::vector<std::string> names;
  if (options.columns.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (static_cast<std::ptrdiff_t>(k) != date_col) {
        picked.push_back(k);
        names.emplace_back(header[k]);
      }
  } else {
    for (const auto& want : options.columns) {
      auto it = std::find(header.begin(), header.end(), want);
      if (it == header.end())
        throw DataError(std::string(source) + ": no column named '" + want + "'");
      picked.push_back(static_cast<std::size_t>(it - header.begin()));
      names.push_back(want);
    }
  }

  std::vector<std::pair<Date, std::vector<double>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, options.delimiter);
    if (fields.size() != header.size())
      throw DataError(std::string(source) + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    Date date;
    try {
      date = parse_date(fields[static_cast<std::size_t>(date_col)], options.date_format);
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ", column '" +
                      options.date_column + "': " + e.what());
    }
    std::vector<double> row;
    row.reserve(picked.size());
    for (std::size_t k = 0; k < picked.size(); ++k) {
      std::string_view cell = fields[picked[k]];
      if (is_missing_token(cell)) {
        row.push_back(missing_value());
        continue;
      }
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ", column '" +
                        names[k] + "': cannot parse '" + std::string(cell) + "' as a number");
      row.push_back(v);
    }
    rows.emplace_back(date, std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t t = 1; t < rows.size(); ++t)
    if (rows[t].first == rows[t - 1].first)
      throw DataError(std::string(source) + ": duplicate date " + format_date(rows[t].first));

  PanelSeries panel;
  panel.names = std::move(names);
  panel.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(panel.names.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    panel.dates.push_back(rows[t].first);
    for (std::size_t k = 0; k < rows[t].second.size(); ++k)
      panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = rows[t].second[k];
  }
  panel.validate();
  return panel;
}

PanelSeries load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, options, path.string());
}

namespace {

std::string format_number(double v) {
  if (is_missing(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void write_csv(std::ostream& out, const PanelSeries& panel, char delimiter) {
  out << "date";
  for (const auto& n : panel.names) out << delimiter << n;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << format_date(panel.dates[static_cast<std::size_t>(t)]);
    for (Eigen::Index j = 0; j < panel.cols(); ++j) out << delimiter << format_number(panel.values(t, j));
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const PanelSeries& panel, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, panel, delimiter);
}

PanelSeries align(std::span<const PanelSeries> panels) {
  if (panels.empty()) throw ParameterError("align needs at least one panel");

  std::set<std::string> seen;
  for (const auto& p : panels)
    for (const auto& n : p.names)
      if (!seen.insert(n).second) throw DataError("variable '" + n + "' appears in more than one panel");

  // Dates where a source has a complete row.
  auto complete_dates = [](const PanelSeries& p) {
    std::vector<Date> out;
    for (Eigen::Index t = 0; t < p.rows(); ++t)
      if (!p.values.row(t).array().isNaN().any()) out.push_back(p.dates[static_cast<std::size_t>(t)]);
    return out;
  };

  std::vector<Date> common = complete_dates(panels[0]);
  for (std::size_t k = 1; k < panels.size(); ++k) {
    auto other = complete_dates(panels[k]);
    std::vector<Date> merged;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                          std::back_inserter(merged));
    common = std::move(merged);
  }
  if (common.empty()) throw DataError("empty intersection of panel dates");

  PanelSeries out;
  out.dates = common;
  Eigen::Index total_cols = 0;
  for (const auto& p : panels) total_cols += p.cols();
  out.values.resize(static_cast<Eigen::Index>(common.size()), total_cols);

  Eigen::Index offset = 0;
  for (const auto& p : panels) {
    std::map<Date, Eigen::Index> row_of;
    for (Eigen::Index t = 0; t < p.rows(); ++t) row_of.emplace(p.dates[static_cast<std::size_t>(t)], t);
    for (std::size_t t = 0; t < common.size(); ++t)
      out.values.block(static_cast<Eigen::Index>(t), offset, 1, p.cols()) = p.values.row(row_of.at(common[t]));
    out.names.insert(out.names.end(), p.names.begin(), p.names.end());
    offset += p.cols();
  }
  return out;
}

PanelSeries cumulative_return(const PanelSeries& prices) {
  if (prices.rows() < 2) throw DataError("cumulative return needs at least 2 observations");
  for (Eigen::Index j = 0; j < prices.cols(); ++j)
    for (Eigen::Index t = 0; t < prices.rows(); ++t)
      if (!(prices.values(t, j) > 0.0))
        throw DataError("nonpositive price in column '" + prices.names[static_cast<std::size_t>(j)] +
                        "' at " + format_date(prices.dates[static_cast<std::size_t>(t)]));
  PanelSeries out = prices;
  for (Eigen::Index j = 0; j < prices.cols(); ++j)
    out.values.col(j) = prices.values.col(j).array() / prices.values(0, j) - 1.0;
  out.values.row(0).setZero();
  return out;
}

PanelSeries first_difference(const PanelSeries& panel) {
  if (panel.rows() < 2) throw DataError("first difference needs at least 2 observations");
  PanelSeries out;
  out.names = panel.names;
  out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  const Eigen::Index n = panel.rows() - 1;
  out.values = panel.values.bottomRows(n) - panel.values.topRows(n);
  return out;
}

PanelSeries log_level(const PanelSeries& panel) {
  for (Eigen::Index j = 0; j < panel.cols(); ++j)
    for (Eigen::Index t = 0; t < panel.rows(); ++t)
      if (!(panel.values(t, j) > 0.0))
        throw DataError("log of nonpositive value in column '" + panel.names[static_cast<std::size_t>(j)] +
                        "' at " + format_date(panel.dates[static_cast<std::size_t>(t)]));
  PanelSeries out = panel;
  out.values = panel.values.array().log().matrix();
  return out;
}

TransformKind parse_transform_kind(std::string_view text) {
  if (text == "identity") return TransformKind::identity;
  if (text == "cumulative-return") return TransformKind::cumulative_return;
  if (text == "first-difference") return TransformKind::first_difference;
  if (text == "log-level") return TransformKind::log_level;
  throw ParameterError("unknown transform '" + std::string(text) + "'");
}

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::cumulative_return: return "cumulative-return";
    case TransformKind::first_difference: return "first-difference";
    case TransformKind::log_level: return "log-level";
  }
  return "identity";
}

TransformSpec TransformSpec::uniform(std::span<const std::string> names, TransformKind kind) {
  TransformSpec spec;
  for (const auto& n : names) spec.assignments.emplace_back(n, kind);
  return spec;
}

TransformKind TransformSpec::kind_of(std::string_view name) const {
  for (const auto& [n, k] : assignments)
    if (n == name) return k;
  throw DataError("no transform assigned to column '" + std::string(name) + "'");
}

void TransformSpec::validate(const PanelSeries& panel) const {
  std::map<std::string, int> count;
  for (const auto& [n, k] : assignments) ++count[n];
  for (const auto& [n, c] : count) {
    if (std::find(panel.names.begin(), panel.names.end(), n) == panel.names.end())
      throw DataError("transform assigned to unknown column '" + n + "'");
    if (c > 1) throw DataError("column '" + n + "' has more than one transform");
  }
  for (const auto& n : panel.names)
    if (!count.contains(n)) throw DataError("no transform assigned to column '" + n + "'");
}

PanelSeries apply_transforms(const PanelSeries& panel, const TransformSpec& spec) {
  spec.validate(panel);
  PanelSeries out = panel;
  bool differenced = false;
  for (Eigen::Index j = 0; j < panel.cols(); ++j) {
    const auto& name = panel.names[static_cast<std::size_t>(j)];
    PanelSeries column;
    column.names = {name};
    column.dates = panel.dates;
    column.values = panel.values.col(j);
    switch (spec.kind_of(name)) {
      case TransformKind::identity: break;
      case TransformKind::cumulative_return: out.values.col(j) = cumulative_return(column).values; break;
      case TransformKind::log_level: out.values.col(j) = log_level(column).values; break;
      case TransformKind::first_difference: {
        auto d = first_difference(column);
        out.values(0, j) = missing_value();
        out.values.col(j).tail(d.rows()) = d.values;
        differenced = true;
        break;
      }
    }
  }
  return differenced ? out.slice(1, out.rows() - 1) : out;
}

}  // namespace spillover
