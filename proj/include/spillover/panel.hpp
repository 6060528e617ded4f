#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spillover/date.hpp"

namespace spillover {

/// Marker stored in a cell that was blank in the source file.
double missing_value();
bool is_missing(double value);

/// A labeled, date-indexed multivariate series. Row t of `values` is the
/// observation at `dates[t]`; column j is the variable `names[j]`.
struct PanelSeries {
  std::vector<std::string> names;
  std::vector<Date> dates;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Column index of `name`; throws DataError if absent.
  Eigen::Index column(std::string_view name) const;
  bool has_missing() const;
  /// Subset of columns in the given order.
  PanelSeries select(std::span<const std::string> columns) const;
  /// Rows [first, first + count).
  PanelSeries slice(Eigen::Index first, Eigen::Index count) const;

  /// Checks shape, date ordering and name uniqueness.
  void validate() const;

  friend bool operator==(const PanelSeries& a, const PanelSeries& b);
};

struct CsvOptions {
  std::string date_column = "date";
  /// Columns to keep, in order. Empty keeps every numeric column.
  std::vector<std::string> columns;
  char delimiter = ',';
  std::string date_format = "%Y-%m-%d";
};

PanelSeries load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
PanelSeries read_csv(std::istream& in, const CsvOptions& options = {},
                     std::string_view source = "<stream>");
void write_csv(std::ostream& out, const PanelSeries& panel, char delimiter = ',');
void save_csv(const std::filesystem::path& path, const PanelSeries& panel, char delimiter = ',');

/// Merges panels on the intersection of their dates, dropping any date at
/// which some source is absent or carries a missing cell.
PanelSeries align(std::span<const PanelSeries> panels);

/// values[t] / values[0] - 1, column-wise.
PanelSeries cumulative_return(const PanelSeries& prices);
/// values[t+1] - values[t], dated at the later observation.
PanelSeries first_difference(const PanelSeries& panel);
PanelSeries log_level(const PanelSeries& panel);

enum class TransformKind { identity, cumulative_return, first_difference, log_level };

TransformKind parse_transform_kind(std::string_view text);
std::string_view to_string(TransformKind kind);

/// One transform per named column.
struct TransformSpec {
  std::vector<std::pair<std::string, TransformKind>> assignments;

  static TransformSpec uniform(std::span<const std::string> names, TransformKind kind);
  TransformKind kind_of(std::string_view name) const;
  /// Every column of `panel` must be assigned exactly once, and nothing else.
  void validate(const PanelSeries& panel) const;
};

/// Applies the per-column transforms. If any column is first-differenced the
/// first row is dropped from the whole panel so rows stay aligned.
PanelSeries apply_transforms(const PanelSeries& panel, const TransformSpec& spec);

}  // namespace spillover
