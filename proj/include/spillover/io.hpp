#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "spillover/connectedness.hpp"
#include "spillover/correlation.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/fevd.hpp"
#include "spillover/tvp.hpp"

namespace spillover {

using json = nlohmann::ordered_json;

/// Shortest text that reads back to the same double; empty for NaN.
std::string format_double(double v);
/// Fixed-point rendering used in paper-style tables.
std::string format_fixed(double v, int decimals);

/// {test, statistic, p_value, lags, decision, level} plus optional fields.
json to_json(const TestResult& result, bool stars = false);
json to_json(const DescriptiveStats& stats);
json to_json(const CorrelationMatrix& matrix, bool upper_only = false);
json to_json(const FevdTable& table);
json to_json(const ConnectednessReport& report);
json to_json(const DynamicConnectedness& dynamic);

/// Header row and column of names; the lower triangle is left blank when
/// `upper_only` is set.
void write_csv(std::ostream& out, const CorrelationMatrix& matrix, bool upper_only = false);

/// Share matrix l_ij with a header row and column of names.
void write_fevd_csv(std::ostream& out, const FevdTable& table);
FevdTable read_fevd_csv(std::istream& in, std::string_view source = "<stream>");

/// Connectedness table in the paper's layout: pairwise block and Receiver
/// column, then Giver, Inc.Own, NET and NPT rows with TCI in the corner.
void write_report_table(std::ostream& out, const ConnectednessReport& report, int decimals = 2);

/// Long form: date,measure,i,j,value for tci, receiver, giver, net, npdc, pci, pii.
void write_dynamic_long_csv(std::ostream& out, const DynamicConnectedness& dynamic);
/// date,value for one pairwise measure.
void write_pair_csv(std::ostream& out, const DynamicConnectedness& dynamic, std::string_view a,
                    std::string_view b, PairMeasure measure);
/// date,<name>... NET per variable.
void write_net_csv(std::ostream& out, const DynamicConnectedness& dynamic);

/// Columnar trajectory: date,equation,regressor,coefficient, with the
/// measurement covariance as regressor "cov:<name>".
void write_trajectory_csv(std::ostream& out, const TvpTrajectory& trajectory);
/// One JSON record per date, named <YYYY-MM-DD>.json.
void write_trajectory_json_dir(const std::filesystem::path& dir, const TvpTrajectory& trajectory);

}  // namespace spillover
