#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace spillover {

/// Calendar date. All series in this library are daily.
using Date = std::chrono::year_month_day;

/// Parses `text` according to `format`, which understands %Y, %m, %d and
/// literal characters. Throws DataError on mismatch or an invalid day.
Date parse_date(std::string_view text, std::string_view format = "%Y-%m-%d");

/// ISO-8601 (YYYY-MM-DD) rendering.
std::string format_date(const Date& date);

}  // namespace spillover
