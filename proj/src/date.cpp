#include "spillover/date.hpp"

#include <cctype>
#include <cstdio>

#include "spillover/error.hpp"

namespace spillover {

namespace {

[[noreturn]] void bad_date(std::string_view text, std::string_view format) {
  throw DataError("cannot parse date '" + std::string(text) + "' with format '" +
                  std::string(format) + "'");
}

}  // namespace

Date parse_date(std::string_view text, std::string_view format) {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;
  bool have_y = false, have_m = false, have_d = false;
  std::size_t pos = 0;

  auto read_number = [&](std::size_t max_digits) {
    std::size_t start = pos;
    int value = 0;
    while (pos < text.size() && pos - start < max_digits &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == start) bad_date(text, format);
    return value;
  };

  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      switch (format[++f]) {
        case 'Y': year = read_number(4); have_y = true; break;
        case 'm': month = static_cast<unsigned>(read_number(2)); have_m = true; break;
        case 'd': day = static_cast<unsigned>(read_number(2)); have_d = true; break;
        case '%':
          if (pos >= text.size() || text[pos] != '%') bad_date(text, format);
          ++pos;
          break;
        default: throw DataError("unsupported date directive in '" + std::string(format) + "'");
      }
    } else {
      if (pos >= text.size() || text[pos] != format[f]) bad_date(text, format);
      ++pos;
    }
  }
  if (pos != text.size() || !have_y || !have_m || !have_d) bad_date(text, format);

  Date date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!date.ok()) bad_date(text, format);
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

}  // namespace spillover
