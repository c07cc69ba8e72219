// types.hpp
// Shared scalar types, month-code helpers and error hierarchy.

#pragma once

#include <stdexcept>
#include <string>

namespace bppp {

// Months are integer codes YYYYMM (e.g. 196307). Monthly frequency is the
// only supported frequency.
using MonthCode = int;

inline bool is_valid_month(MonthCode ym) {
    const int m = ym % 100;
    const int y = ym / 100;
    return y >= 1 && y <= 9999 && m >= 1 && m <= 12;
}

inline MonthCode next_month(MonthCode ym) {
    const int m = ym % 100;
    return m == 12 ? (ym / 100 + 1) * 100 + 1 : ym + 1;
}

inline MonthCode add_months(MonthCode ym, int n) {
    int y = ym / 100;
    int m0 = ym % 100 - 1 + n;
    y += m0 / 12;
    m0 %= 12;
    if (m0 < 0) {
        m0 += 12;
        y -= 1;
    }
    return y * 100 + m0 + 1;
}

// Number of months from a to b (positive when b is later).
inline int month_diff(MonthCode a, MonthCode b) {
    return (b / 100 - a / 100) * 12 + (b % 100 - a % 100);
}

inline int year_of(MonthCode ym) { return ym / 100; }

class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class AlignmentError : public DataError {
  public:
    explicit AlignmentError(const std::string& what) : DataError(what) {}
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bppp
