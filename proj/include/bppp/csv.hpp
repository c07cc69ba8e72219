// csv.hpp
// Minimal reader/writer for the dated panel format: first column `date` as
// YYYYMM, one series per remaining column, empty cells for missing values,
// header row required, UTF-8.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bppp/types.hpp"

namespace bppp {

struct CsvTable {
    std::vector<std::string> columns;         // excludes the date column
    std::vector<MonthCode> dates;             // one per row
    std::vector<std::vector<double>> values;  // values[row][col], NaN = missing
};

// Throws DataError on malformed rows, duplicate dates or non-monotone dates.
CsvTable read_csv_table(const std::filesystem::path& path);

// Doubles are written with 17 significant digits so a write/read round trip
// is bit-exact. NaNs become empty cells.
void write_csv_table(const std::filesystem::path& path, const CsvTable& table);

std::string format_double(double v);

// Report tables without a date axis: header plus preformatted string cells.
void write_plain_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace bppp
