#include "bppp/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace bppp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

CsvTable read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path.string());

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_line(line);
    if (header.empty() || lower(trim(header[0])) != "date")
        throw DataError("CSV header must start with a `date` column: " + path.string());
    for (size_t c = 1; c < header.size(); ++c) table.columns.push_back(trim(header[c]));

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));

        const std::string date_str = trim(cells[0]);
        char* end = nullptr;
        const long date_long = std::strtol(date_str.c_str(), &end, 10);
        if (date_str.empty() || *end != '\0' || !is_valid_month(static_cast<int>(date_long)))
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid date `" + date_str + "`");
        const MonthCode date = static_cast<MonthCode>(date_long);
        if (!table.dates.empty()) {
            if (date == table.dates.back())
                throw DataError(path.string() + ": duplicate date " + std::to_string(date));
            if (date < table.dates.back())
                throw DataError(path.string() + ": non-monotone date " + std::to_string(date) + " after " +
                                std::to_string(table.dates.back()));
        }
        table.dates.push_back(date);

        std::vector<double> row(header.size() - 1);
        for (size_t c = 1; c < header.size(); ++c) {
            const std::string cell = trim(cells[c]);
            if (cell.empty()) {
                row[c - 1] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (*end != '\0')
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad number `" + cell + "`");
            row[c - 1] = v;
        }
        table.values.push_back(std::move(row));
    }
    return table;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_plain_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV file: " + path.string());
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
}

void write_csv_table(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV file: " + path.string());
    out << "date";
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
    for (size_t r = 0; r < table.dates.size(); ++r) {
        out << table.dates[r];
        for (size_t c = 0; c < table.columns.size(); ++c) {
            out << ',';
            const double v = table.values[r][c];
            if (!std::isnan(v)) out << format_double(v);
        }
        out << '\n';
    }
}

}  // namespace bppp
