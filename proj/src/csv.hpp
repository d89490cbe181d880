#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dra {

// All numeric payloads are serialized with 17 significant digits so that
// 64-bit floats survive a write/parse round trip bit-exactly.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& context);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;               // -1 if absent
    int column_ci(const std::string& name) const;            // case-insensitive
    const std::string& at(size_t row, int col) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

// Writers reject cells containing comma, quote, CR or LF: the exchange
// formats are pinned as quoting-free CSV.
std::string csv_line(const std::vector<std::string>& cells);
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);

}  // namespace dra
