#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace dra {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view text, const std::string& context) {
    if (text.empty())
        throw DataError("empty numeric field in " + context);
    std::string tmp(text);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size())
        throw DataError("invalid numeric value '" + tmp + "' in " + context);
    return v;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::column_ci(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (iequals(header[i], name)) return static_cast<int>(i);
    return -1;
}

const std::string& CsvTable::at(size_t row, int col) const {
    return rows.at(row).at(static_cast<size_t>(col));
}

namespace {

std::vector<std::string> parse_line(std::string_view line, size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw DataError("unterminated quote on CSV line " + std::to_string(line_no));
    cells.push_back(cur);
    return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty() && pos >= text.size()) break;  // trailing newline
        auto cells = parse_line(line, line_no);
        if (line_no == 1)
            t.header = std::move(cells);
        else
            t.rows.push_back(std::move(cells));
    }
    if (t.header.empty())
        throw DataError("CSV input has no header row");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    try {
        return parse_csv(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        const std::string& c = cells[i];
        if (c.find_first_of(",\"\r\n") != std::string::npos)
            throw ProtocolError("CSV cell contains a forbidden character: '" + c + "'");
        if (i) out += ',';
        out += c;
    }
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw ProtocolError("cannot open for writing: " + path);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os)
        throw ProtocolError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw DataError("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace dra
