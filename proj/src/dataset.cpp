#include "dataset.hpp"

#include <cmath>
#include <limits>

#include "csv.hpp"
#include "errors.hpp"

namespace dra {

int AnalyticDataset::column_ci(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (iequals(columns[i], name)) return static_cast<int>(i);
    return -1;
}

AnalyticDataset load_analytic_csv(const std::string& path, int partner_id) {
    CsvTable t = read_csv_file(path);
    AnalyticDataset ds;
    ds.partner_id = partner_id;
    ds.columns = t.header;
    ds.n_rows = t.rows.size();
    ds.data.assign(t.header.size(), std::vector<double>(ds.n_rows));
    for (size_t r = 0; r < ds.n_rows; ++r) {
        if (t.rows[r].size() != t.header.size())
            throw DataError(path + ": row " + std::to_string(r + 1) +
                            " has " + std::to_string(t.rows[r].size()) +
                            " fields, expected " + std::to_string(t.header.size()));
        for (size_t c = 0; c < t.header.size(); ++c) {
            const std::string& cell = t.rows[r][c];
            if (cell.empty() || cell == "." ) {
                ds.data[c][r] = std::numeric_limits<double>::quiet_NaN();
            } else {
                ds.data[c][r] = parse_double(
                    cell, path + " row " + std::to_string(r + 1) +
                              " column " + t.header[c]);
            }
        }
    }
    return ds;
}

}  // namespace dra
