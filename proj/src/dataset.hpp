#pragma once

#include <string>
#include <vector>

namespace dra {

// Rectangular per-site analytic table. Values are parsed up front; empty
// cells become NaN and are rejected later if a used column touches them.
struct AnalyticDataset {
    int partner_id = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // column-major, data[c][r]
    size_t n_rows = 0;

    int column_ci(const std::string& name) const;  // -1 if absent
};

AnalyticDataset load_analytic_csv(const std::string& path, int partner_id);

}  // namespace dra
