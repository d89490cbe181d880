#include "design.hpp"

#include <cmath>

#include "errors.hpp"

namespace dra {

namespace {

int require_column(const AnalyticDataset& data, const std::string& name) {
    int c = data.column_ci(name);
    if (c < 0)
        throw ConfigError("variable '" + name + "' not found in dataset of partner " +
                          std::to_string(data.partner_id));
    return c;
}

double checked_value(const AnalyticDataset& data, int col, size_t row) {
    double v = data.data[static_cast<size_t>(col)][row];
    if (std::isnan(v))
        throw DataError("missing value at row " + std::to_string(row + 1) +
                        " column " + data.columns[static_cast<size_t>(col)] +
                        " (partner " + std::to_string(data.partner_id) + ")");
    return v;
}

}  // namespace

DesignMatrix build_design(const AnalyticDataset& data, const ModelSpec& spec) {
    DesignMatrix dm;
    dm.labels = spec.design_labels();

    std::vector<int> cov_cols;
    cov_cols.reserve(spec.independent_vars.size());
    for (auto& v : spec.independent_vars) cov_cols.push_back(require_column(data, v));
    int dep_col = require_column(data, spec.dependent_var);
    int freq_col = spec.freq_var.empty() ? -1 : require_column(data, spec.freq_var);
    int weight_col = spec.weight_var.empty() ? -1 : require_column(data, spec.weight_var);

    const int p = static_cast<int>(dm.labels.size());
    const int offset = spec.no_intercept ? 0 : 1;
    dm.rows.reserve(data.n_rows);
    dm.outcomes.reserve(data.n_rows);

    for (size_t r = 0; r < data.n_rows; ++r) {
        DesignRow row;
        row.z.resize(p);
        if (!spec.no_intercept) row.z[0] = 1.0;
        for (size_t c = 0; c < cov_cols.size(); ++c)
            row.z[offset + static_cast<int>(c)] = checked_value(data, cov_cols[c], r);

        row.freq = freq_col < 0 ? 1.0 : checked_value(data, freq_col, r);
        if (row.freq < 0 || row.freq != std::floor(row.freq))
            throw DataError("freq must be a nonnegative integer, got " +
                            std::to_string(row.freq) + " at row " + std::to_string(r + 1));
        row.weight = weight_col < 0 ? 1.0 : checked_value(data, weight_col, r);
        if (!(row.weight >= 0) || !std::isfinite(row.weight))
            throw DataError("weight must be nonnegative at row " + std::to_string(r + 1));
        row.effective_weight = row.weight * row.freq;

        double y = checked_value(data, dep_col, r);
        if (spec.family == Family::logistic && y != 0.0 && y != 1.0)
            throw DataError("logistic outcome must be 0 or 1, got " +
                            std::to_string(y) + " at row " + std::to_string(r + 1));

        dm.n_effective += row.freq;
        dm.rows.push_back(std::move(row));
        dm.outcomes.push_back(y);
    }
    return dm;
}

}  // namespace dra
