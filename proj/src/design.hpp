#pragma once

#include <vector>

#include "dataset.hpp"
#include "family.hpp"
#include "model_spec.hpp"

namespace dra {

struct DesignMatrix {
    std::vector<std::string> labels;  // Intercept? + covariates, in spec order
    std::vector<DesignRow> rows;
    std::vector<double> outcomes;
    double n_effective = 0.0;  // sum of freq
};

// Extracts the design from an analytic dataset: intercept column of exact
// 1s unless NOINT, effective_weight = weight * freq. Column names are
// matched case-insensitively. Missing variables are configuration errors;
// NaN in a used column is a data error naming row and column.
DesignMatrix build_design(const AnalyticDataset& data, const ModelSpec& spec);

}  // namespace dra
