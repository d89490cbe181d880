#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "family.hpp"

namespace dra {

// Labeled symmetric weighted cross-product matrix with an observation-count
// sidecar. The unit of exchange: additive across sites.
struct SscpMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;
    double n_obs = 0.0;        // sum of freq
    double sum_weights = 0.0;  // sum of the weights used
    int origin = -1;           // dp_cd for error attribution; -1 if n/a

    bool same_labels(const SscpMatrix& other) const { return labels == other.labels; }
};

// SSCP over the columns Z||y with entry (s,s') = sum_i w_i A_{i,s} A_{i,s'},
// accumulated in input-row order (plain summation, required for the
// sum-per-site-then-add bit parity; set compensated for Kahan summation).
SscpMatrix local_sscp(const std::vector<DesignRow>& rows, std::span<const double> y,
                      std::span<const double> w, bool compensated = false);

// SSCP over Z alone (robust/sandwich accumulation with w^H weights).
SscpMatrix design_sscp(const std::vector<DesignRow>& rows, std::span<const double> w);

// CSV wire format: header "_NAME_,<labels...>", one row per label, then
// "_NOBS_" and "_SUMWGT_" sidecar rows padded to full width.
std::string serialize_sscp(const SscpMatrix& m);
SscpMatrix parse_sscp(std::string_view bytes, const std::string& context);

}  // namespace dra
