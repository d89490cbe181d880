#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dra {

// Payload file names exchanged between the parties.
inline constexpr const char* kBetaFile = "model_coeff_in.csv";
inline constexpr const char* kSscpFile = "sscp.csv";
inline constexpr const char* kSiteStatsFile = "site_stats.csv";
inline constexpr const char* kRobustSscpFile = "robust_sscp.csv";
inline constexpr const char* kSiteStatsFinalFile = "site_stats_final.csv";
inline constexpr const char* kBinsPctFile = "resid_sum_by_pct.csv";
inline constexpr const char* kBinsPct2File = "resid_sum_by_pct2.csv";

// Single-row coefficient table, one column per label (TYPE=PARM analog).
std::string serialize_beta(const std::vector<std::string>& labels,
                           const Eigen::VectorXd& beta);
Eigen::VectorXd parse_beta(std::string_view bytes, const std::vector<std::string>& labels,
                           const std::string& context);

}  // namespace dra
