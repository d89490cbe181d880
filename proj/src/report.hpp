#pragma once

#include <filesystem>
#include <string>

namespace dra {

// Renders <prefix>_report.txt plus plot-data CSVs (<prefix>_fig_roc.csv,
// <prefix>_fig_obs_vs_pred.csv) from the output datasets in msoc_dir.
// Missing required files raise a data error listing them by name.
void render_report(const std::filesystem::path& msoc_dir, const std::string& prefix,
                   const std::filesystem::path& out_dir);

}  // namespace dra
