#include "report.hpp"

#include <sstream>

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

namespace {

std::string pad(const std::string& s, size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size() + 1, ' ');
}

void render_table(std::ostringstream& os, const CsvTable& t) {
    std::vector<size_t> widths(t.header.size());
    for (size_t c = 0; c < t.header.size(); ++c) {
        widths[c] = t.header[c].size();
        for (auto& row : t.rows) widths[c] = std::max(widths[c], row[c].size());
    }
    for (size_t c = 0; c < t.header.size(); ++c) os << pad(t.header[c], widths[c]);
    os << '\n';
    for (auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) os << pad(row[c], widths[c]);
        os << '\n';
    }
    os << '\n';
}

}  // namespace

void render_report(const fs::path& msoc_dir, const std::string& prefix,
                   const fs::path& out_dir) {
    auto file = [&](const char* suffix) { return msoc_dir / (prefix + suffix); };

    std::vector<std::string> required = {"_convrg_status.csv", "_modelfit.csv",
                                         "_p_est.csv", "_p_est_hc.csv",
                                         "_resid_sum_by_pct.csv"};
    bool logistic = fs::exists(file("_roc.csv"));
    if (logistic) {
        required.push_back("_glob_null_chisq.csv");
        required.push_back("_hl_chisq.csv");
        required.push_back("_hl_partition.csv");
    } else if (fs::exists(file("_anova.csv"))) {
        required.push_back("_anova.csv");
    }
    std::string missing;
    for (auto& r : required)
        if (!fs::exists(file(r.c_str()))) missing += " " + prefix + r;
    if (!missing.empty())
        throw DataError("report input files missing:" + missing);

    std::ostringstream os;
    os << "Distributed regression results, run " << prefix << "\n";
    os << std::string(60, '=') << "\n\n";

    auto section = [&](const std::string& title, const char* suffix) {
        os << title << "\n" << std::string(title.size(), '-') << "\n";
        render_table(os, read_csv_file(file(suffix).string()));
    };

    section("Convergence status", "_convrg_status.csv");
    section("Model fit", "_modelfit.csv");
    if (!logistic && fs::exists(file("_anova.csv")))
        section("Analysis of variance", "_anova.csv");
    if (logistic) section("Global null hypothesis (likelihood ratio)", "_glob_null_chisq.csv");
    section("Parameter estimates", "_p_est_hc.csv");
    if (logistic) {
        section("Hosmer-Lemeshow test", "_hl_chisq.csv");
        section("Hosmer-Lemeshow partition", "_hl_partition.csv");
    }
    section("Residual summary by percentile bin", "_resid_sum_by_pct.csv");

    fs::create_directories(out_dir);
    write_text_file((out_dir / (prefix + "_report.txt")).string(), os.str());

    // Plot data: observed vs predicted per bin, and the ROC points.
    {
        CsvTable bins = read_csv_file(file("_resid_sum_by_pct.csv").string());
        std::string out = csv_line({"dp_cd", "PROB", "RESP_Mean", "Nobs"});
        int c_dp = bins.column("dp_cd"), c_prob = bins.column("PROB");
        int c_resp = bins.column("RESP_Mean"), c_n = bins.column("Nobs");
        for (size_t r = 0; r < bins.rows.size(); ++r)
            out += csv_line({bins.at(r, c_dp), bins.at(r, c_prob), bins.at(r, c_resp),
                             bins.at(r, c_n)});
        write_text_file((out_dir / (prefix + "_fig_obs_vs_pred.csv")).string(), out);
    }
    if (logistic) {
        CsvTable roc = read_csv_file(file("_roc.csv").string());
        std::string out = csv_line({"_1MSPEC_", "_SENSIT_", "_AUC_"});
        int c_x = roc.column("_1MSPEC_"), c_y = roc.column("_SENSIT_");
        int c_auc = roc.column("_AUC_");
        for (size_t r = 0; r < roc.rows.size(); ++r)
            out += csv_line({roc.at(r, c_x), roc.at(r, c_y), roc.at(r, c_auc)});
        write_text_file((out_dir / (prefix + "_fig_roc.csv")).string(), out);
    }
}

}  // namespace dra
