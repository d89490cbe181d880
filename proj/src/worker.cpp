#include "worker.hpp"

#include <cmath>

#include "csv.hpp"
#include "errors.hpp"
#include "sscp.hpp"

namespace fs = std::filesystem;

namespace dra {

std::string serialize_beta(const std::vector<std::string>& labels,
                           const Eigen::VectorXd& beta) {
    if (static_cast<size_t>(beta.size()) != labels.size())
        throw ConfigError("coefficient vector length does not match labels");
    std::string out = csv_line(labels);
    std::vector<std::string> cells;
    for (int j = 0; j < beta.size(); ++j) cells.push_back(format_double(beta(j)));
    out += csv_line(cells);
    return out;
}

Eigen::VectorXd parse_beta(std::string_view bytes, const std::vector<std::string>& labels,
                           const std::string& context) {
    CsvTable t = parse_csv(bytes);
    if (t.rows.size() != 1)
        throw ProtocolError(context + ": coefficient file must have exactly one row");
    Eigen::VectorXd beta(static_cast<int>(labels.size()));
    for (size_t j = 0; j < labels.size(); ++j) {
        int c = t.column_ci(labels[j]);
        if (c < 0)
            throw ProtocolError(context + ": coefficient file is missing column '" +
                                labels[j] + "'");
        beta(static_cast<int>(j)) = parse_double(t.rows[0][static_cast<size_t>(c)], context);
    }
    return beta;
}

WorkerConfig parse_worker_config(const std::string& path) {
    WorkerConfig cfg;
    std::string text = read_text_file(path);
    size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key=value");
        std::string key = to_lower(line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1));
        std::string value = line.substr(eq + 1);
        auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        if (key == "dp_cd") cfg.dp_cd = std::stoi(value);
        else if (key == "data_in_dir") cfg.data_in_dir = value;
        else if (key == "min_count_per_grp") cfg.min_count_per_grp = std::stol(value);
        else throw ConfigError(path + ": unknown worker parameter '" + key + "'");
    }
    if (cfg.dp_cd <= 0 || cfg.dp_cd > 999)
        throw ConfigError(path + ": dp_cd must be positive with at most 3 digits");
    if (cfg.data_in_dir.empty())
        throw ConfigError(path + ": data_in_dir is required");
    return cfg;
}

namespace {

struct WorkingColumns {
    std::vector<double> y_tilde;
    std::vector<double> w_tilde;
};

WorkingColumns working_columns(const DesignMatrix& design, const FamilySpec& family,
                               const Eigen::VectorXd& beta) {
    WorkingColumns cols;
    cols.y_tilde.reserve(design.rows.size());
    cols.w_tilde.reserve(design.rows.size());
    for (size_t i = 0; i < design.rows.size(); ++i) {
        WorkingRecord rec =
            working_transform(family, design.rows[i], design.outcomes[i], beta);
        cols.y_tilde.push_back(rec.y_tilde);
        cols.w_tilde.push_back(rec.w_tilde);
    }
    return cols;
}

SscpMatrix working_sscp(const DesignMatrix& design, const ModelSpec& spec,
                        const Eigen::VectorXd& beta) {
    WorkingColumns cols = working_columns(design, spec.family_spec(), beta);
    SscpMatrix m = local_sscp(design.rows, cols.y_tilde, cols.w_tilde);
    m.labels = spec.design_labels();
    m.labels.push_back(spec.dependent_var);
    return m;
}

}  // namespace

std::vector<NamedFile> iteration_payload(const DesignMatrix& design, const ModelSpec& spec,
                                         const Eigen::VectorXd& beta, int dp_cd) {
    SscpMatrix m = working_sscp(design, spec, beta);
    SiteStatContribution stats =
        compute_site_stats(design, spec.family_spec(), beta, dp_cd);
    return {{kSscpFile, serialize_sscp(m)},
            {kSiteStatsFile, serialize_site_stats(stats)}};
}

std::vector<NamedFile> final_payload(const DesignMatrix& design, const ModelSpec& spec,
                                     const Eigen::VectorXd& beta_hat, double phi,
                                     long min_count, int dp_cd,
                                     std::vector<ScoredRow>* scored_out) {
    const FamilySpec family = spec.family_spec();

    SscpMatrix m = working_sscp(design, spec, beta_hat);

    std::vector<double> wh(design.rows.size());
    for (size_t i = 0; i < design.rows.size(); ++i)
        wh[i] = robust_weight(family, design.rows[i], design.outcomes[i], beta_hat, phi);
    SscpMatrix robust = design_sscp(design.rows, wh);
    robust.labels = spec.design_labels();

    SiteStatContribution stats = compute_site_stats(design, family, beta_hat, dp_cd);

    std::vector<ScoredRow> scored;
    scored.reserve(design.rows.size());
    for (size_t i = 0; i < design.rows.size(); ++i) {
        const DesignRow& row = design.rows[i];
        FamilyEval e = family_eval(family, beta_hat.dot(row.z));
        ScoredRow s;
        s.mu = e.mu;
        s.outcome = design.outcomes[i];
        s.resid = s.outcome - s.mu;
        s.variance = family.is_linear() ? phi : e.v;
        s.freq = row.freq;
        scored.push_back(s);
    }
    if (scored_out) *scored_out = scored;

    BinningPolicy pct_policy{spec.groups, min_count, spec.max_numb_of_grp};
    BinningPolicy pct2_policy{
        groups_from_min_count(design.n_effective, min_count, spec.max_numb_of_grp),
        min_count, spec.max_numb_of_grp};

    auto bins_pct = residual_summary(scored, pct_policy, dp_cd, family);
    auto bins_pct2 = residual_summary(scored, pct2_policy, dp_cd, family);

    return {{kSscpFile, serialize_sscp(m)},
            {kRobustSscpFile, serialize_sscp(robust)},
            {kSiteStatsFinalFile, serialize_site_stats(stats)},
            {kBinsPctFile, serialize_bin_summaries(bins_pct)},
            {kBinsPct2File, serialize_bin_summaries(bins_pct2)}};
}

WorkerSession::WorkerSession(WorkerConfig config) : config_(std::move(config)) {}

Envelope WorkerSession::handle(const Envelope& broadcast) {
    ParamSet params = decode_params(broadcast.bytes(kParamsFile));
    if (!spec_) {
        spec_ = spec_from_params(params);
        std::string name = spec_->reg_ds_in;
        if (spec_->test_env_cd != 0) name += "_" + std::to_string(config_.dp_cd);
        fs::path data_path = config_.data_in_dir / (name + ".csv");
        data_ = load_analytic_csv(data_path.string(), config_.dp_cd);
        design_ = build_design(*data_, *spec_);
    }
    const ModelSpec& spec = *spec_;
    Eigen::VectorXd beta =
        parse_beta(broadcast.bytes(kBetaFile), spec.design_labels(),
                   "partner " + std::to_string(config_.dp_cd));

    Envelope out;
    out.iteration = broadcast.iteration;
    if (params.get("end_job_dp_in") == "1") {
        double phi = parse_double(params.get_or("phi_in", "1"), "phi_in");
        long min_count = config_.min_count_per_grp > 0 ? config_.min_count_per_grp
                                                       : spec.min_count_per_grp_glob;
        std::vector<ScoredRow> scored;
        out.files = final_payload(*design_, spec, beta, phi, min_count, config_.dp_cd,
                                  &scored);
        // The individual-level scored dataset stays local.
        if (!config_.dplocal_dir.empty()) {
            fs::create_directories(config_.dplocal_dir);
            std::string csv = csv_line({"PRED", "RESID", "VAR_MU", "freq", spec.dependent_var});
            for (auto& s : scored)
                csv += csv_line({format_double(s.mu), format_double(s.resid),
                                 format_double(s.variance), format_double(s.freq),
                                 format_double(s.outcome)});
            write_text_file(
                (config_.dplocal_dir / (spec.run_id + "_reg_ds_out.csv")).string(), csv);
        }
        finished_ = true;
    } else {
        out.files = iteration_payload(*design_, spec, beta, config_.dp_cd);
    }
    return out;
}

int run_worker(const WorkerConfig& config, WorkerLink& link) {
    try {
        WorkerSession session(config);
        while (!session.finished()) {
            Envelope in = link.await_broadcast();
            Envelope out = session.handle(in);
            link.publish(out);
        }
        link.terminal(true);
        return 0;
    } catch (const std::exception& e) {
        if (!config.dplocal_dir.empty()) {
            try {
                fs::create_directories(config.dplocal_dir);
                write_text_file((config.dplocal_dir / "job_fail_diagnostic.txt").string(),
                                std::string(e.what()) + "\n");
            } catch (...) {
            }
        }
        try {
            link.terminal(false);
        } catch (...) {
        }
        if (dynamic_cast<const ProtocolError*>(&e)) return 3;
        return 4;
    }
}

}  // namespace dra
