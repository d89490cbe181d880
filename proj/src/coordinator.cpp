#include "coordinator.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string partner_ctx(int dp_cd) { return "partner " + std::to_string(dp_cd); }

SscpMatrix parse_partner_sscp(const Envelope& env, const char* name, int dp_cd,
                              const std::vector<std::string>& expected_labels) {
    SscpMatrix m = parse_sscp(env.bytes(name), partner_ctx(dp_cd));
    m.origin = dp_cd;
    if (m.labels != expected_labels)
        throw ProtocolError(partner_ctx(dp_cd) + " sent SSCP columns that do not match the request");
    return m;
}

// Serialized cell: NaN renders as an empty field (sentinel).
std::string cell(double v) { return std::isnan(v) ? "" : format_double(v); }

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& m) {
    std::vector<std::string> header;
    header.push_back("_NAME_");
    header.insert(header.end(), labels.begin(), labels.end());
    std::string out = csv_line(header);
    for (size_t r = 0; r < labels.size(); ++r) {
        std::vector<std::string> cells;
        cells.push_back(labels[r]);
        for (size_t c = 0; c < labels.size(); ++c)
            cells.push_back(format_double(m(static_cast<int>(r), static_cast<int>(c))));
        out += csv_line(cells);
    }
    write_text_file(path.string(), out);
}

}  // namespace

Eigen::VectorXd initial_beta(const ModelSpec& spec, const fs::path& infolder) {
    const auto labels = spec.design_labels();
    if (spec.tbl_initial_est.empty())
        return Eigen::VectorXd::Zero(static_cast<int>(labels.size()));
    std::vector<fs::path> candidates = {
        infolder / spec.tbl_initial_est, infolder / (spec.tbl_initial_est + ".csv"),
        fs::path(spec.tbl_initial_est), fs::path(spec.tbl_initial_est + ".csv")};
    for (auto& c : candidates)
        if (fs::exists(c))
            return parse_beta(read_text_file(c.string()), labels, c.string());
    throw ConfigError("tbl_intial_est file not found: " + spec.tbl_initial_est);
}

FitOutputs run_coordinator(const ModelSpec& spec, CoordinatorLink& link,
                           const Eigen::VectorXd& beta0, IterationState* trace,
                           const fs::path* dplocal) {
    const FamilySpec family = spec.family_spec();
    const auto labels = spec.design_labels();
    const int p = spec.param_count();
    if (beta0.size() != static_cast<int>(labels.size()))
        throw ConfigError("initial coefficient vector length does not match the model");
    if (spec.dp_cd_list.empty())
        throw ConfigError("dp_cd_list must name at least one partner");

    std::vector<int> partners = spec.dp_cd_list;
    std::sort(partners.begin(), partners.end());

    std::vector<std::string> sscp_labels = labels;
    sscp_labels.push_back(spec.dependent_var);

    IterationState state;
    state.beta = beta0;
    state.history.push_back({0, beta0, kNaN});
    auto sync_trace = [&] {
        if (trace) *trace = state;
    };
    sync_trace();

    std::vector<double> frozen_n(partners.size(), -1.0);

    auto broadcast = [&](int iter_nb, bool last, double phi, const Eigen::VectorXd& beta) {
        Envelope env;
        env.iteration = iter_nb;
        env.files.emplace_back(kParamsFile,
                               encode_params(spec_to_params(spec, iter_nb, last, phi)));
        env.files.emplace_back(kBetaFile, serialize_beta(labels, beta));
        link.broadcast(env);
    };

    auto collect = [&](int iter_nb) {
        std::vector<Envelope> envs;
        for (size_t k = 0; k < partners.size(); ++k) {
            Envelope env = link.await_worker(partners[k]);
            env.iteration = iter_nb;
            envs.push_back(std::move(env));
        }
        return envs;
    };

    auto check_frozen = [&](size_t k, double n_obs) {
        if (frozen_n[k] < 0) {
            frozen_n[k] = n_obs;
        } else if (frozen_n[k] != n_obs) {
            throw ProtocolError(partner_ctx(partners[k]) +
                                " changed its observation count between iterations"
                                " (data must be frozen for the run)");
        }
    };

    SscpMatrix combined;
    WlsSolution sol;
    bool have_solution = false;

    for (int m = 1; m <= spec.max_iter_nb && !state.converged; ++m) {
        broadcast(m, false, 1.0, state.beta);
        std::vector<Envelope> envs = collect(m);
        std::vector<SscpMatrix> parts;
        for (size_t k = 0; k < partners.size(); ++k) {
            SscpMatrix part = parse_partner_sscp(envs[k], kSscpFile, partners[k], sscp_labels);
            SiteStatContribution stats =
                parse_site_stats(envs[k].bytes(kSiteStatsFile), partner_ctx(partners[k]));
            if (stats.dp_cd != partners[k])
                throw ProtocolError(partner_ctx(partners[k]) +
                                    " payload carries a different dp_cd");
            check_frozen(k, part.n_obs);
            parts.push_back(std::move(part));
        }
        combined = combine_sscp(parts);
        if (dplocal)
            write_text_file(
                (*dplocal / ("combined_sscp_iter_" + std::to_string(m) + ".csv")).string(),
                serialize_sscp(combined));

        sol = solve_wls(combined);
        have_solution = true;
        ConvergenceCheck chk = check_convergence(state.beta, sol.beta, spec.xconv);
        state.iteration = m;
        state.deltas = chk.deltas;
        state.beta = sol.beta;
        state.history.push_back({m, sol.beta, chk.max_abs_delta});
        // Linear regression solves exactly: converged at the first
        // iteration without consulting XCONV.
        state.converged = family.is_linear() || chk.converged;
        sync_trace();
    }
    if (!state.converged) {
        (void)have_solution;
        throw ConvergenceError("no convergence within max_iter_nb=" +
                               std::to_string(spec.max_iter_nb) + " iterations (last max|delta|=" +
                               format_double(state.history.back().max_abs_delta) + ")");
    }

    const Eigen::VectorXd beta_hat = state.beta;
    const double n_total = combined.n_obs;
    if (!(n_total > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    const double phi = estimate_dispersion(family, sol.sse_working, n_total, p);

    // One extra exchange at beta_hat for Z'W(beta_hat)Z, the robust SSCP,
    // site statistics and bin summaries.
    const int final_iter = state.iteration + 1;
    broadcast(final_iter, true, phi, beta_hat);
    std::vector<Envelope> envs = collect(final_iter);

    std::vector<SscpMatrix> final_parts, robust_parts;
    std::vector<SiteStatContribution> site_stats;
    std::vector<BinSummary> bins_pct, bins_pct2;
    for (size_t k = 0; k < partners.size(); ++k) {
        const int dp = partners[k];
        SscpMatrix part = parse_partner_sscp(envs[k], kSscpFile, dp, sscp_labels);
        check_frozen(k, part.n_obs);
        final_parts.push_back(std::move(part));
        SscpMatrix rob = parse_partner_sscp(envs[k], kRobustSscpFile, dp, labels);
        robust_parts.push_back(std::move(rob));
        site_stats.push_back(
            parse_site_stats(envs[k].bytes(kSiteStatsFinalFile), partner_ctx(dp)));
        for (auto& b : parse_bin_summaries(envs[k].bytes(kBinsPctFile), partner_ctx(dp)))
            bins_pct.push_back(b);
        for (auto& b : parse_bin_summaries(envs[k].bytes(kBinsPct2File), partner_ctx(dp)))
            bins_pct2.push_back(b);
    }

    SscpMatrix final_combined = combine_sscp(final_parts);
    if (dplocal)
        write_text_file((*dplocal / "combined_sscp_final.csv").string(),
                        serialize_sscp(final_combined));

    FitOutputs out;
    out.family = spec.family;
    out.labels = labels;
    out.beta = beta_hat;
    out.iterations = state;
    out.n_obs = n_total;
    out.p = p;

    // Covariances. The linear working SSCP does not depend on beta, so the
    // solve-time inverse is the final one; logistic needs the extra solve.
    Eigen::MatrixXd xpx_inverse;
    if (family.is_linear()) {
        xpx_inverse = sol.xpx_inverse;
        out.condition_number = condition_diagnostic(combined);
    } else {
        WlsSolution final_sol = solve_wls(final_combined);
        xpx_inverse = final_sol.xpx_inverse;
        out.condition_number = condition_diagnostic(final_combined);
    }
    Eigen::MatrixXd model_cov = model_covariance(xpx_inverse, phi);
    SscpMatrix i1 = combine_sscp(robust_parts);
    i1.values *= n_total / (n_total - p);
    Eigen::MatrixXd robust_cov = robust_covariance(model_cov, i1, n_total, p);

    out.cov.model_cov = model_cov;
    out.cov.robust_cov = robust_cov;
    out.cov.xpx_inverse = xpx_inverse;
    out.cov.dispersion = phi;
    out.cov.sigma2_hat = family.is_linear() ? phi : 0.0;

    out.totals = add_site_stats(site_stats);
    if (out.totals.sum_freq != n_total)
        throw ProtocolError("site statistics and SSCP sidecars disagree on N");
    out.ybar = out.totals.sum_y / out.totals.sum_w;

    if (family.is_linear()) {
        out.sse = out.totals.sse_local;
        out.sse1 = out.totals.sum_y_sq - out.totals.sum_y * out.totals.sum_y / out.totals.sum_w;
        out.fit = linear_fit_stats(out.sse, out.sse1, n_total, p, phi, !spec.no_intercept,
                                   out.ybar);
        if (!spec.no_intercept && p >= 2)
            out.anova = anova_table(out.sse, out.sse1, n_total, p);
    } else {
        out.loglik = out.totals.loglik_local;
        out.fit = logistic_fit_stats(out.loglik, n_total, p, out.ybar);
        out.global_null = global_null_test(
            out.loglik, loglik_null(n_total, out.ybar),
            static_cast<int>(spec.independent_vars.size()));
    }

    out.inference = inference_table(labels, beta_hat, model_cov, robust_cov, spec.alpha,
                                    family, n_total, p);

    sort_bin_summaries(bins_pct);
    sort_bin_summaries(bins_pct2);
    out.bins_pct = std::move(bins_pct);
    out.bins_pct2 = std::move(bins_pct2);

    if (!family.is_linear()) {
        out.roc = roc_curve(out.bins_pct2);
        std::vector<PseudoRecord> records;
        for (auto& b : out.bins_pct2)
            for (auto& r : hl_expand(b)) records.push_back(r);
        out.hl = hl_test(std::move(records), spec.groups);
    }
    return out;
}

void emit_outputs(const FitOutputs& out, const fs::path& msoc_dir, const std::string& prefix) {
    fs::create_directories(msoc_dir);
    auto path = [&](const char* name) { return msoc_dir / (prefix + name); };

    // Parameter estimate tables (model-only and with the robust triple).
    {
        std::string pe = csv_line({"Variable", "DF", "Estimate", "Std_Err", "P_Value",
                                   "Lower_CL", "Upper_CL"});
        std::string pehc = csv_line({"Variable", "DF", "Estimate", "Std_Err", "P_Value",
                                     "Lower_CL", "Upper_CL", "HC_Std_Err", "HC_P_Value",
                                     "HC_Lower_CL", "HC_Upper_CL"});
        for (auto& r : out.inference) {
            pe += csv_line({r.variable, "1", cell(r.estimate), cell(r.std_err),
                            cell(r.p_value), cell(r.lower_cl), cell(r.upper_cl)});
            pehc += csv_line({r.variable, "1", cell(r.estimate), cell(r.std_err),
                              cell(r.p_value), cell(r.lower_cl), cell(r.upper_cl),
                              cell(r.robust_std_err), cell(r.robust_p_value),
                              cell(r.robust_lower_cl), cell(r.robust_upper_cl)});
        }
        write_text_file(path("_p_est.csv").string(), pe);
        write_text_file(path("_p_est_hc.csv").string(), pehc);
    }

    write_matrix_csv(path("_cov_est.csv"), out.labels, out.cov.model_cov);
    write_matrix_csv(path("_hc_cov.csv"), out.labels, out.cov.robust_cov);
    write_matrix_csv(path("_invxpx.csv"), out.labels, out.cov.xpx_inverse);

    {
        std::string mf = csv_line({"Criterion", "Value"});
        for (auto& [name, value] : out.fit.measures)
            mf += csv_line({name, format_double(value)});
        mf += csv_line({"Condition_Number", format_double(out.condition_number)});
        write_text_file(path("_modelfit.csv").string(), mf);
    }

    write_text_file(path("_model_coeff.csv").string(),
                    serialize_beta(out.labels, out.beta));

    {
        std::vector<std::string> header = {"Iteration", "Max_Abs_Delta"};
        header.insert(header.end(), out.labels.begin(), out.labels.end());
        std::string hist = csv_line(header);
        for (auto& rec : out.iterations.history) {
            std::vector<std::string> cells = {std::to_string(rec.iteration),
                                              cell(rec.max_abs_delta)};
            for (int j = 0; j < rec.beta.size(); ++j)
                cells.push_back(format_double(rec.beta(j)));
            hist += csv_line(cells);
        }
        write_text_file(path("_iter_params_hist.csv").string(), hist);
    }

    {
        std::string cs = csv_line({"Status", "Converged", "Iterations", "Reason"});
        cs += csv_line({"0", "1", std::to_string(out.iterations.iteration),
                        "XCONV convergence criterion satisfied"});
        write_text_file(path("_convrg_status.csv").string(), cs);
    }

    if (out.global_null) {
        std::string gn = csv_line({"Test", "Chi_Square", "DF", "P_Value"});
        gn += csv_line({"Likelihood Ratio", format_double(out.global_null->chi_sq),
                        format_double(out.global_null->df),
                        format_double(out.global_null->p_value)});
        write_text_file(path("_glob_null_chisq.csv").string(), gn);
    }

    if (out.anova) {
        const AnovaTable& a = *out.anova;
        std::string an = csv_line({"Source", "DF", "Sum_of_Squares", "Mean_Square",
                                   "F_Value", "P_Value"});
        an += csv_line({"Model", format_double(a.model_df), format_double(a.model_ss),
                        format_double(a.model_ms), format_double(a.f_value),
                        format_double(a.p_value)});
        an += csv_line({"Error", format_double(a.error_df), format_double(a.error_ss),
                        format_double(a.error_ms), "", ""});
        an += csv_line({"Corrected Total", format_double(a.total_df),
                        format_double(a.total_ss), "", "", ""});
        write_text_file(path("_anova.csv").string(), an);
    }

    {
        const SiteStatContribution& t = out.totals;
        std::string rs = csv_line({"Measure", "Value"});
        rs += csv_line({"Nobs", format_double(t.sum_freq)});
        rs += csv_line({"Sum_Weight", format_double(t.sum_w)});
        rs += csv_line({"Mean_Y", format_double(out.ybar)});
        rs += csv_line({"Mean_Pred", format_double(t.sum_mu / t.sum_freq)});
        rs += csv_line({"Mean_Resid", format_double(t.sum_resid / t.sum_freq)});
        rs += csv_line({"Mean_Resid_Sq", format_double(t.sum_resid_sq / t.sum_freq)});
        if (out.family == Family::linear)
            rs += csv_line({"SSE", format_double(out.sse)});
        else
            rs += csv_line({"Log_Likelihood", format_double(out.loglik)});
        write_text_file(path("_resid_sum.csv").string(), rs);
    }

    write_text_file(path("_resid_sum_by_pct.csv").string(),
                    serialize_bin_summaries(out.bins_pct));
    write_text_file(path("_resid_sum_by_pct2.csv").string(),
                    serialize_bin_summaries(out.bins_pct2));

    if (out.roc) {
        std::string roc = csv_line({"_PROB_", "_POS_", "_NEG_", "_FALPOS_", "_FALNEG_",
                                    "_SENSIT_", "_1MSPEC_", "_AUC_"});
        for (auto& pt : out.roc->points)
            roc += csv_line({format_double(pt.prob), format_double(pt.pos),
                             format_double(pt.neg), format_double(pt.falpos),
                             format_double(pt.falneg), format_double(pt.sensit),
                             format_double(pt.one_minus_spec), format_double(out.roc->auc)});
        write_text_file(path("_roc.csv").string(), roc);
    }

    if (out.hl) {
        std::string hc = csv_line({"Chi_Square", "DF", "Value_DF", "P_Value"});
        hc += csv_line({format_double(out.hl->chi_sq), format_double(out.hl->df),
                        format_double(out.hl->df > 0 ? out.hl->chi_sq / out.hl->df : 0.0),
                        format_double(out.hl->p_value)});
        write_text_file(path("_hl_chisq.csv").string(), hc);

        std::string hp = csv_line({"Group", "Total", "Prob_Mean", "Resp_Mean",
                                   "Event_Obs", "Event_Exp", "Nonevent_Obs",
                                   "Nonevent_Exp"});
        for (auto& g : out.hl->partition)
            hp += csv_line({std::to_string(g.group), format_double(g.total),
                            format_double(g.prob_mean), format_double(g.resp_mean),
                            format_double(g.obs_events), format_double(g.exp_events),
                            format_double(g.obs_nonevents), format_double(g.exp_nonevents)});
        write_text_file(path("_hl_partition.csv").string(), hp);
    }
}

namespace {

// Failure reasons flow into CSV cells; strip the characters the pinned
// quoting-free format forbids.
std::string sanitize_reason(std::string reason) {
    for (char& c : reason)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ';';
    return reason;
}

}  // namespace

void emit_failure(const IterationState& trace, const ModelSpec& spec,
                  const std::string& reason, const fs::path& msoc_dir) {
    fs::create_directories(msoc_dir);
    auto path = [&](const char* name) { return msoc_dir / (spec.run_id + name); };
    std::string cs = csv_line({"Status", "Converged", "Iterations", "Reason"});
    cs += csv_line({"1", trace.converged ? "1" : "0", std::to_string(trace.iteration),
                    sanitize_reason(reason)});
    write_text_file(path("_convrg_status.csv").string(), cs);

    std::vector<std::string> header = {"Iteration", "Max_Abs_Delta"};
    auto labels = spec.design_labels();
    header.insert(header.end(), labels.begin(), labels.end());
    std::string hist = csv_line(header);
    for (auto& rec : trace.history) {
        std::vector<std::string> cells = {std::to_string(rec.iteration),
                                          cell(rec.max_abs_delta)};
        for (int j = 0; j < rec.beta.size(); ++j)
            cells.push_back(format_double(rec.beta(j)));
        hist += csv_line(cells);
    }
    write_text_file(path("_iter_params_hist.csv").string(), hist);
}

int drive_coordinator(const ModelSpec& spec, CoordinatorLink& link,
                      const fs::path& msoc_dir, const Eigen::VectorXd& beta0,
                      const fs::path* dplocal) {
    IterationState trace;
    auto fail = [&](const std::string& reason, int code) {
        // The stop parameters go out on a caught error as well, so waiting
        // partners exit instead of running into their own deadlines.
        // Best effort: a partner inbox may be undrained.
        try {
            if (!trace.history.empty()) {
                Envelope stop;
                stop.iteration = trace.iteration + 1;
                stop.files.emplace_back(
                    kParamsFile,
                    encode_params(spec_to_params(spec, stop.iteration, true, 1.0)));
                stop.files.emplace_back(
                    kBetaFile, serialize_beta(spec.design_labels(), trace.history.back().beta));
                link.broadcast(stop);
            }
        } catch (...) {
        }
        try {
            emit_failure(trace, spec, reason, msoc_dir);
            link.terminal(false);
        } catch (...) {
        }
        return code;
    };
    try {
        FitOutputs out = run_coordinator(spec, link, beta0, &trace, dplocal);
        if (out.condition_number > kConditionWarning)
            std::fprintf(stderr,
                         "warning: cross-product condition number %.3g exceeds %.0e; "
                         "covariates are near-collinear\n",
                         out.condition_number, kConditionWarning);
        emit_outputs(out, msoc_dir, spec.run_id);
        link.terminal(true);
        return 0;
    } catch (const ConvergenceError& e) {
        return fail(e.what(), 2);
    } catch (const ProtocolError& e) {
        return fail(e.what(), 3);
    } catch (const DataError& e) {
        return fail(e.what(), 4);
    } catch (const ConfigError& e) {
        return fail(e.what(), 4);
    } catch (const NumericalError& e) {
        return fail(e.what(), 4);
    }
}

}  // namespace dra
