#include "oracle.hpp"

#include <limits>

#include "design.hpp"
#include "errors.hpp"

namespace dra {

FitOutputs pooled_fit(const AnalyticDataset& data, const ModelSpec& spec,
                      const Eigen::VectorXd& beta0) {
    const FamilySpec family = spec.family_spec();
    const auto labels = spec.design_labels();
    const int p = spec.param_count();
    if (beta0.size() != static_cast<int>(labels.size()))
        throw ConfigError("initial coefficient vector length does not match the model");

    DesignMatrix design = build_design(data, spec);
    std::vector<std::string> sscp_labels = labels;
    sscp_labels.push_back(spec.dependent_var);

    auto working_sscp_at = [&](const Eigen::VectorXd& beta) {
        std::vector<double> y(design.rows.size()), w(design.rows.size());
        for (size_t i = 0; i < design.rows.size(); ++i) {
            WorkingRecord rec =
                working_transform(family, design.rows[i], design.outcomes[i], beta);
            y[i] = rec.y_tilde;
            w[i] = rec.w_tilde;
        }
        SscpMatrix m = local_sscp(design.rows, y, w);
        m.labels = sscp_labels;
        return m;
    };

    IterationState state;
    state.beta = beta0;
    state.history.push_back({0, beta0, std::numeric_limits<double>::quiet_NaN()});

    SscpMatrix combined;
    WlsSolution sol;
    for (int m = 1; m <= spec.max_iter_nb && !state.converged; ++m) {
        combined = working_sscp_at(state.beta);
        sol = solve_wls(combined);
        ConvergenceCheck chk = check_convergence(state.beta, sol.beta, spec.xconv);
        state.iteration = m;
        state.deltas = chk.deltas;
        state.beta = sol.beta;
        state.history.push_back({m, sol.beta, chk.max_abs_delta});
        state.converged = family.is_linear() || chk.converged;
    }
    if (!state.converged)
        throw ConvergenceError("pooled fit did not converge within max_iter_nb=" +
                               std::to_string(spec.max_iter_nb));

    const Eigen::VectorXd beta_hat = state.beta;
    const double n_total = combined.n_obs;
    if (!(n_total > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    const double phi = estimate_dispersion(family, sol.sse_working, n_total, p);

    FitOutputs out;
    out.family = spec.family;
    out.labels = labels;
    out.beta = beta_hat;
    out.iterations = state;
    out.n_obs = n_total;
    out.p = p;

    Eigen::MatrixXd xpx_inverse;
    if (family.is_linear()) {
        xpx_inverse = sol.xpx_inverse;
        out.condition_number = condition_diagnostic(combined);
    } else {
        SscpMatrix final_combined = working_sscp_at(beta_hat);
        WlsSolution final_sol = solve_wls(final_combined);
        xpx_inverse = final_sol.xpx_inverse;
        out.condition_number = condition_diagnostic(final_combined);
    }
    Eigen::MatrixXd model_cov = model_covariance(xpx_inverse, phi);

    std::vector<double> wh(design.rows.size());
    for (size_t i = 0; i < design.rows.size(); ++i)
        wh[i] = robust_weight(family, design.rows[i], design.outcomes[i], beta_hat, phi);
    SscpMatrix i1 = design_sscp(design.rows, wh);
    i1.labels = labels;
    i1.values *= n_total / (n_total - p);
    Eigen::MatrixXd robust_cov = robust_covariance(model_cov, i1, n_total, p);

    out.cov.model_cov = model_cov;
    out.cov.robust_cov = robust_cov;
    out.cov.xpx_inverse = xpx_inverse;
    out.cov.dispersion = phi;
    out.cov.sigma2_hat = family.is_linear() ? phi : 0.0;

    out.totals = compute_site_stats(design, family, beta_hat, data.partner_id);
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

    const long min_count = spec.min_count_per_grp_glob;
    BinningPolicy pct_policy{spec.groups, min_count, spec.max_numb_of_grp};
    BinningPolicy pct2_policy{
        groups_from_min_count(design.n_effective, min_count, spec.max_numb_of_grp),
        min_count, spec.max_numb_of_grp};
    out.bins_pct = residual_summary(scored, pct_policy, data.partner_id, family);
    out.bins_pct2 = residual_summary(scored, pct2_policy, data.partner_id, family);
    sort_bin_summaries(out.bins_pct);
    sort_bin_summaries(out.bins_pct2);

    if (!family.is_linear()) {
        // Exact individual-level diagnostics: one bin per distinct
        // predicted value (the min_count_per_grp=1 limit).
        BinningPolicy unit_policy{static_cast<long>(design.n_effective), 1,
                                  std::numeric_limits<long>::max()};
        auto exact_bins = residual_summary(scored, unit_policy, data.partner_id, family);
        out.roc = roc_curve(exact_bins);
        std::vector<PseudoRecord> records;
        for (auto& b : exact_bins)
            for (auto& r : hl_expand(b)) records.push_back(r);
        out.hl = hl_test(std::move(records), spec.groups);
    }
    return out;
}

}  // namespace dra
