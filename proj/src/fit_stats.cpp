#include "fit_stats.hpp"

#include <cmath>
#include <limits>

#include "csv.hpp"
#include "errors.hpp"
#include "tail_prob.hpp"

namespace dra {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

SiteStatContribution compute_site_stats(const DesignMatrix& design, const FamilySpec& family,
                                        const Eigen::VectorXd& beta, int dp_cd) {
    SiteStatContribution s;
    s.dp_cd = dp_cd;
    for (size_t i = 0; i < design.rows.size(); ++i) {
        const DesignRow& row = design.rows[i];
        double y = design.outcomes[i];
        double w = row.effective_weight;
        double eta = beta.dot(row.z);
        double mu = family_eval(family, eta).mu;
        double resid = y - mu;
        s.n_k += 1;
        s.sum_freq += row.freq;
        s.sum_w += w;
        s.sum_y += w * y;
        s.sum_y_sq += w * y * y;
        if (family.is_linear()) {
            s.sse_local += w * resid * resid;
        } else {
            // y*eta - log(1+exp(eta)), stable for large |eta|
            double log1pexp = eta > 30 ? eta : std::log1p(std::exp(eta));
            s.loglik_local += w * (y * eta - log1pexp);
        }
        s.sum_mu += row.freq * mu;
        s.sum_resid += row.freq * resid;
        s.sum_resid_sq += row.freq * resid * resid;
    }
    return s;
}

SiteStatContribution add_site_stats(const std::vector<SiteStatContribution>& parts) {
    SiteStatContribution t;
    t.dp_cd = -1;
    for (auto& p : parts) {
        t.n_k += p.n_k;
        t.sum_freq += p.sum_freq;
        t.sum_w += p.sum_w;
        t.sum_y += p.sum_y;
        t.sum_y_sq += p.sum_y_sq;
        t.sse_local += p.sse_local;
        t.loglik_local += p.loglik_local;
        t.sum_mu += p.sum_mu;
        t.sum_resid += p.sum_resid;
        t.sum_resid_sq += p.sum_resid_sq;
    }
    return t;
}

namespace {
const char* kSiteStatCols[] = {"dp_cd",   "n_k",         "sum_freq", "sum_w",
                               "sum_y",   "sum_y_sq",    "sse_local", "loglik_local",
                               "sum_mu",  "sum_resid",   "sum_resid_sq"};
}

std::string serialize_site_stats(const SiteStatContribution& s) {
    std::vector<std::string> header(std::begin(kSiteStatCols), std::end(kSiteStatCols));
    std::string out = csv_line(header);
    out += csv_line({std::to_string(s.dp_cd), format_double(s.n_k), format_double(s.sum_freq),
                     format_double(s.sum_w), format_double(s.sum_y), format_double(s.sum_y_sq),
                     format_double(s.sse_local), format_double(s.loglik_local),
                     format_double(s.sum_mu), format_double(s.sum_resid),
                     format_double(s.sum_resid_sq)});
    return out;
}

SiteStatContribution parse_site_stats(std::string_view bytes, const std::string& context) {
    CsvTable t = parse_csv(bytes);
    if (t.rows.size() != 1 || t.header.size() != std::size(kSiteStatCols))
        throw ProtocolError(context + ": malformed site statistics file");
    for (size_t i = 0; i < std::size(kSiteStatCols); ++i)
        if (t.header[i] != kSiteStatCols[i])
            throw ProtocolError(context + ": unexpected site statistics column " + t.header[i]);
    auto v = [&](int c) { return parse_double(t.rows[0][static_cast<size_t>(c)], context); };
    SiteStatContribution s;
    s.dp_cd = static_cast<int>(v(0));
    s.n_k = v(1);
    s.sum_freq = v(2);
    s.sum_w = v(3);
    s.sum_y = v(4);
    s.sum_y_sq = v(5);
    s.sse_local = v(6);
    s.loglik_local = v(7);
    s.sum_mu = v(8);
    s.sum_resid = v(9);
    s.sum_resid_sq = v(10);
    return s;
}

double FitReport::get(const std::string& name) const {
    for (auto& [n, v] : measures)
        if (n == name) return v;
    throw ConfigError("fit report has no measure named " + name);
}

bool FitReport::has(const std::string& name) const {
    for (auto& [n, v] : measures)
        if (n == name) return true;
    return false;
}

FitReport linear_fit_stats(double sse, double sse1, double n, int p, double sigma2_hat,
                           bool intercept_present, double ybar) {
    if (!(n > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    if (sse1 == 0)
        throw DataError("degenerate outcome: total sum of squares is zero");
    FitReport r;
    double rsq = 1.0 - sse / sse1;
    double adj = intercept_present ? 1.0 - (1.0 - rsq) * (n - 1) / (n - p)
                                   : 1.0 - (1.0 - rsq) * n / (n - p);
    double root_mse = std::sqrt(sigma2_hat);
    r.add("Root_MSE", root_mse);
    r.add("Dependent_Mean", ybar);
    r.add("Coeff_Var", ybar == 0 ? kNaN : 100.0 * root_mse / ybar);
    r.add("R_Square", rsq);
    r.add("Adj_R_Sq", adj);
    if (sse <= 0) {
        r.perfect_fit = true;
        r.add("AIC", kNegInf);
        r.add("BIC_Sawa", kNegInf);
        r.add("SBC", kNegInf);
    } else {
        double logterm = n * std::log(sse / n);
        double q = n * sigma2_hat / sse;
        r.add("AIC", logterm + 2.0 * p);
        r.add("BIC_Sawa", logterm + 2.0 * (p + 2) * q - 2.0 * q * q);
        r.add("SBC", logterm + p * std::log(n));
    }
    return r;
}

double loglik_null(double n, double ybar) {
    return n * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
}

FitReport logistic_fit_stats(double loglik, double n, int p, double ybar) {
    if (!(ybar > 0.0 && ybar < 1.0))
        throw DataError("degenerate outcome: all responses identical");
    FitReport r;
    double ll0 = loglik_null(n, ybar);
    r.add("Log_Likelihood", loglik);
    r.add("AIC", -2.0 * loglik + 2.0 * p);
    r.add("AICC", -2.0 * loglik + 2.0 * p * n / (n - p - 1));
    r.add("BIC", -2.0 * loglik + p * std::log(n));
    double g_rsq = 1.0 - std::exp(2.0 * (ll0 - loglik) / n);
    r.add("R_Square", g_rsq);
    r.add("Max_Rescaled_R_Square", g_rsq / (1.0 - std::exp(2.0 * ll0 / n)));
    r.add("Deviance", -2.0 * loglik);
    return r;
}

ChiSqTest global_null_test(double loglik, double loglik0, int p_nonintercept) {
    if (loglik < loglik0 - 1e-8)
        throw NumericalError("fitted log likelihood fell below the null model's");
    ChiSqTest t;
    t.chi_sq = std::max(0.0, 2.0 * (loglik - loglik0));
    t.df = p_nonintercept;
    t.p_value = t.chi_sq == 0 ? 1.0 : chisq_upper_tail(t.chi_sq, t.df);
    return t;
}

AnovaTable anova_table(double sse, double sse1, double n, int p) {
    if (!(n > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    if (sse1 == 0)
        throw DataError("degenerate outcome: total sum of squares is zero");
    if (p < 2)
        throw ConfigError("ANOVA requires at least one non-intercept parameter");
    AnovaTable a;
    a.model_ss = sse1 - sse;
    a.error_ss = sse;
    a.total_ss = sse1;
    a.model_df = p - 1;
    a.error_df = n - p;
    a.total_df = n - 1;
    a.model_ms = a.model_ss / a.model_df;
    a.error_ms = a.error_ss / a.error_df;
    if (a.error_ms == 0) {
        a.f_value = std::numeric_limits<double>::infinity();
        a.p_value = 0.0;
    } else {
        a.f_value = a.model_ms / a.error_ms;
        a.p_value = a.f_value <= 0 ? 1.0 : f_upper_tail(a.f_value, a.model_df, a.error_df);
    }
    return a;
}

std::vector<InferenceRow> inference_table(const std::vector<std::string>& labels,
                                          const Eigen::VectorXd& beta,
                                          const Eigen::MatrixXd& model_cov,
                                          const Eigen::MatrixXd& robust_cov, double alpha,
                                          const FamilySpec& family, double n, int p) {
    if (!(alpha > 0 && alpha < 1))
        throw ConfigError("alpha must be in (0,1)");
    const int d = static_cast<int>(beta.size());
    if (static_cast<int>(labels.size()) != d || model_cov.rows() != d || robust_cov.rows() != d)
        throw ConfigError("inference table dimension mismatch");

    const bool linear = family.is_linear();
    const double df = n - p;
    const double crit = linear ? student_t_quantile(1.0 - alpha / 2.0, df)
                               : normal_quantile(1.0 - alpha / 2.0);
    auto p_value = [&](double stat) {
        return linear ? student_t_two_sided(stat, df) : 2.0 * normal_upper_tail(std::fabs(stat));
    };

    std::vector<InferenceRow> out;
    out.reserve(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
        InferenceRow row;
        row.variable = labels[static_cast<size_t>(j)];
        row.estimate = beta(j);
        row.std_err = std::sqrt(model_cov(j, j));
        row.robust_std_err = std::sqrt(robust_cov(j, j));
        if (row.std_err > 0) {
            row.p_value = p_value(row.estimate / row.std_err);
            row.lower_cl = row.estimate - crit * row.std_err;
            row.upper_cl = row.estimate + crit * row.std_err;
        } else {
            row.p_value = row.lower_cl = row.upper_cl = kNaN;
        }
        if (row.robust_std_err > 0) {
            row.robust_p_value = p_value(row.estimate / row.robust_std_err);
            row.robust_lower_cl = row.estimate - crit * row.robust_std_err;
            row.robust_upper_cl = row.estimate + crit * row.robust_std_err;
        } else {
            row.robust_p_value = row.robust_lower_cl = row.robust_upper_cl = kNaN;
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace dra
