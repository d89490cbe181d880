#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "design.hpp"
#include "family.hpp"

namespace dra {

// Per-site additive statistic contributions, evaluated at one beta.
// Everything here is a whole-site sum and combines across sites by
// addition. sum_y/sum_y_sq/... are effective-weight (weight*freq) weighted.
struct SiteStatContribution {
    int dp_cd = 0;
    double n_k = 0;          // physical row count
    double sum_freq = 0;     // effective observation count
    double sum_w = 0;        // sum of effective weights
    double sum_y = 0;
    double sum_y_sq = 0;
    double sse_local = 0;    // sum w (Y - beta'Z)^2
    double loglik_local = 0; // sum w [Y beta'Z - log(1+exp(beta'Z))], logistic
    double sum_mu = 0;       // freq-weighted
    double sum_resid = 0;    // freq-weighted
    double sum_resid_sq = 0; // freq-weighted
};

SiteStatContribution compute_site_stats(const DesignMatrix& design, const FamilySpec& family,
                                        const Eigen::VectorXd& beta, int dp_cd);
SiteStatContribution add_site_stats(const std::vector<SiteStatContribution>& parts);

std::string serialize_site_stats(const SiteStatContribution& s);
SiteStatContribution parse_site_stats(std::string_view bytes, const std::string& context);

// Goodness-of-fit measures keyed by name, in a stable emit order.
struct FitReport {
    std::vector<std::pair<std::string, double>> measures;
    bool perfect_fit = false;  // SSE == 0: log-based criteria are -inf

    void add(const std::string& name, double value) { measures.emplace_back(name, value); }
    double get(const std::string& name) const;
    bool has(const std::string& name) const;
};

// R^2, adjusted R^2, AIC, SBC, Sawa BIC, Root MSE, dependent mean,
// coefficient of variation. sse1 is the (corrected) total sum of squares.
FitReport linear_fit_stats(double sse, double sse1, double n, int p, double sigma2_hat,
                           bool intercept_present, double ybar);

// -2LL criteria, generalized and max-rescaled R^2, deviance.
FitReport logistic_fit_stats(double loglik, double n, int p, double ybar);

// Intercept-only log likelihood N[ybar ln ybar + (1-ybar) ln(1-ybar)].
double loglik_null(double n, double ybar);

struct ChiSqTest {
    double chi_sq = 0;
    double df = 0;
    double p_value = 1;
};

// Likelihood-ratio test of the global null hypothesis.
ChiSqTest global_null_test(double loglik, double loglik0, int p_nonintercept);

struct AnovaTable {
    double model_ss = 0, error_ss = 0, total_ss = 0;
    double model_df = 0, error_df = 0, total_df = 0;
    double model_ms = 0, error_ms = 0;
    double f_value = 0;
    double p_value = 1;
};

AnovaTable anova_table(double sse, double sse1, double n, int p);

struct InferenceRow {
    std::string variable;
    double estimate = 0;
    double std_err = 0;
    double p_value = 0;
    double lower_cl = 0;
    double upper_cl = 0;
    double robust_std_err = 0;
    double robust_p_value = 0;
    double robust_lower_cl = 0;
    double robust_upper_cl = 0;
};

// Wald table: Student-t reference with N-p df for the linear family,
// standard normal for logistic. A zero standard error yields NaN p/CI
// (serialized as empty cells, the exact-fit sentinel).
std::vector<InferenceRow> inference_table(const std::vector<std::string>& labels,
                                          const Eigen::VectorXd& beta,
                                          const Eigen::MatrixXd& model_cov,
                                          const Eigen::MatrixXd& robust_cov, double alpha,
                                          const FamilySpec& family, double n, int p);

}  // namespace dra
