#pragma once

#include <Eigen/Dense>

namespace dra {

enum class Family { linear, logistic };

// Canonical-link GLM family: identity/normal or logit/binomial.
// Dispersion is estimated for the linear family and fixed at 1 for logistic.
struct FamilySpec {
    Family kind = Family::linear;

    bool is_linear() const { return kind == Family::linear; }
    bool dispersion_fixed_one() const { return kind == Family::logistic; }
};

// Logistic means are clamped away from {0,1} so quasi-separated fits keep
// finite working responses and positive weights instead of producing NaN.
inline constexpr double kMuClamp = 1e-10;

struct FamilyEval {
    double mu;
    double mu_prime;
    double v;
};

// mu(eta), mu'(eta) and the variance function at a linear predictor value.
FamilyEval family_eval(const FamilySpec& family, double eta);

struct DesignRow {
    Eigen::VectorXd z;             // intercept column (exact 1) prepended unless NOINT
    double weight = 1.0;           // analytic weight
    double freq = 1.0;             // replication count, integer-valued
    double effective_weight = 1.0; // weight * freq
};

struct WorkingRecord {
    double eta;
    double mu;
    double mu_prime;
    double v;
    double y_tilde;
    double w_tilde;
    bool degenerate = false;  // mu' hit the clamp floor
};

// Redefined outcome/weight of one IRLS step. Linear family returns the
// outcome and effective weight unchanged (no dependence on beta).
WorkingRecord working_transform(const FamilySpec& family, const DesignRow& row,
                                double outcome, const Eigen::VectorXd& beta);

// Squared-residual weight for the sandwich estimator, per physical row:
// freq * weight^2 * (Y - mu)^2 / phi^2.
double robust_weight(const FamilySpec& family, const DesignRow& row,
                     double outcome, const Eigen::VectorXd& beta_hat, double phi);

}  // namespace dra
