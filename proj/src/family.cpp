#include "family.hpp"

#include <cmath>

#include "errors.hpp"

namespace dra {

FamilyEval family_eval(const FamilySpec& family, double eta) {
    if (!std::isfinite(eta))
        throw NumericalError("non-finite linear predictor");
    if (family.is_linear())
        return {eta, 1.0, 1.0};
    double mu = 1.0 / (1.0 + std::exp(-eta));
    if (mu < kMuClamp) mu = kMuClamp;
    if (mu > 1.0 - kMuClamp) mu = 1.0 - kMuClamp;
    double mp = mu * (1.0 - mu);
    return {mu, mp, mp};
}

WorkingRecord working_transform(const FamilySpec& family, const DesignRow& row,
                                double outcome, const Eigen::VectorXd& beta) {
    if (beta.size() != row.z.size())
        throw ConfigError("coefficient vector length does not match design arity");
    if (family.is_linear()) {
        // eta is irrelevant for the linear payload but kept for scoring.
        double eta = beta.dot(row.z);
        return {eta, eta, 1.0, 1.0, outcome, row.effective_weight, false};
    }
    double eta = beta.dot(row.z);
    FamilyEval e = family_eval(family, eta);
    WorkingRecord rec;
    rec.eta = eta;
    rec.mu = e.mu;
    rec.mu_prime = e.mu_prime;
    rec.v = e.v;
    if (rec.mu_prime < kMuClamp) {
        rec.mu_prime = kMuClamp;
        rec.degenerate = true;
    }
    rec.y_tilde = (outcome - rec.mu) / rec.mu_prime + eta;
    rec.w_tilde = row.effective_weight * rec.mu_prime;
    return rec;
}

double robust_weight(const FamilySpec& family, const DesignRow& row,
                     double outcome, const Eigen::VectorXd& beta_hat, double phi) {
    if (!(phi > 0.0))
        throw NumericalError("dispersion must be positive");
    if (row.effective_weight == 0.0)
        return 0.0;
    double mu = family_eval(family, beta_hat.dot(row.z)).mu;
    double r = outcome - mu;
    // freq replicates the row, so the squared analytic weight picks up a
    // single factor of freq.
    return row.freq * row.weight * row.weight * r * r / (phi * phi);
}

}  // namespace dra
