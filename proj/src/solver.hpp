#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "family.hpp"
#include "sscp.hpp"

namespace dra {

// Elementwise sum; requires at least one part and identical label
// sequences. Callers must pass parts in ascending dp_cd order (bit parity).
SscpMatrix combine_sscp(const std::vector<SscpMatrix>& parts);

struct WlsSolution {
    std::vector<std::string> labels;  // coefficient labels (outcome dropped)
    Eigen::VectorXd beta;
    Eigen::MatrixXd xpx_inverse;  // (Z' W Z)^-1
    double sse_working = 0.0;     // y'Wy - beta' Z'Wy
};

// Solves the normal equations packed in an SSCP whose last label is the
// working outcome. Cholesky in label order; a pivot below 1e-12 of the
// largest diagonal raises a collinearity error naming the dependent column.
WlsSolution solve_wls(const SscpMatrix& sscp);

// Linear: SSE/(N-p). Logistic: fixed 1.
double estimate_dispersion(const FamilySpec& family, double sse, double n_obs, int p);

// phi * (Z'WZ)^-1; standard errors are square roots of the diagonal.
Eigen::MatrixXd model_covariance(const Eigen::MatrixXd& xpx_inverse, double phi);

// Sandwich I^-1 I1 I^-1. i_inverse = phi*(Z'W(beta_hat)Z)^-1; i1 must
// already carry the N/(N-p) factor.
Eigen::MatrixXd robust_covariance(const Eigen::MatrixXd& i_inverse, const SscpMatrix& i1,
                                  double n_obs, int p);

struct ConvergenceCheck {
    bool converged = false;
    Eigen::VectorXd deltas;
    double max_abs_delta = 0.0;
};

// XCONV criterion: absolute difference when |prev| < 0.01, else relative.
ConvergenceCheck check_convergence(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                                   double xconv);

// Eigenvalue ratio of the unit-diagonal-scaled Z'WZ block. Values above
// 1e10 indicate near-collinearity; a singular block returns +inf.
inline constexpr double kConditionWarning = 1e10;
double condition_diagnostic(const SscpMatrix& sscp);

struct IterationRecord {
    int iteration = 0;
    Eigen::VectorXd beta;
    double max_abs_delta = 0.0;  // NaN for iteration 0
};

struct IterationState {
    Eigen::VectorXd beta;
    int iteration = 0;
    Eigen::VectorXd deltas;
    bool converged = false;
    std::vector<IterationRecord> history;  // one entry per iteration incl. 0
};

struct CovarianceBundle {
    Eigen::MatrixXd model_cov;
    Eigen::MatrixXd robust_cov;
    Eigen::MatrixXd xpx_inverse;
    double dispersion = 1.0;
    double sigma2_hat = 0.0;  // linear only
};

}  // namespace dra
