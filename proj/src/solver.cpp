#include "solver.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace dra {

SscpMatrix combine_sscp(const std::vector<SscpMatrix>& parts) {
    if (parts.empty())
        throw ProtocolError("no SSCP parts to combine");
    SscpMatrix out = parts.front();
    for (size_t k = 1; k < parts.size(); ++k) {
        const SscpMatrix& p = parts[k];
        if (!out.same_labels(p))
            throw ProtocolError(
                "SSCP label mismatch from partner " +
                (p.origin >= 0 ? std::to_string(p.origin) : std::string("?")) +
                " (columns must be identical at every site)");
        out.values += p.values;
        out.n_obs += p.n_obs;
        out.sum_weights += p.sum_weights;
    }
    out.origin = -1;
    return out;
}

namespace {

inline constexpr double kPivotTolerance = 1e-12;

// Cholesky in natural order. Throws a collinearity error naming the first
// column whose pivot falls below tolerance (i.e. the column that is
// linearly dependent on its predecessors).
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a,
                               const std::vector<std::string>& labels) {
    const int n = static_cast<int>(a.rows());
    double max_diag = 0.0;
    for (int j = 0; j < n; ++j) max_diag = std::max(max_diag, a(j, j));
    const double tol = kPivotTolerance * max_diag;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > tol)) {
            std::string name = j < static_cast<int>(labels.size())
                                   ? labels[static_cast<size_t>(j)]
                                   : ("column " + std::to_string(j));
            throw NumericalError("collinearity: column '" + name +
                                 "' is linearly dependent on preceding columns");
        }
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double sum = l.row(j).head(j).dot(l.row(i).head(j));
            l(i, j) = (a(i, j) - sum) / l(j, j);
        }
    }
    return l;
}

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& l, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(b.size());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
        y(i) = (b(i) - l.row(i).head(i).dot(y.head(i))) / l(i, i);
    Eigen::VectorXd x(n);
    for (int i = n - 1; i >= 0; --i)
        x(i) = (y(i) - l.col(i).tail(n - i - 1).dot(x.tail(n - i - 1))) / l(i, i);
    return x;
}

}  // namespace

WlsSolution solve_wls(const SscpMatrix& sscp) {
    const int d = static_cast<int>(sscp.values.rows());
    if (d < 2)
        throw ConfigError("SSCP must contain at least one covariate column plus the outcome");
    if (sscp.labels.size() != static_cast<size_t>(d))
        throw ConfigError("SSCP labels do not match matrix dimension");
    const int p = d - 1;

    Eigen::MatrixXd xpx = sscp.values.topLeftCorner(p, p);
    Eigen::VectorXd xpy = sscp.values.topRightCorner(p, 1);
    double ypy = sscp.values(p, p);

    std::vector<std::string> coef_labels(sscp.labels.begin(), sscp.labels.end() - 1);
    Eigen::MatrixXd l = cholesky_lower(xpx, coef_labels);

    WlsSolution sol;
    sol.labels = std::move(coef_labels);
    sol.beta = cholesky_solve(l, xpy);
    sol.xpx_inverse.resize(p, p);
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
        e(j) = 1.0;
        sol.xpx_inverse.col(j) = cholesky_solve(l, e);
    }
    // Symmetrize: column solves agree only up to rounding.
    sol.xpx_inverse = ((sol.xpx_inverse + sol.xpx_inverse.transpose()) / 2.0).eval();
    sol.sse_working = ypy - sol.beta.dot(xpy);
    return sol;
}

double estimate_dispersion(const FamilySpec& family, double sse, double n_obs, int p) {
    if (family.dispersion_fixed_one())
        return 1.0;
    if (!(n_obs > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    return sse / (n_obs - p);
}

Eigen::MatrixXd model_covariance(const Eigen::MatrixXd& xpx_inverse, double phi) {
    if (xpx_inverse.rows() != xpx_inverse.cols())
        throw ConfigError("covariance input must be square");
    Eigen::MatrixXd cov = phi * xpx_inverse;
    for (int j = 0; j < cov.rows(); ++j)
        if (cov(j, j) < 0)
            throw NumericalError("negative variance on the covariance diagonal");
    return cov;
}

Eigen::MatrixXd robust_covariance(const Eigen::MatrixXd& i_inverse, const SscpMatrix& i1,
                                  double n_obs, int p) {
    if (i_inverse.rows() != i_inverse.cols() || i1.values.rows() != i1.values.cols() ||
        i_inverse.rows() != i1.values.rows())
        throw ProtocolError("sandwich estimator dimension mismatch");
    if (!(n_obs > p))
        throw DataError("insufficient data: N must exceed the parameter count");
    return i_inverse * i1.values * i_inverse;
}

ConvergenceCheck check_convergence(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                                   double xconv) {
    if (prev.size() != next.size())
        throw ConfigError("coefficient vectors differ in length");
    ConvergenceCheck chk;
    chk.deltas.resize(prev.size());
    for (int s = 0; s < prev.size(); ++s) {
        double d = next(s) - prev(s);
        if (std::abs(prev(s)) >= 0.01) d /= prev(s);
        chk.deltas(s) = d;
        chk.max_abs_delta = std::max(chk.max_abs_delta, std::abs(d));
    }
    chk.converged = chk.max_abs_delta < xconv;
    return chk;
}

double condition_diagnostic(const SscpMatrix& sscp) {
    const int d = static_cast<int>(sscp.values.rows());
    const int p = d - 1;
    if (p < 1)
        throw ConfigError("SSCP too small for a condition diagnostic");
    Eigen::MatrixXd block = sscp.values.topLeftCorner(p, p);
    Eigen::VectorXd scale(p);
    for (int j = 0; j < p; ++j) {
        if (!(block(j, j) > 0))
            throw NumericalError("collinearity: non-positive diagonal in column '" +
                                 sscp.labels[static_cast<size_t>(j)] + "'");
        scale(j) = 1.0 / std::sqrt(block(j, j));
    }
    Eigen::MatrixXd scaled = scale.asDiagonal() * block * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace dra
