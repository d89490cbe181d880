#pragma once

#include <filesystem>
#include <optional>

#include "fit_stats.hpp"
#include "model_spec.hpp"
#include "solver.hpp"
#include "summaries.hpp"
#include "transport.hpp"
#include "wire.hpp"

namespace dra {

// Everything the analysis center computes for one run.
struct FitOutputs {
    Family family = Family::linear;
    std::vector<std::string> labels;
    Eigen::VectorXd beta;
    CovarianceBundle cov;
    IterationState iterations;
    double n_obs = 0;   // total frequency count
    int p = 0;          // parameter count including the intercept
    double ybar = 0;
    double condition_number = 0;

    FitReport fit;
    std::vector<InferenceRow> inference;
    std::optional<AnovaTable> anova;          // linear
    std::optional<ChiSqTest> global_null;     // logistic
    SiteStatContribution totals;              // summed site contributions
    std::vector<BinSummary> bins_pct;         // combined, deterministic order
    std::vector<BinSummary> bins_pct2;
    std::optional<RocResult> roc;             // logistic
    std::optional<HlResult> hl;               // logistic

    double sse = 0;     // linear: assembled from sites at beta_hat
    double sse1 = 0;    // linear: corrected total SS
    double loglik = 0;  // logistic
};

// Initial coefficients: all zeros, or the tbl_intial_est file when given.
Eigen::VectorXd initial_beta(const ModelSpec& spec,
                             const std::filesystem::path& infolder);

// Drives the full lifecycle over a transport: broadcast beta_m, await all
// partner SSCPs, solve, check XCONV; after convergence run the one extra
// exchange at beta_hat for covariances, fit statistics and diagnostics.
// `trace` (optional) receives the iteration history even when this throws.
// `dplocal` (optional) receives combined SSCP snapshots per iteration.
FitOutputs run_coordinator(const ModelSpec& spec, CoordinatorLink& link,
                           const Eigen::VectorXd& beta0,
                           IterationState* trace = nullptr,
                           const std::filesystem::path* dplocal = nullptr);

// Writes the <prefix>_* output datasets into the msoc directory.
void emit_outputs(const FitOutputs& out, const std::filesystem::path& msoc_dir,
                  const std::string& prefix);

// Failure artifacts: convergence status + iteration history only.
void emit_failure(const IterationState& trace, const ModelSpec& spec,
                  const std::string& reason, const std::filesystem::path& msoc_dir);

// Run + emit + terminal signal; maps errors to exit codes (0 ok,
// 2 non-convergence/numerical, 3 protocol, 4 data/config).
int drive_coordinator(const ModelSpec& spec, CoordinatorLink& link,
                      const std::filesystem::path& msoc_dir,
                      const Eigen::VectorXd& beta0,
                      const std::filesystem::path* dplocal = nullptr);

}  // namespace dra
