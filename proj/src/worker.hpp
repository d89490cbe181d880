#pragma once

#include <filesystem>
#include <optional>

#include "dataset.hpp"
#include "design.hpp"
#include "fit_stats.hpp"
#include "model_spec.hpp"
#include "summaries.hpp"
#include "transport.hpp"
#include "wire.hpp"

namespace dra {

// The three user-edited values of a data partner site.
struct WorkerConfig {
    int dp_cd = 0;
    std::filesystem::path data_in_dir;
    long min_count_per_grp = 0;  // 0: defer to the coordinator's global value
    std::filesystem::path dplocal_dir;  // scored dataset destination
};

WorkerConfig parse_worker_config(const std::string& path);

// SSCP(Z || y~(beta), w~(beta)) plus site statistics at beta.
std::vector<NamedFile> iteration_payload(const DesignMatrix& design, const ModelSpec& spec,
                                         const Eigen::VectorXd& beta, int dp_cd);

// Final-exchange extras at beta_hat: robust SSCP, bin summaries at both
// granularities, site statistics. Also returns the scored rows.
std::vector<NamedFile> final_payload(const DesignMatrix& design, const ModelSpec& spec,
                                     const Eigen::VectorXd& beta_hat, double phi,
                                     long min_count, int dp_cd,
                                     std::vector<ScoredRow>* scored_out = nullptr);

// Transport-independent data-partner state machine: consumes one broadcast,
// produces one payload. Loads the analytic dataset on the first message.
class WorkerSession {
  public:
    explicit WorkerSession(WorkerConfig config);

    Envelope handle(const Envelope& broadcast);
    bool finished() const { return finished_; }

  private:
    WorkerConfig config_;
    std::optional<AnalyticDataset> data_;
    std::optional<DesignMatrix> design_;
    std::optional<ModelSpec> spec_;
    bool finished_ = false;
};

// Waiting loop per the run lifecycle; signals job_done/job_fail. Returns
// the process exit code (0 ok, 2/3/4 per error class).
int run_worker(const WorkerConfig& config, WorkerLink& link);

}  // namespace dra
