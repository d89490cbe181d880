#pragma once

#include <filesystem>

#include "coordinator.hpp"
#include "worker.hpp"

namespace dra {

// Single-process test mode (test_env_cd=1): one analysis-center-style tree;
// after each coordinator broadcast the data partner code runs sequentially,
// writing each partner's payload into msoc<dp_cd>, and the coordinator then
// consumes them. Datasets are named <reg_ds_in>_<dp_cd> in data_in_dir.
// Output files land in <request_dir>/msoc and are byte-identical to a
// distributed run on the same inputs.
class LocalLink final : public CoordinatorLink {
  public:
    LocalLink(const ModelSpec& spec, std::filesystem::path request_dir,
              std::filesystem::path data_in_dir);

    void broadcast(const Envelope& env) override;
    Envelope await_worker(int dp_cd) override;
    void terminal(bool success) override;

    const RequestLayout& layout() const { return layout_; }

  private:
    RequestLayout layout_;
    std::vector<int> partners_;
    std::vector<WorkerSession> sessions_;
    int iteration_ = 0;
};

// Full test-mode run: returns the exit code (0 ok, 2/3/4 per error class).
int run_local(const ModelSpec& spec, const std::filesystem::path& request_dir,
              const std::filesystem::path& data_in_dir);

}  // namespace dra
