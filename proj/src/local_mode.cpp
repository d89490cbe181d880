#include "local_mode.hpp"

#include <algorithm>

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

LocalLink::LocalLink(const ModelSpec& spec, fs::path request_dir, fs::path data_in_dir) {
    layout_.base = std::move(request_dir);
    partners_ = spec.dp_cd_list;
    std::sort(partners_.begin(), partners_.end());
    layout_.create_coordinator_dirs(partners_);
    for (int dp : partners_) {
        WorkerConfig cfg;
        cfg.dp_cd = dp;
        cfg.data_in_dir = data_in_dir;
        cfg.dplocal_dir = layout_.dplocal();
        sessions_.emplace_back(cfg);
    }
}

void LocalLink::broadcast(const Envelope& env) {
    ++iteration_;
    write_exchange(layout_.inputfiles(), env.files);

    // Sequential data-partner pass: re-read the staged files so each
    // session consumes exactly what a distributed worker would.
    auto names = read_manifest(layout_.inputfiles());
    Envelope staged;
    staged.iteration = env.iteration;
    for (auto& n : names)
        staged.files.emplace_back(n, read_text_file((layout_.inputfiles() / n).string()));

    for (size_t k = 0; k < partners_.size(); ++k) {
        try {
            Envelope out = sessions_[k].handle(staged);
            write_exchange(layout_.msoc_dp(partners_[k]), out.files);
        } catch (const std::exception& e) {
            signal_terminal(layout_.msoc_dp(partners_[k]), false);
            throw WorkerFailed(partners_[k], "partner " + std::to_string(partners_[k]) +
                                                 " failed: " + e.what());
        }
    }

    // Drain the staged broadcast (test mode has no transfer software).
    fs::remove(layout_.inputfiles() / kTriggerFile);
    drain_exchange(layout_.inputfiles(), names, env.iteration);
}

Envelope LocalLink::await_worker(int dp_cd) {
    const fs::path dir = layout_.msoc_dp(dp_cd);
    WatchOptions opts;
    opts.wait_min_sec = 0.001;
    opts.deadline_sec = 1.0;  // payload is already on disk in test mode
    opts.fail_watch_dp = dp_cd;
    auto names = watch_for_trigger(dir, opts);
    Envelope env;
    env.iteration = iteration_;
    for (auto& n : names)
        env.files.emplace_back(n, read_text_file((dir / n).string()));
    drain_exchange(dir, names, iteration_);
    return env;
}

void LocalLink::terminal(bool success) {
    signal_terminal(layout_.inputfiles(), success);
}

int run_local(const ModelSpec& spec_in, const fs::path& request_dir,
              const fs::path& data_in_dir) {
    ModelSpec spec = spec_in;
    spec.test_env_cd = 1;  // workers then load <reg_ds_in>_<dp_cd>.csv
    LocalLink link(spec, request_dir, data_in_dir);
    Eigen::VectorXd beta0 = initial_beta(spec, link.layout().inputfiles());
    fs::path dplocal = link.layout().dplocal();
    return drive_coordinator(spec, link, link.layout().msoc(), beta0, &dplocal);
}

}  // namespace dra
