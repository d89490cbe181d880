#include "fs_transport.hpp"

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

namespace {

// Transfer-software step: move one staged exchange to a peer inbound
// directory. Payload first, manifest next, trigger strictly last.
void deliver(const fs::path& from, const std::vector<std::string>& names,
             const fs::path& to) {
    if (fs::exists(to / kTriggerFile))
        throw ProtocolError("stale trigger in " + to.string() +
                            ": previous consumer has not drained");
    fs::create_directories(to);
    for (auto& n : names)
        fs::copy_file(from / n, to / n, fs::copy_options::overwrite_existing);
    fs::copy_file(from / kManifestFile, to / kManifestFile,
                  fs::copy_options::overwrite_existing);
    write_text_file((to / kTriggerFile).string(), "");
}

Envelope read_envelope(const fs::path& dir, const std::vector<std::string>& names,
                       int iteration) {
    Envelope env;
    env.iteration = iteration;
    for (auto& n : names)
        env.files.emplace_back(n, read_text_file((dir / n).string()));
    return env;
}

}  // namespace

fs::path coordinator_base(const fs::path& root, const std::string& request_id) {
    return root / request_id / "central";
}

fs::path worker_base(const fs::path& root, const std::string& request_id, int dp_cd) {
    return root / request_id / ("dp" + std::to_string(dp_cd));
}

FsCoordinatorLink::FsCoordinatorLink(fs::path root, const ModelSpec& spec)
    : root_(std::move(root)), request_id_(spec.request_id), partners_(spec.dp_cd_list) {
    layout_.base = coordinator_base(root_, request_id_);
    layout_.create_coordinator_dirs(partners_);
    watch_.wait_min_sec = spec.wait_time_min;
    watch_.wait_max_sec = spec.wait_time_max;
    watch_.deadline_sec = spec.run_deadline_sec;
}

void FsCoordinatorLink::broadcast(const Envelope& env) {
    const fs::path staged = layout_.inputfiles();
    std::vector<std::string> names;
    for (auto& [n, b] : env.files) names.push_back(n);
    write_exchange(staged, env.files);
    for (int dp : partners_)
        deliver(staged, names, worker_base(root_, request_id_, dp) / "inputfiles");
    fs::remove(staged / kTriggerFile);
    drain_exchange(staged, names, env.iteration);
}

Envelope FsCoordinatorLink::await_worker(int dp_cd) {
    const fs::path dir = layout_.msoc_dp(dp_cd);
    WatchOptions opts = watch_;
    opts.fail_watch_dp = dp_cd;
    auto names = watch_for_trigger(dir, opts);
    Envelope env = read_envelope(dir, names, recv_iteration_);
    drain_exchange(dir, names, recv_iteration_++);
    return env;
}

void FsCoordinatorLink::terminal(bool success) {
    signal_terminal(layout_.inputfiles(), success);
}

FsWorkerLink::FsWorkerLink(fs::path root, const std::string& request_id, int dp_cd,
                           const WatchOptions& watch)
    : central_msoc_(coordinator_base(root, request_id) / ("msoc" + std::to_string(dp_cd))),
      dp_cd_(dp_cd),
      watch_(watch) {
    layout_.base = worker_base(root, request_id, dp_cd);
    layout_.create_worker_dirs();
}

Envelope FsWorkerLink::await_broadcast() {
    const fs::path dir = layout_.inputfiles();
    auto names = watch_for_trigger(dir, watch_);
    Envelope env = read_envelope(dir, names, recv_iteration_);
    drain_exchange(dir, names, recv_iteration_++);
    return env;
}

void FsWorkerLink::publish(const Envelope& env) {
    const fs::path staged = layout_.msoc();
    std::vector<std::string> names;
    for (auto& [n, b] : env.files) names.push_back(n);
    write_exchange(staged, env.files);
    deliver(staged, names, central_msoc_);
    fs::remove(staged / kTriggerFile);
    drain_exchange(staged, names, env.iteration);
}

void FsWorkerLink::terminal(bool success) {
    signal_terminal(layout_.msoc(), success);
    signal_terminal(central_msoc_, success);
}

}  // namespace dra
