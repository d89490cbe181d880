#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dra {

// Pinned exchange file names (bit-exact contract).
inline constexpr const char* kTriggerFile = "files_done.ok";
inline constexpr const char* kManifestFile = "file_list.csv";
inline constexpr const char* kJobDoneFile = "job_done.ok";
inline constexpr const char* kJobFailFile = "job_fail.ok";
inline constexpr const char* kParamsFile = "vars_nm_value_pairs.csv";

// Ordered name/value pairs, the vars_nm_value_pairs dataset analog.
struct ParamSet {
    std::vector<std::pair<std::string, std::string>> pairs;

    bool has(const std::string& name) const;
    const std::string& get(const std::string& name) const;
    std::string get_or(const std::string& name, const std::string& fallback) const;
    void set(const std::string& name, const std::string& value);  // insert or replace
};

// CSV with header "M_var_nm,M_var_value". Values are verbatim strings
// (lists space-separated); comma/quote/CR/LF are rejected on encode and
// decode. Decode enforces unique names and the required-key set.
std::string encode_params(const ParamSet& params);
ParamSet decode_params(std::string_view bytes);

// Directory tree of one party for one request.
struct RequestLayout {
    std::filesystem::path base;  // <root>/<MSReqID>[/<party>]

    std::filesystem::path dplocal() const { return base / "dplocal"; }
    std::filesystem::path inputfiles() const { return base / "inputfiles"; }
    std::filesystem::path msoc() const { return base / "msoc"; }
    std::filesystem::path msoc_dp(int dp_cd) const {
        return base / ("msoc" + std::to_string(dp_cd));
    }

    void create_worker_dirs() const;
    void create_coordinator_dirs(const std::vector<int>& partners) const;
};

using NamedFile = std::pair<std::string, std::string>;  // (relative name, bytes)

// Commit-barrier write: payload files first, then file_list.csv (one
// relative name per line, LF, no header), then the empty trigger, strictly
// last. A stale trigger in the directory is a protocol error.
void write_exchange(const std::filesystem::path& dir, const std::vector<NamedFile>& files);

struct WatchOptions {
    double wait_min_sec = 3.0;       // first poll interval
    double wait_max_sec = 7200.0;    // poll interval cap (doubling backoff)
    double deadline_sec = 14400.0;   // overall wait budget
    int fail_watch_dp = -1;          // if >= 0, job_fail.ok aborts with WorkerFailed
};

// Polls for the trigger, starting at wait_min and doubling up to wait_max.
// On trigger: reads the manifest, verifies every listed file exists,
// deletes the trigger and returns the listed names in manifest order.
std::vector<std::string> watch_for_trigger(const std::filesystem::path& dir,
                                           const WatchOptions& opts);

// True when the trigger is present right now (no waiting).
bool trigger_present(const std::filesystem::path& dir);

// Reads the manifest without waiting; verifies listed files; optionally
// deletes the trigger. Used by the single-process test mode.
std::vector<std::string> read_manifest(const std::filesystem::path& dir);

// Moves the manifest-listed payload plus the manifest itself into
// dir/archive/iter_<n>/ so the next iteration starts from a clean inbox.
void drain_exchange(const std::filesystem::path& dir,
                    const std::vector<std::string>& names, int iteration);

// Writes job_done.ok or job_fail.ok (empty files).
void signal_terminal(const std::filesystem::path& dir, bool success);

// Failure dominates: job_fail.ok present => failed, regardless of job_done.ok.
enum class TerminalState { none, done, failed };
TerminalState terminal_state(const std::filesystem::path& dir);

}  // namespace dra
