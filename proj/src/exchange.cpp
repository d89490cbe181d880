#include "exchange.hpp"

#include <algorithm>
#include <thread>

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

namespace {

const std::vector<std::string> kRequiredParams = {
    "reg_ds_in",       "independent_vars", "dependent_vars", "regr_type_cd",
    "iter_nb",         "last_iter_in",     "end_job_dp_in"};

void check_clean(const std::string& s) {
    if (s.find_first_of(",\"\r\n") != std::string::npos)
        throw ProtocolError("parameter text contains a forbidden character: '" + s + "'");
}

}  // namespace

bool ParamSet::has(const std::string& name) const {
    for (auto& [n, v] : pairs)
        if (n == name) return true;
    return false;
}

const std::string& ParamSet::get(const std::string& name) const {
    for (auto& [n, v] : pairs)
        if (n == name) return v;
    throw ProtocolError("missing parameter: " + name);
}

std::string ParamSet::get_or(const std::string& name, const std::string& fallback) const {
    for (auto& [n, v] : pairs)
        if (n == name) return v;
    return fallback;
}

void ParamSet::set(const std::string& name, const std::string& value) {
    for (auto& [n, v] : pairs)
        if (n == name) {
            v = value;
            return;
        }
    pairs.emplace_back(name, value);
}

std::string encode_params(const ParamSet& params) {
    std::string out = "M_var_nm,M_var_value\n";
    for (auto& [n, v] : params.pairs) {
        check_clean(n);
        check_clean(v);
        out += n;
        out += ',';
        out += v;
        out += '\n';
    }
    return out;
}

ParamSet decode_params(std::string_view bytes) {
    CsvTable t = parse_csv(bytes);
    if (t.header.size() != 2 || t.header[0] != "M_var_nm" || t.header[1] != "M_var_value")
        throw ProtocolError("parameter file header must be M_var_nm,M_var_value");
    ParamSet p;
    for (auto& row : t.rows) {
        if (row.size() != 2)
            throw ProtocolError("parameter row must have exactly two fields");
        if (p.has(row[0]))
            throw ProtocolError("duplicate parameter name: " + row[0]);
        p.pairs.emplace_back(row[0], row[1]);
    }
    for (auto& req : kRequiredParams)
        if (!p.has(req))
            throw ProtocolError("parameter file is missing required key: " + req);
    const std::string& regr = p.get("regr_type_cd");
    if (regr != "1" && regr != "2")
        throw ProtocolError("regr_type_cd must be 1 or 2, got '" + regr + "'");
    for (auto flag : {"last_iter_in", "end_job_dp_in"}) {
        const std::string& v = p.get(flag);
        if (v != "0" && v != "1")
            throw ProtocolError(std::string(flag) + " must be 0 or 1, got '" + v + "'");
    }
    return p;
}

void RequestLayout::create_worker_dirs() const {
    for (auto& d : {dplocal(), inputfiles(), msoc()})
        fs::create_directories(d);
}

void RequestLayout::create_coordinator_dirs(const std::vector<int>& partners) const {
    create_worker_dirs();
    for (int dp : partners)
        fs::create_directories(msoc_dp(dp));
}

void write_exchange(const fs::path& dir, const std::vector<NamedFile>& files) {
    if (fs::exists(dir / kTriggerFile))
        throw ProtocolError("stale trigger in " + dir.string() +
                            ": previous consumer has not drained");
    fs::create_directories(dir);
    std::string manifest;
    for (auto& [name, bytes] : files) {
        write_text_file((dir / name).string(), bytes);
        manifest += name;
        manifest += '\n';
    }
    write_text_file((dir / kManifestFile).string(), manifest);
    write_text_file((dir / kTriggerFile).string(), "");
}

bool trigger_present(const fs::path& dir) {
    return fs::exists(dir / kTriggerFile);
}

std::vector<std::string> read_manifest(const fs::path& dir) {
    std::string text = read_text_file((dir / kManifestFile).string());
    std::vector<std::string> names;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    for (auto& n : names)
        if (!fs::exists(dir / n))
            throw ProtocolError("manifest in " + dir.string() +
                                " references missing file: " + n);
    return names;
}

std::vector<std::string> watch_for_trigger(const fs::path& dir, const WatchOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    double interval = std::max(opts.wait_min_sec, 1e-4);
    for (;;) {
        if (opts.fail_watch_dp >= 0 && fs::exists(dir / kJobFailFile))
            throw WorkerFailed(opts.fail_watch_dp,
                               "partner " + std::to_string(opts.fail_watch_dp) +
                                   " signalled job_fail.ok");
        if (trigger_present(dir)) {
            auto names = read_manifest(dir);
            fs::remove(dir / kTriggerFile);
            return names;
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed >= opts.deadline_sec)
            throw TimeoutError("no trigger appeared in " + dir.string() + " within " +
                               format_double(opts.deadline_sec) + "s");
        std::this_thread::sleep_for(std::chrono::duration<double>(
            std::min(interval, opts.deadline_sec - elapsed)));
        interval = std::min(interval * 2.0, std::max(opts.wait_max_sec, 1e-4));
    }
}

void drain_exchange(const fs::path& dir, const std::vector<std::string>& names,
                    int iteration) {
    fs::path arch = dir / "archive" / ("iter_" + std::to_string(iteration));
    fs::create_directories(arch);
    for (auto& n : names)
        if (fs::exists(dir / n)) fs::rename(dir / n, arch / n);
    if (fs::exists(dir / kManifestFile)) fs::rename(dir / kManifestFile, arch / kManifestFile);
}

void signal_terminal(const fs::path& dir, bool success) {
    fs::create_directories(dir);
    write_text_file((dir / (success ? kJobDoneFile : kJobFailFile)).string(), "");
}

TerminalState terminal_state(const fs::path& dir) {
    if (fs::exists(dir / kJobFailFile)) return TerminalState::failed;
    if (fs::exists(dir / kJobDoneFile)) return TerminalState::done;
    return TerminalState::none;
}

}  // namespace dra
