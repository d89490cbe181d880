// Command-line entry points: coordinator and worker runtimes, the
// single-process test mode, the pooled-fit reference, dataset
// partitioning, and report rendering.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "coordinator.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "fs_transport.hpp"
#include "local_mode.hpp"
#include "oracle.hpp"
#include "partition.hpp"
#include "report.hpp"
#include "worker.hpp"

namespace fs = std::filesystem;
using namespace dra;

namespace {

std::vector<size_t> parse_sizes(const std::string& text) {
    std::vector<size_t> sizes;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) sizes.push_back(std::stoul(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return sizes;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Federated GLM regression over summary-level exchanges"};
    app.require_subcommand(1);

    std::string config_path, root, request_id, data_path, out_dir, msoc_dir, prefix;
    std::string sizes_text, name = "dataset", infolder = ".";
    double wait_min = 3.0, wait_max = 7200.0, deadline = 14400.0;
    std::uint64_t seed = 0;
    size_t k_parts = 0;
    bool site_dummies = false;

    auto* c_coord = app.add_subcommand("coordinator", "Run the analysis center");
    c_coord->add_option("--config", config_path, "run configuration file")->required();
    c_coord->add_option("--root", root, "shared request root directory")->required();

    auto* c_worker = app.add_subcommand("worker", "Run a data partner");
    c_worker->add_option("--config", config_path, "worker configuration file")->required();
    c_worker->add_option("--root", root, "shared request root directory")->required();
    c_worker->add_option("--request-id", request_id, "MSReqID of the request")->required();
    c_worker->add_option("--wait-min", wait_min, "initial trigger poll interval, seconds");
    c_worker->add_option("--wait-max", wait_max, "poll interval cap, seconds");
    c_worker->add_option("--deadline", deadline, "overall wait budget, seconds");

    auto* c_local = app.add_subcommand("local", "Single-process test mode");
    c_local->add_option("--config", config_path, "run configuration file")->required();
    c_local->add_option("--data-dir", data_path, "directory with <reg_ds_in>_<dp>.csv files")
        ->required();
    c_local->add_option("--out", out_dir, "request directory for the run")->required();

    auto* c_oracle = app.add_subcommand("oracle", "Pooled single-machine reference fit");
    c_oracle->add_option("--config", config_path, "run configuration file")->required();
    c_oracle->add_option("--data", data_path, "pooled analytic dataset CSV")->required();
    c_oracle->add_option("--out", out_dir, "output directory")->required();
    c_oracle->add_option("--infolder", infolder, "directory holding tbl_intial_est");

    auto* c_part = app.add_subcommand("partition", "Split a dataset across partners");
    c_part->add_option("--input", data_path, "input CSV")->required();
    c_part->add_option("--out-dir", out_dir, "output directory")->required();
    c_part->add_option("--name", name, "output base name (<name>_<k>.csv)");
    c_part->add_option("--sizes", sizes_text, "comma-separated part sizes");
    c_part->add_option("--k", k_parts, "number of near-equal parts");
    c_part->add_option("--seed", seed, "shuffle seed");
    c_part->add_flag("--site-dummies", site_dummies, "append dummy_dp_var<k> columns");

    auto* c_report = app.add_subcommand("report", "Render a results report");
    c_report->add_option("--msoc", msoc_dir, "msoc directory with output datasets")->required();
    c_report->add_option("--prefix", prefix, "RunID prefix")->required();
    c_report->add_option("--out", out_dir, "report output directory (default: msoc)");

    CLI11_PARSE(app, argc, argv);

    if (c_coord->parsed()) {
        ModelSpec spec = parse_run_config(config_path);
        FsCoordinatorLink link(root, spec);
        Eigen::VectorXd beta0 = initial_beta(spec, link.layout().inputfiles());
        fs::path dplocal = link.layout().dplocal();
        return drive_coordinator(spec, link, link.layout().msoc(), beta0, &dplocal);
    }
    if (c_worker->parsed()) {
        WorkerConfig cfg = parse_worker_config(config_path);
        WatchOptions watch;
        watch.wait_min_sec = wait_min;
        watch.wait_max_sec = wait_max;
        watch.deadline_sec = deadline;
        FsWorkerLink link(root, request_id, cfg.dp_cd, watch);
        cfg.dplocal_dir = link.layout().dplocal();
        return run_worker(cfg, link);
    }
    if (c_local->parsed()) {
        ModelSpec spec = parse_run_config(config_path);
        return run_local(spec, out_dir, data_path);
    }
    if (c_oracle->parsed()) {
        ModelSpec spec = parse_run_config(config_path);
        AnalyticDataset data = load_analytic_csv(data_path, 0);
        Eigen::VectorXd beta0 = initial_beta(spec, infolder);
        FitOutputs out = pooled_fit(data, spec, beta0);
        emit_outputs(out, out_dir, spec.run_id);
        return 0;
    }
    if (c_part->parsed()) {
        PartitionOptions options;
        options.sizes = parse_sizes(sizes_text);
        options.k = k_parts;
        options.seed = seed;
        options.add_site_dummies = site_dummies;
        auto written = partition_csv(data_path, options, out_dir, name);
        for (auto& p : written) std::printf("%s\n", p.string().c_str());
        return 0;
    }
    if (c_report->parsed()) {
        render_report(msoc_dir, prefix, out_dir.empty() ? fs::path(msoc_dir) : fs::path(out_dir));
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "error (non-convergence): %s\n", e.what());
        return 2;
    } catch (const ProtocolError& e) {
        std::fprintf(stderr, "error (protocol): %s\n", e.what());
        return 3;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error (data): %s\n", e.what());
        return 4;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error (configuration): %s\n", e.what());
        return 4;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error (numerical): %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
