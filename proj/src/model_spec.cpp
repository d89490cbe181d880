#include "model_spec.hpp"

#include <algorithm>
#include <sstream>

#include "csv.hpp"
#include "errors.hpp"

namespace dra {

std::vector<std::string> ModelSpec::design_labels() const {
    std::vector<std::string> labels;
    if (!no_intercept) labels.push_back("Intercept");
    labels.insert(labels.end(), independent_vars.begin(), independent_vars.end());
    return labels;
}

namespace {

std::string join_ws(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ' ';
        out += items[i];
    }
    return out;
}

std::vector<int> parse_dp_list(const std::string& text) {
    std::vector<int> out;
    for (auto& tok : split_ws(text)) {
        size_t used = 0;
        int dp = std::stoi(tok, &used);
        if (used != tok.size() || dp <= 0 || dp > 999)
            throw ConfigError("invalid dp_cd '" + tok + "' (positive, at most 3 digits)");
        out.push_back(dp);
    }
    return out;
}

void apply_key(ModelSpec& spec, const std::string& key, const std::string& value,
               const std::string& origin) {
    std::string k = to_lower(key);
    auto ctx = [&] { return origin + ": " + key; };
    if (k == "runid") spec.run_id = value;
    else if (k == "msreqid") spec.request_id = value;
    else if (k == "reg_ds_in") spec.reg_ds_in = value;
    else if (k == "dp_cd_list") spec.dp_cd_list = parse_dp_list(value);
    else if (k == "regr_type_cd") {
        if (value == "1") spec.family = Family::linear;
        else if (value == "2") spec.family = Family::logistic;
        else throw ConfigError("regr_type_cd must be 1 (linear) or 2 (logistic), got '" + value + "'");
    }
    else if (k == "dependent_vars") {
        auto vars = split_ws(value);
        if (vars.size() != 1)
            throw ConfigError("dependent_vars must name exactly one variable");
        spec.dependent_var = vars[0];
    }
    else if (k == "independent_vars") spec.independent_vars = split_ws(value);
    else if (k == "noint") spec.no_intercept = iequals(value, "noint") || value == "1";
    else if (k == "freq") spec.freq_var = value;
    else if (k == "weight") spec.weight_var = value;
    else if (k == "tbl_intial_est" || k == "tbl_initial_est") spec.tbl_initial_est = value;
    else if (k == "xconv") spec.xconv = parse_double(value, ctx());
    else if (k == "max_iter_nb") spec.max_iter_nb = static_cast<int>(parse_double(value, ctx()));
    else if (k == "alpha") spec.alpha = parse_double(value, ctx());
    else if (k == "groups") spec.groups = static_cast<long>(parse_double(value, ctx()));
    else if (k == "wait_time_min") spec.wait_time_min = parse_double(value, ctx());
    else if (k == "wait_time_max") spec.wait_time_max = parse_double(value, ctx());
    else if (k == "test_env_cd") spec.test_env_cd = static_cast<int>(parse_double(value, ctx()));
    else if (k == "max_numb_of_grp") spec.max_numb_of_grp = static_cast<long>(parse_double(value, ctx()));
    else if (k == "min_count_per_grp_glob") spec.min_count_per_grp_glob = static_cast<long>(parse_double(value, ctx()));
    else if (k == "run_deadline_sec") spec.run_deadline_sec = parse_double(value, ctx());
    else throw ConfigError(origin + ": unknown parameter '" + key + "'");
}

void validate(const ModelSpec& spec, const std::string& origin) {
    if (spec.run_id.empty()) throw ConfigError(origin + ": RunID is required");
    if (spec.reg_ds_in.empty()) throw ConfigError(origin + ": reg_ds_in is required");
    if (spec.dependent_var.empty()) throw ConfigError(origin + ": dependent_vars is required");
    if (spec.independent_vars.empty()) throw ConfigError(origin + ": independent_vars is required");
    if (!(spec.xconv > 0)) throw ConfigError(origin + ": xconv must be positive");
    if (spec.max_iter_nb < 1) throw ConfigError(origin + ": max_iter_nb must be at least 1");
    if (!(spec.alpha > 0 && spec.alpha < 1)) throw ConfigError(origin + ": alpha must be in (0,1)");
    if (spec.groups < 1) throw ConfigError(origin + ": groups must be at least 1");
    if (spec.min_count_per_grp_glob < 1)
        throw ConfigError(origin + ": min_count_per_grp_glob must be at least 1");
    std::vector<std::string> names = spec.independent_vars;
    names.push_back(spec.dependent_var);
    for (auto& n : names) {
        std::string low = to_lower(n);
        if (std::count_if(names.begin(), names.end(),
                          [&](const std::string& m) { return to_lower(m) == low; }) > 1)
            throw ConfigError(origin + ": variable '" + n + "' listed more than once");
    }
}

}  // namespace

ModelSpec parse_run_config_text(std::string_view text, const std::string& origin) {
    ModelSpec spec;
    std::istringstream is{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t");
        auto e = line.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        line = line.substr(b, e - b + 1);
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(line_no) +
                              ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend + 1);
        auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        apply_key(spec, key, value, origin + " line " + std::to_string(line_no));
    }
    validate(spec, origin);
    return spec;
}

ModelSpec parse_run_config(const std::string& path) {
    return parse_run_config_text(read_text_file(path), path);
}

ParamSet spec_to_params(const ModelSpec& spec, int iter_nb, bool last_iter, double phi) {
    ParamSet p;
    p.set("RunID", spec.run_id);
    p.set("reg_ds_in", spec.reg_ds_in);
    p.set("independent_vars", join_ws(spec.independent_vars));
    p.set("dependent_vars", spec.dependent_var);
    p.set("regr_type_cd", spec.family == Family::linear ? "1" : "2");
    if (spec.no_intercept) p.set("NOINT", "NOINT");
    if (!spec.freq_var.empty()) p.set("freq", spec.freq_var);
    if (!spec.weight_var.empty()) p.set("weight", spec.weight_var);
    p.set("xconv", format_double(spec.xconv));
    p.set("alpha", format_double(spec.alpha));
    p.set("groups", std::to_string(spec.groups));
    p.set("max_numb_of_grp", std::to_string(spec.max_numb_of_grp));
    p.set("min_count_per_grp_glob", std::to_string(spec.min_count_per_grp_glob));
    p.set("test_env_cd", std::to_string(spec.test_env_cd));
    p.set("iter_nb", std::to_string(iter_nb));
    p.set("last_iter_in", last_iter ? "1" : "0");
    p.set("end_job_dp_in", last_iter ? "1" : "0");
    p.set("phi_in", format_double(phi));
    return p;
}

ModelSpec spec_from_params(const ParamSet& params) {
    ModelSpec spec;
    spec.run_id = params.get_or("RunID", "run");
    spec.reg_ds_in = params.get("reg_ds_in");
    spec.independent_vars = split_ws(params.get("independent_vars"));
    spec.dependent_var = params.get("dependent_vars");
    spec.family = params.get("regr_type_cd") == "1" ? Family::linear : Family::logistic;
    spec.no_intercept = params.has("NOINT");
    spec.freq_var = params.get_or("freq", "");
    spec.weight_var = params.get_or("weight", "");
    spec.xconv = parse_double(params.get_or("xconv", "1e-4"), "xconv");
    spec.alpha = parse_double(params.get_or("alpha", "0.05"), "alpha");
    spec.groups = static_cast<long>(parse_double(params.get_or("groups", "10"), "groups"));
    spec.max_numb_of_grp = static_cast<long>(
        parse_double(params.get_or("max_numb_of_grp", "10000"), "max_numb_of_grp"));
    spec.min_count_per_grp_glob = static_cast<long>(parse_double(
        params.get_or("min_count_per_grp_glob", "6"), "min_count_per_grp_glob"));
    spec.test_env_cd = static_cast<int>(
        parse_double(params.get_or("test_env_cd", "0"), "test_env_cd"));
    return spec;
}

}  // namespace dra
