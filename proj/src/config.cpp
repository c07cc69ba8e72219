#include "bppp/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bppp {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config key `" + key + "`: expected a boolean, got `" + value + "`");
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key `" + key + "`: expected a number, got `" + value + "`");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key `" + key + "`: expected an integer, got `" + value + "`");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(parse_double(key, cell));
    }
    if (out.empty()) throw ConfigError("config key `" + key + "`: empty list");
    return out;
}

}  // namespace

ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    ConfigMap out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "initial_window", "gamma",          "delta",          "dynamic_prior_mean",
        "tc_bps",         "strategy",       "strategies",     "seed",
        "draws",          "degenerate_draws", "nu_override",  "position_cap",
        "gross_cap",      "benchmark_asset", "sample_std",    "drift_turnover",
        "mv_window",      "momentum_signal", "max_iterations", "gradient_tolerance",
        "step_tolerance", "memory_pairs",   "mask_mode",      "exec",
        "slab_c",         "rho",            "p0",             "max_sweeps",
        "hs_tolerance",   "residual_convention", "ce_gammas", "factors",
        "signals",        "manifest",       "out_dir",        "synth",
        "synth_assets",   "synth_signals",  "synth_months",   "synth_active",
        "synth_theta",    "synth_noise",    "synth_seed"};
    return keys;
}

void apply_config(RunSettings& s, const ConfigMap& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "initial_window") s.base.initial_window = static_cast<int>(parse_int(key, value));
        else if (key == "gamma") s.base.gamma = parse_double(key, value);
        else if (key == "delta") s.base.delta = parse_double(key, value);
        else if (key == "dynamic_prior_mean") s.base.dynamic_prior_mean = parse_bool(key, value);
        else if (key == "tc_bps") s.base.tc_bps = parse_double_list(key, value);
        else if (key == "strategy") { s.base.strategy = parse_strategy(value); s.strategies = {s.base.strategy}; }
        else if (key == "strategies") {
            s.strategies.clear();
            std::stringstream ss(value);
            std::string cell;
            while (std::getline(ss, cell, ','))
                if (!trim(cell).empty()) s.strategies.push_back(parse_strategy(trim(cell)));
            if (s.strategies.empty()) throw ConfigError("config key `strategies`: empty list");
        }
        else if (key == "seed") s.base.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "draws") s.base.draws = static_cast<int>(parse_int(key, value));
        else if (key == "degenerate_draws") s.base.degenerate_draws = parse_bool(key, value);
        else if (key == "nu_override") s.base.nu_override = parse_double(key, value);
        else if (key == "position_cap") s.base.constraints.position_cap = parse_double(key, value);
        else if (key == "gross_cap") s.base.constraints.gross_cap = parse_double(key, value);
        else if (key == "benchmark_asset") s.base.benchmark_asset = static_cast<int>(parse_int(key, value));
        else if (key == "sample_std") s.base.sample_std = parse_bool(key, value);
        else if (key == "drift_turnover") s.base.drift_turnover = parse_bool(key, value);
        else if (key == "mv_window") s.base.mv_window = static_cast<int>(parse_int(key, value));
        else if (key == "momentum_signal") s.base.momentum_signal = value;
        else if (key == "max_iterations") s.base.solver.max_iterations = static_cast<int>(parse_int(key, value));
        else if (key == "gradient_tolerance") s.base.solver.gradient_tolerance = parse_double(key, value);
        else if (key == "step_tolerance") s.base.solver.step_tolerance = parse_double(key, value);
        else if (key == "memory_pairs") s.base.solver.memory_pairs = static_cast<int>(parse_int(key, value));
        else if (key == "mask_mode") {
            if (value == "projection") s.base.solver.mask_mode = MaskMode::FromProjection;
            else if (value == "all_active") s.base.solver.mask_mode = MaskMode::AllActive;
            else throw ConfigError("config key `mask_mode`: expected projection|all_active");
        }
        else if (key == "exec") {
            if (value == "serial") s.base.solver.exec = ExecMode::Serial;
            else if (value == "parallel") s.base.solver.exec = ExecMode::Parallel;
            else throw ConfigError("config key `exec`: expected serial|parallel");
        }
        else if (key == "slab_c") s.base.horseshoe.slab_c = parse_double(key, value);
        else if (key == "rho") s.base.horseshoe.rho = parse_double(key, value);
        else if (key == "p0") s.base.horseshoe.p0 = parse_double(key, value);
        else if (key == "max_sweeps") s.base.horseshoe.max_sweeps = static_cast<int>(parse_int(key, value));
        else if (key == "hs_tolerance") s.base.horseshoe.tolerance = parse_double(key, value);
        else if (key == "residual_convention") {
            if (value == "asset") s.base.horseshoe.residual = ResidualConvention::AssetPredictor;
            else if (value == "portfolio-gap") s.base.horseshoe.residual = ResidualConvention::PortfolioGap;
            else throw ConfigError("config key `residual_convention`: expected asset|portfolio-gap");
        }
        else if (key == "ce_gammas") s.ce_gammas = parse_double_list(key, value);
        else if (key == "factors") s.factors_csv = value;
        else if (key == "signals") s.signals_csv = value;
        else if (key == "manifest") s.manifest = value;
        else if (key == "out_dir") s.out_dir = value;
        else if (key == "synth") s.use_synthetic = parse_bool(key, value);
        else if (key == "synth_assets") s.synth.n_assets = static_cast<int>(parse_int(key, value));
        else if (key == "synth_signals") s.synth.n_signals = static_cast<int>(parse_int(key, value));
        else if (key == "synth_months") s.synth.n_months = static_cast<int>(parse_int(key, value));
        else if (key == "synth_active") s.synth.n_active = static_cast<int>(parse_int(key, value));
        else if (key == "synth_theta") s.synth.theta_scale = parse_double(key, value);
        else if (key == "synth_noise") s.synth.noise_scale = parse_double(key, value);
        else if (key == "synth_seed") s.synth.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else throw ConfigError("unknown config key: " + key);
    }
}

}  // namespace bppp
