#include "ssb/cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "ssb/cli/experiments.hpp"

namespace ssb::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::optional<double> get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
    return d;
}

std::optional<std::vector<double>> get_numbers(const json& obj, const char* key,
                                               const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + "." + key + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::optional<std::uint64_t> get_count(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

template <typename T>
void put(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    reject_unknown(j, {"experiment", "model", "grid", "tolerances", "output", "jobs", "trials", "seed"},
                   "config");
    ExperimentConfig cfg;
    if (j.contains("experiment")) {
        if (!j.at("experiment").is_string()) throw ConfigError("config.experiment must be a string");
        cfg.experiment = j.at("experiment").get<std::string>();
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m,
                       {"lambda", "mu", "a_sextic", "mass", "hbar", "omega", "a", "b", "alpha", "alphas",
                        "separations", "omega_plus", "omega_minus"},
                       "model");
        cfg.model.lambda = get_number(m, "lambda", "model");
        cfg.model.mu = get_number(m, "mu", "model");
        cfg.model.a_sextic = get_number(m, "a_sextic", "model");
        cfg.model.mass = get_number(m, "mass", "model");
        cfg.model.hbar = get_number(m, "hbar", "model");
        cfg.model.omega = get_number(m, "omega", "model");
        cfg.model.a = get_number(m, "a", "model");
        cfg.model.b = get_number(m, "b", "model");
        cfg.model.alpha = get_number(m, "alpha", "model");
        cfg.model.alphas = get_numbers(m, "alphas", "model");
        cfg.model.separations = get_numbers(m, "separations", "model");
        cfg.model.omega_plus = get_number(m, "omega_plus", "model");
        cfg.model.omega_minus = get_number(m, "omega_minus", "model");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, {"xmin", "xmax", "n"}, "grid");
        cfg.grid.xmin = get_number(g, "xmin", "grid");
        cfg.grid.xmax = get_number(g, "xmax", "grid");
        if (auto n = get_count(g, "n", "grid")) cfg.grid.n = static_cast<std::size_t>(*n);
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        reject_unknown(t, {"degeneracy", "residual"}, "tolerances");
        if (auto d = get_number(t, "degeneracy", "tolerances")) cfg.tolerances.degeneracy = *d;
        cfg.tolerances.residual = get_number(t, "residual", "tolerances");
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("config.output must be a string");
        cfg.output = j.at("output").get<std::string>();
    }
    if (auto v = get_count(j, "jobs", "config")) cfg.jobs = static_cast<std::size_t>(*v);
    if (auto v = get_count(j, "trials", "config")) cfg.trials = static_cast<std::size_t>(*v);
    if (auto v = get_count(j, "seed", "config")) cfg.seed = *v;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["experiment"] = cfg.experiment;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    put(m, "lambda", cfg.model.lambda);
    put(m, "mu", cfg.model.mu);
    put(m, "a_sextic", cfg.model.a_sextic);
    put(m, "mass", cfg.model.mass);
    put(m, "hbar", cfg.model.hbar);
    put(m, "omega", cfg.model.omega);
    put(m, "a", cfg.model.a);
    put(m, "b", cfg.model.b);
    put(m, "alpha", cfg.model.alpha);
    put(m, "alphas", cfg.model.alphas);
    put(m, "separations", cfg.model.separations);
    put(m, "omega_plus", cfg.model.omega_plus);
    put(m, "omega_minus", cfg.model.omega_minus);
    j["model"] = m;
    nlohmann::ordered_json g = nlohmann::ordered_json::object();
    put(g, "xmin", cfg.grid.xmin);
    put(g, "xmax", cfg.grid.xmax);
    put(g, "n", cfg.grid.n);
    j["grid"] = g;
    j["tolerances"]["degeneracy"] = cfg.tolerances.degeneracy;
    if (cfg.tolerances.residual) j["tolerances"]["residual"] = *cfg.tolerances.residual;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    return j;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.experiment.empty()) throw ConfigError("no experiment given");
    if (!is_experiment(cfg.experiment)) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    if (cfg.grid.n && *cfg.grid.n < 3) throw ConfigError("grid.n must be at least 3");
    if (cfg.grid.xmin && cfg.grid.xmax && !(*cfg.grid.xmin < *cfg.grid.xmax)) {
        throw ConfigError("grid.xmin must be below grid.xmax");
    }
    if (!(cfg.tolerances.degeneracy > 0.0)) throw ConfigError("tolerances.degeneracy must be positive");
    if (cfg.tolerances.residual && !(*cfg.tolerances.residual > 0.0)) {
        throw ConfigError("tolerances.residual must be positive");
    }
    if (cfg.trials == 0) throw ConfigError("trials must be at least 1");
    if (cfg.model.a && cfg.model.a_sextic && *cfg.model.a != *cfg.model.a_sextic &&
        (cfg.experiment == "sextic-ground" || cfg.experiment == "sombrero-gap")) {
        throw ConfigError("model.a and model.a_sextic disagree");
    }
    if (cfg.model.alpha && cfg.model.alphas) throw ConfigError("give either model.alpha or model.alphas");
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SSB_LAB_OUT"); env && *env) return env;
    if (cfg.output) return *cfg.output;
    return kDefaultOutputDir;
}

std::size_t resolve_jobs(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::optional<double> sextic_width(const ModelSpec& m) {
    return m.a_sextic ? m.a_sextic : m.a;
}

}  // namespace ssb::cli
