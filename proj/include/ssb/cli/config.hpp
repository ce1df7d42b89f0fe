#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ssb::cli {

// Invalid config file or flag combination; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every field is optional; experiments fill in their own defaults.
struct ModelSpec {
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<double> a_sextic;
    std::optional<double> mass;
    std::optional<double> hbar;
    std::optional<double> omega;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> alpha;
    std::optional<std::vector<double>> alphas;
    std::optional<std::vector<double>> separations;
    std::optional<double> omega_plus;
    std::optional<double> omega_minus;
};

struct GridSpec {
    std::optional<double> xmin;
    std::optional<double> xmax;
    std::optional<std::size_t> n;
};

struct Tolerances {
    double degeneracy = 1e-8;
    // Replaces the solver's residual bound in residual checks when set.
    std::optional<double> residual;
};

struct ExperimentConfig {
    std::string experiment;
    ModelSpec model;
    GridSpec grid;
    Tolerances tolerances;
    std::optional<std::string> output;
    std::size_t jobs = 0;  // 0: one worker per processor
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
};

inline constexpr const char* kDefaultOutputDir = "ssb-lab-out";

// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolved config as written into the report. Output directory and worker
// count are left out so reports do not depend on where or how they ran.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

// flag > SSB_LAB_OUT > config file > default
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::string>& flag);

std::size_t resolve_jobs(std::size_t requested);

// a_sextic, with the generic "a" accepted as an alias.
std::optional<double> sextic_width(const ModelSpec& m);

}  // namespace ssb::cli
