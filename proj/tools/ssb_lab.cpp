// ssb-lab: run symmetry-breaking experiments and emit reports / figure data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ssb/cli/config.hpp"
#include "ssb/cli/experiments.hpp"
#include "ssb/cli/report.hpp"

namespace {

using namespace ssb::cli;

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::size_t> grid_n;
    std::optional<double> grid_xmin;
    std::optional<double> grid_xmax;
    std::optional<double> tol_degeneracy;
    std::optional<double> tol_residual;
    std::optional<double> alpha;
    std::optional<std::vector<double>> alphas;
    std::optional<std::vector<double>> separations;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::optional<double> a_sextic;
    std::optional<double> omega;
    std::optional<double> omega_plus;
    std::optional<double> omega_minus;
    std::optional<double> mass;
    std::optional<double> hbar;
    std::optional<std::size_t> jobs;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "JSON experiment config");
    app->add_option("--out", o.out, "output directory (beats SSB_LAB_OUT and the config file)");
    app->add_option("--grid-n", o.grid_n, "number of grid samples");
    app->add_option("--grid-xmin", o.grid_xmin, "left end of the grid");
    app->add_option("--grid-xmax", o.grid_xmax, "right end of the grid");
    app->add_option("--tol-degeneracy", o.tol_degeneracy, "level clustering tolerance");
    app->add_option("--tol-residual", o.tol_residual, "residual bound used by residual checks");
    app->add_option("--alpha", o.alpha, "barrier height (single value)");
    app->add_option("--alphas", o.alphas, "barrier heights for a sweep")->delimiter(',');
    app->add_option("--separations", o.separations, "double-oscillator separations")->delimiter(',');
    app->add_option("--a", o.a, "outer wall / well separation (sextic: width parameter)");
    app->add_option("--b", o.b, "barrier half width");
    app->add_option("--lambda", o.lambda, "quartic coefficient");
    app->add_option("--mu", o.mu, "quadratic coefficient");
    app->add_option("--a-sextic", o.a_sextic, "sextic width parameter");
    app->add_option("--omega", o.omega, "oscillator frequency");
    app->add_option("--omega-plus", o.omega_plus, "upper spinor channel frequency");
    app->add_option("--omega-minus", o.omega_minus, "lower spinor channel frequency");
    app->add_option("--mass", o.mass, "particle mass");
    app->add_option("--hbar", o.hbar, "Planck constant");
    app->add_option("--jobs", o.jobs, "worker threads for sweeps (default: processors)");
    app->add_option("--trials", o.trials, "randomized trials (pair-lemma)");
    app->add_option("--seed", o.seed, "random seed (pair-lemma)");
}

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

ExperimentConfig resolve(const std::string& experiment, const Overrides& o) {
    ExperimentConfig cfg = o.config ? load_config(*o.config) : ExperimentConfig{};
    if (!cfg.experiment.empty() && cfg.experiment != experiment && !experiment.empty()) {
        throw ConfigError("config file is for '" + cfg.experiment + "', not '" + experiment + "'");
    }
    if (!experiment.empty()) cfg.experiment = experiment;
    take(cfg.grid.n, o.grid_n);
    take(cfg.grid.xmin, o.grid_xmin);
    take(cfg.grid.xmax, o.grid_xmax);
    if (o.tol_degeneracy) cfg.tolerances.degeneracy = *o.tol_degeneracy;
    take(cfg.tolerances.residual, o.tol_residual);
    if (o.alpha) {
        cfg.model.alpha = o.alpha;
        cfg.model.alphas.reset();
    }
    if (o.alphas) {
        cfg.model.alphas = o.alphas;
        cfg.model.alpha.reset();
    }
    take(cfg.model.separations, o.separations);
    take(cfg.model.a, o.a);
    take(cfg.model.b, o.b);
    take(cfg.model.lambda, o.lambda);
    take(cfg.model.mu, o.mu);
    take(cfg.model.a_sextic, o.a_sextic);
    take(cfg.model.omega, o.omega);
    take(cfg.model.omega_plus, o.omega_plus);
    take(cfg.model.omega_minus, o.omega_minus);
    take(cfg.model.mass, o.mass);
    take(cfg.model.hbar, o.hbar);
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.trials) cfg.trials = *o.trials;
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

int run(const std::string& experiment, const Overrides& o) {
    const ExperimentConfig cfg = resolve(experiment, o);
    const RunResult result = run_experiment(cfg);
    const auto dir = resolve_output_dir(cfg, o.out);
    write_outputs(result, dir);
    for (const auto& c : result.checks) {
        std::printf("%s %s: %s %s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.relation == "==" ? (c.measured != 0.0 ? "true" : "false") : format_double(c.measured).c_str(),
                    c.relation.c_str(),
                    c.relation == "==" ? (c.tolerance != 0.0 ? "true" : "false") : format_double(c.tolerance).c_str());
    }
    for (const auto& e : result.report["errors"]) {
        std::printf("ERROR %s: %s\n", e["kind"].get<std::string>().c_str(), e["message"].get<std::string>().c_str());
    }
    std::printf("%s -> %s\n", result.passed ? "passed" : "FAILED", (dir / "report.json").string().c_str());
    return result.passed ? 0 : 1;
}

int figure(int number, const Overrides& o) {
    const ExperimentConfig cfg = resolve("", o);
    const Table t = figure_data(number, cfg);
    const auto dir = resolve_output_dir(cfg, o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    const auto path = dir / (t.name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_csv(out, t);
    std::printf("%s\n", path.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ssb-lab: spontaneous symmetry breakdown laboratory"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Overrides overrides;
    std::string chosen;
    for (const auto& entry : catalog()) {
        auto* sub = app.add_subcommand(entry.name, entry.summary);
        add_flags(sub, overrides);
        sub->callback([&chosen, name = entry.name] { chosen = name; });
    }

    int figure_number = 0;
    auto* fig = app.add_subcommand("figure", "write x, V(x) data for figures 1..5");
    fig->add_option("number", figure_number, "figure number")->required();
    add_flags(fig, overrides);

    auto* list = app.add_subcommand("list", "print the experiment catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : catalog()) std::printf("%-24s %s\n", e.name.c_str(), e.summary.c_str());
            return 0;
        }
        if (fig->parsed()) return figure(figure_number, overrides);
        return run(chosen, overrides);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "ssb-lab: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ssb-lab: %s\n", e.what());
        return 2;
    }
}
