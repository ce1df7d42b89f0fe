#include "ssb/cli/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "ssb/eigen.hpp"
#include "ssb/errors.hpp"
#include "ssb/lattice.hpp"
#include "ssb/models.hpp"
#include "ssb/quantize.hpp"
#include "ssb/spinor.hpp"
#include "ssb/symmetry.hpp"

namespace ssb::cli {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double get(const std::optional<double>& v, double fallback) { return v ? *v : fallback; }

Grid make_grid(const GridSpec& gs, Interval domain, std::size_t n_default) {
    return build_grid(gs.xmin.value_or(domain.lo), gs.xmax.value_or(domain.hi), gs.n.value_or(n_default));
}

// Walled experiments live on [-a, a]; only the sample count may change.
Grid walled_grid(const GridSpec& gs, double a, std::size_t n_default) {
    if ((gs.xmin && *gs.xmin != -a) || (gs.xmax && *gs.xmax != a)) {
        throw ConfigError("this experiment's domain is fixed to [-a, a]; set grid.n only");
    }
    return build_grid(-a, a, gs.n.value_or(n_default));
}

Json grid_json(const Grid& g) {
    return Json{{"xmin", g.xmin()}, {"xmax", g.xmax()}, {"n", g.n()}, {"h", g.h()}};
}

Json spectrum_json(const Spectrum& s) {
    double worst = 0.0;
    for (double r : s.residuals) worst = std::max(worst, r);
    return Json{{"levels", s.levels}, {"max_residual", worst}, {"residual_bound", s.tolerance}};
}

Json degeneracy_json(const DegeneracyReport& d) {
    Json clusters = Json::array();
    for (const auto& c : d.clusters) {
        clusters.push_back(Json{{"mean", c.mean}, {"multiplicity", c.multiplicity}, {"spread", c.spread}});
    }
    return Json{{"tol", d.tol}, {"clusters", clusters}};
}

Json verdict_json(const SSBVerdict& v) {
    Json j{{"ground_multiplicity", v.ground_multiplicity},
           {"ground_energy", v.ground_energy},
           {"commutator_norm", v.commutator_norm},
           {"broken", v.broken},
           {"tol", v.tol}};
    if (v.pair) {
        j["pair_overlap"] = v.pair_overlap;
        j["pair_mismatch"] = v.pair_mismatch;
        j["overlap_ab"] = v.pair->overlap_ab;
    }
    return j;
}

double residual_bound(const ExperimentConfig& cfg, const Spectrum& s) {
    return cfg.tolerances.residual.value_or(s.tolerance);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return v.size() >= 2;
}

std::string alpha_tag(double alpha) { return "alpha=" + format_double(alpha); }

template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(count);
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(jobs, count);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

// ---------------------------------------------------------------- sombrero

struct SymmetricSolve {
    Grid grid;
    Spectrum spectrum;
    DegeneracyReport clusters;
    SSBVerdict verdict;
};

SymmetricSolve solve_symmetric(const PotentialModel& model, const Grid& g, double mass, double hbar,
                               std::size_t k, double tol) {
    const auto op = assemble_hamiltonian(g, model.sample(g), mass, hbar);
    SymmetricSolve out{g, eigensolve(op, k, g), {}, {}};
    out.clusters = cluster_degeneracies(out.spectrum.levels, tol);
    out.verdict = detect_ssb(op, out.spectrum, SymmetryOp::parity(g), tol);
    return out;
}

void sombrero_gap(const ExperimentConfig& cfg, ReportBuilder& rb) {
    const auto& m = cfg.model;
    const double tol = cfg.tolerances.degeneracy;
    const double mass = get(m.mass, 1.0);
    const double hbar = get(m.hbar, 1.0);

    const auto quartic = quartic_sombrero(get(m.lambda, 1.0), get(m.mu, 1.0));
    const auto sextic = sextic_factorized(sextic_width(m).value_or(1.0), mass, hbar);
    const auto q = solve_symmetric(quartic, make_grid(cfg.grid, quartic.domain_hint(), 1601), mass, hbar, 4, tol);
    const auto s = solve_symmetric(sextic, make_grid(cfg.grid, {-3.0, 3.0}, 2001), mass, hbar, 4, tol);

    Table levels{"sombrero_levels", {"model", "index", "energy", "residual"}, {}};
    for (const auto& [name, r] : {std::pair{"quartic", &q}, std::pair{"sextic", &s}}) {
        const double gap = r->spectrum.levels[1] - r->spectrum.levels[0];
        rb.note(name, Json{{"grid", grid_json(r->grid)},
                           {"spectrum", spectrum_json(r->spectrum)},
                           {"gap", gap},
                           {"degeneracy", degeneracy_json(r->clusters)},
                           {"verdict", verdict_json(r->verdict)}});
        const std::string p(name);
        rb.above(p + ".gap", gap, 10.0 * tol);
        rb.expect(p + ".broken", r->verdict.broken, false);
        rb.at_most(p + ".parity_commutator", r->verdict.commutator_norm, 1e-12);
        for (std::size_t i = 0; i < r->spectrum.size(); ++i) {
            levels.add({std::string(name), static_cast<std::int64_t>(i), r->spectrum.levels[i],
                        r->spectrum.residuals[i]});
        }
    }
    rb.note("params", Json{{"lambda", get(m.lambda, 1.0)},
                           {"mu", get(m.mu, 1.0)},
                           {"a_sextic", sextic_width(m).value_or(1.0)},
                           {"mass", mass},
                           {"hbar", hbar}});
    rb.attach(std::move(levels));
}

// ---------------------------------------------------------------- sextic

void sextic_ground(const ExperimentConfig& cfg, ReportBuilder& rb) {
    const auto& m = cfg.model;
    const double a = sextic_width(m).value_or(1.0);
    const double mass = get(m.mass, 1.0);
    const double hbar = get(m.hbar, 1.0);
    const double tol = cfg.tolerances.degeneracy;
    const auto model = sextic_factorized(a, mass, hbar);
    const Grid g = make_grid(cfg.grid, {-3.0, 3.0}, 2001);
    const auto op = assemble_hamiltonian(g, model.sample(g), mass, hbar);
    const auto s = eigensolve(op, 2, g);
    const auto verdict = detect_ssb(op, s, SymmetryOp::parity(g), tol);

    const auto& f = model.analytic()->ground_function;
    std::vector<double> exact(g.n());
    double err2 = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        exact[i] = f(g.x(i));
        const double d = s.vectors[0][i] - exact[i];
        err2 += d * d;
    }
    const double l2 = std::sqrt(err2 * g.h());
    const auto ann = annihilator_residual(a, g);
    const double exact_residual = residual_norm(op, exact, 0.0, g.h());

    rb.note("params", Json{{"a_sextic", a}, {"mass", mass}, {"hbar", hbar}});
    rb.note("grid", grid_json(g));
    rb.note("spectrum", spectrum_json(s));
    rb.note("ground_energy", s.levels[0]);
    rb.note("ground_l2_error", l2);
    rb.note("annihilator", Json{{"residual", ann.residual}, {"truncation_estimate", ann.bound}});
    rb.note("exact_ground_fd_residual", exact_residual);
    rb.note("verdict", verdict_json(verdict));

    rb.below("ground_energy.abs", std::abs(s.levels[0]), 1e-4);
    rb.below("ground_l2_error", l2, 1e-3);
    rb.at_most("ground.residual", s.residuals[0], residual_bound(cfg, s));
    rb.at_most("annihilator.residual", ann.residual, 2.0 * ann.bound + 1e-14);
    rb.above("gap", s.levels[1] - s.levels[0], 10.0 * tol);
    rb.expect("broken", verdict.broken, false);

    Table t{"sextic_ground", {"x", "V", "psi_fd", "f_exact"}, {}};
    const auto v = model.sample(g);
    for (std::size_t i = 0; i < g.n(); ++i) t.add({g.x(i), v[i], s.vectors[0][i], exact[i]});
    rb.attach(std::move(t));
}

// ---------------------------------------------------------------- double oscillator

void double_oscillator_limit(const ExperimentConfig& cfg, ReportBuilder& rb) {
    const auto& m = cfg.model;
    const double mass = get(m.mass, 1.0);
    const double omega = get(m.omega, 1.0);
    const double hbar = get(m.hbar, 1.0);
    const double tol = cfg.tolerances.degeneracy;
    const std::vector<double> seps =
        m.separations.value_or(std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5});
    for (std::size_t i = 0; i < seps.size(); ++i) {
        if (!(seps[i] >= 0.0) || (i > 0 && !(seps[i] > seps[i - 1]))) {
            throw ConfigError("model.separations must be non-negative and strictly ascending");
        }
    }
    if (seps.empty()) throw ConfigError("model.separations is empty");

    constexpr std::size_t k = 4;
    std::vector<Spectrum> spectra(seps.size());
    std::vector<Grid> grids(seps.size());
    parallel_for(seps.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
        const auto model = double_oscillator(mass, omega, seps[i], hbar);
        grids[i] = make_grid(cfg.grid, model.domain_hint(), 4001);
        spectra[i] = eigensolve(assemble_hamiltonian(grids[i], model.sample(grids[i]), mass, hbar), k, grids[i]);
    });

    // V = m w^2 (|x| - a)^2 is an oscillator of frequency sqrt2 w about each minimum.
    const double big_omega = std::numbers::sqrt2 * omega;
    Table t{"double_oscillator", {"a", "E0", "E1", "E2", "E3", "delta"}, {}};
    Json rows = Json::array();
    std::vector<double> deltas;
    for (std::size_t i = 0; i < seps.size(); ++i) {
        const auto& lv = spectra[i].levels;
        const double delta = lv[1] - lv[0];
        deltas.push_back(delta);
        t.add({seps[i], lv[0], lv[1], lv[2], lv[3], delta});
        rows.push_back(Json{{"a", seps[i]}, {"grid", grid_json(grids[i])}, {"levels", lv}, {"delta", delta}});
    }
    rb.note("params", Json{{"mass", mass}, {"omega", omega}, {"hbar", hbar}});
    rb.note("sweep", rows);

    if (seps.front() == 0.0) {
        double worst = 0.0;
        for (std::size_t n = 0; n < k; ++n) {
            const double exact = hbar * big_omega * (n + 0.5);
            worst = std::max(worst, std::abs(spectra[0].levels[n] - exact) / exact);
        }
        rb.below("a=0.oscillator_ladder.max_rel_error", worst, 1e-4);
    }
    if (seps.size() >= 2) rb.expect("splitting.strictly_decreasing", strictly_decreasing(deltas));
    const double single = 0.5 * hbar * big_omega;
    const auto& last = spectra.back().levels;
    const double approach = std::max(std::abs(last[0] - single), std::abs(last[1] - single)) / single;
    rb.note("largest_a", Json{{"a", seps.back()}, {"single_well_ground", single}, {"rel_distance", approach}});
    if (seps.back() >= 3.0) rb.below("largest_a.doublet_vs_single_well_ground", approach, 1e-3);

    // A finite separation never produces a degenerate ground level.
    const auto model = double_oscillator(mass, omega, seps.back(), hbar);
    const auto op = assemble_hamiltonian(grids.back(), model.sample(grids.back()), mass, hbar);
    rb.note("largest_a_verdict", verdict_json(detect_ssb(op, spectra.back(), SymmetryOp::parity(grids.back()), tol)));
    rb.attach(std::move(t));
}

// ---------------------------------------------------------------- U_alpha

void ualpha_levels(const ExperimentConfig& cfg, ReportBuilder& rb) {
    const auto& m = cfg.model;
    WellGeometry base;
    base.a = get(m.a, 2.0);
    base.b = get(m.b, 0.5);
    base.mass = get(m.mass, 1.0);
    base.hbar = get(m.hbar, 1.0);
    std::vector<double> alphas = m.alphas.value_or(std::vector<double>{10, 20, 50, 100, 200, 500});
    if (m.alpha) alphas = {*m.alpha};
    if (alphas.empty()) throw ConfigError("model.alphas is empty");
    base.alpha = alphas.front();
    base.validate();
    const Grid g = walled_grid(cfg.grid, base.a, kDefaultWellSamples);
    const std::size_t jobs = resolve_jobs(cfg.jobs);

    std::vector<RootReport> even(alphas.size());
    std::vector<RootReport> odd(alphas.size());
    parallel_for(alphas.size(), jobs, [&](std::size_t i) {
        WellGeometry gi = base;
        gi.alpha = alphas[i];
        even[i] = find_subbarrier_levels(gi, Parity::Even, g.n());
        odd[i] = find_subbarrier_levels(gi, Parity::Odd, g.n());
    });
    const auto sweep = alphas.size() >= 2 && std::is_sorted(alphas.begin(), alphas.end())
                           ? splitting_sweep(alphas, base, 1, jobs)
                           : std::vector<SweepRow>{};

    Table roots{"ualpha_roots", {"alpha", "parity", "index", "root", "fd", "rel_error"}, {}};
    Json per_alpha = Json::array();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        WellGeometry gi = base;
        gi.alpha = alphas[i];
        const std::string tag = alpha_tag(alphas[i]);
        double worst = 0.0;
        double squared = 0.0;
        Json entry{{"alpha", alphas[i]}};
        for (const RootReport* r : {&even[i], &odd[i]}) {
            const std::string p = to_string(r->parity);
            rb.expect(tag + "." + p + ".root_count_equals_fd_count", r->roots.size() == r->fd_levels.size());
            for (std::size_t j = 0; j < r->roots.size(); ++j) {
                const double fd = j < r->fd_levels.size() ? r->fd_levels[j] : std::nan("");
                const double rel = j < r->oracle_match.size() ? r->oracle_match[j] : std::nan("");
                if (std::isfinite(rel)) worst = std::max(worst, rel);
                roots.add({alphas[i], p, static_cast<std::int64_t>(j + 1), r->roots[j], fd, rel});
                const auto sq = squared_condition(r->roots[j], gi, r->parity);
                squared = std::max(squared, std::abs(sq.lhs - sq.rhs) / std::max({std::abs(sq.lhs), std::abs(sq.rhs), 1.0}));
            }
            entry[p] = Json{{"roots", r->roots}, {"fd_levels", r->fd_levels}, {"residuals", r->residuals}};
        }
        bool ordered = true;
        for (std::size_t j = 0; j < std::min(even[i].roots.size(), odd[i].roots.size()); ++j) {
            ordered = ordered && odd[i].roots[j] > even[i].roots[j];
        }
        rb.at_most(tag + ".max_rel_error_vs_fd", worst, 1e-3);
        rb.at_most(tag + ".squared_relation_defect", squared, 1e-9);
        rb.expect(tag + ".odd_above_even_in_each_doublet", ordered);
        per_alpha.push_back(entry);
    }

    rb.note("params", Json{{"a", base.a}, {"b", base.b}, {"mass", base.mass}, {"hbar", base.hbar}});
    rb.note("fd_grid", grid_json(g.interior()));
    rb.note("levels", per_alpha);
    rb.note("infinite_barrier_limit_E1",
            std::numbers::pi * std::numbers::pi * base.hbar * base.hbar /
                (2.0 * base.mass * (base.a - base.b) * (base.a - base.b)));

    if (!sweep.empty()) {
        Table t{"ualpha_sweep", {"alpha", "e_even", "e_odd", "delta", "even_count", "odd_count"}, {}};
        std::vector<double> deltas;
        auto opt = [](const std::optional<double>& v) -> Cell {
            if (v) return *v;
            return std::string();
        };
        for (const auto& row : sweep) {
            if (row.delta) deltas.push_back(*row.delta);
            t.add({row.alpha, opt(row.e_even), opt(row.e_odd), opt(row.delta),
                   static_cast<std::int64_t>(row.even_count), static_cast<std::int64_t>(row.odd_count)});
        }
        const auto threshold = threshold_alpha(sweep);
        rb.note("threshold_alpha", threshold ? Json(*threshold) : Json(nullptr));
        rb.expect("splitting.strictly_decreasing", strictly_decreasing(deltas));
        rb.attach(std::move(t));
    }
    rb.attach(std::move(roots));
}

// ---------------------------------------------------------------- U_infinity

struct UinfSetup {
    double a = 2.0;
    double b = 0.5;
    double mass = 1.0;
    double hbar = 1.0;
    Grid grid;
    SplitDomain split;
    TridiagonalOperator op;
    Spectrum spectrum;
    DegeneracyReport clusters;
};

UinfSetup uinf_setup(const ExperimentConfig& cfg, std::size_t levels) {
    const auto& m = cfg.model;
    UinfSetup u;
    u.a = get(m.a, 2.0);
    u.b = get(m.b, 0.5);
    u.mass = get(m.mass, 1.0);
    u.hbar = get(m.hbar, 1.0);
    (void)double_infinite_well(u.a, u.b, u.mass, u.hbar);  // validates the geometry
    u.grid = walled_grid(cfg.grid, u.a, 4001);
    u.split = split_domain(u.grid, {-u.b, u.b});
    const auto& l = u.split.left;
    const auto& r = u.split.right;
    u.op = direct_sum(assemble_hamiltonian(l, std::vector<double>(l.n(), 0.0), u.mass, u.hbar),
                      assemble_hamiltonian(r, std::vector<double>(r.n(), 0.0), u.mass, u.hbar));
    u.spectrum = eigensolve(u.op, std::min(2 * levels, u.op.size()), u.grid.h());
    u.clusters = cluster_degeneracies(u.spectrum.levels, cfg.tolerances.degeneracy);
    return u;
}

double uinf_level(const UinfSetup& u, int n) {
    const double w = u.a - u.b;
    return std::numbers::pi * std::numbers::pi * u.hbar * u.hbar * n * n / (2.0 * u.mass * w * w);
}

Json split_json(const UinfSetup& u) {
    return Json{{"parent", grid_json(u.grid)},
                {"barrier_snapped", {u.split.snap_lo, u.split.snap_hi}},
                {"left_walls", {u.split.left_walls.lo, u.split.left_walls.hi}},
                {"right_walls", {u.split.right_walls.lo, u.split.right_walls.hi}},
                {"unknowns", u.split.unknowns()}};
}

void uinf_ssb(const ExperimentConfig& cfg, ReportBuilder& rb) {
    constexpr std::size_t kLevels = 5;
    const auto u = uinf_setup(cfg, kLevels);
    const double tol = cfg.tolerances.degeneracy;
    const auto parity = SymmetryOp::parity(u.op.size());
    const auto verdict = detect_ssb(u.op, u.spectrum, parity, tol);

    Table t{"uinf_levels", {"cluster", "mean", "multiplicity", "exact", "rel_error"}, {}};
    double worst = 0.0;
    bool doubled = u.clusters.clusters.size() >= kLevels;
    const std::size_t shown = std::min(kLevels, u.clusters.clusters.size());
    for (std::size_t k = 0; k < shown; ++k) {
        const auto& c = u.clusters.clusters[k];
        const double exact = uinf_level(u, static_cast<int>(k + 1));
        const double rel = std::abs(c.mean - exact) / exact;
        worst = std::max(worst, rel);
        doubled = doubled && c.multiplicity == 2;
        t.add({static_cast<std::int64_t>(k + 1), c.mean, static_cast<std::int64_t>(c.multiplicity), exact, rel});
    }

    rb.note("params", Json{{"a", u.a}, {"b", u.b}, {"mass", u.mass}, {"hbar", u.hbar}});
    rb.note("domain", split_json(u));
    rb.note("spectrum", spectrum_json(u.spectrum));
    rb.note("degeneracy", degeneracy_json(u.clusters));
    rb.note("verdict", verdict_json(verdict));
    rb.note("E1", u.clusters.clusters.front().mean);

    rb.at_most("levels.max_rel_error_vs_exact", worst, 1e-3);
    rb.expect("levels.every_cluster_doubly_degenerate", doubled);
    rb.at_most("parity_commutator", verdict.commutator_norm, 1e-12);
    rb.expect("broken", verdict.broken);
    rb.expect("ground_multiplicity_is_2", verdict.ground_multiplicity == 2);
    if (verdict.pair) {
        rb.below("pair.overlap", verdict.pair_overlap, 1e-12);
        rb.below("pair.parity_mismatch", verdict.pair_mismatch, 1e-12);

        const auto left = u.split.embed(verdict.pair->left);
        const auto right = u.split.embed(verdict.pair->right);
        const auto psi_l = uinf_eigenfunction(1, WellSide::Left, u.a, u.b, u.grid);
        const auto psi_r = uinf_eigenfunction(1, WellSide::Right, u.a, u.b, u.grid);
        const double h = u.grid.h();
        rb.below("analytic_pair.overlap", std::abs(grid_inner(psi_l, psi_r, h)), 1e-12);
        const double align = std::max(std::abs(grid_inner(left, psi_l, h)), std::abs(grid_inner(left, psi_r, h)));
        rb.below("pair.distance_from_analytic_wells", std::abs(1.0 - align), 1e-6);

        Table p{"uinf_pair", {"x", "psi_L", "psi_R"}, {}};
        for (std::size_t i = 0; i < u.grid.n(); ++i) p.add({u.grid.x(i), left[i], right[i]});
        rb.attach(std::move(t));
        rb.attach(std::move(p));
        return;
    }
    rb.attach(std::move(t));
}

void barrier_theorem(const ExperimentConfig& cfg, ReportBuilder& rb) {
    constexpr std::size_t kLevels = 5;
    const auto u = uinf_setup(cfg, kLevels);
    const double h = u.grid.h();
    const double bound = residual_bound(cfg, u.spectrum);
    const BarrierInterval barrier{-u.b, u.b};
    const auto parity = SymmetryOp::parity(u.op.size());

    Table t{"barrier_theorem",
            {"level", "energy", "even_residual", "projected_residual", "mirrored_residual", "bound", "parity_overlap"},
            {}};
    Json rows = Json::array();
    const std::size_t count = std::min(kLevels, u.clusters.clusters.size());
    if (count < kLevels) throw SolverError("fewer than 5 levels resolved");
    for (std::size_t k = 0; k < count; ++k) {
        const auto& c = u.clusters.clusters[k];
        const double e = c.mean;
        // Even member of the doublet, built from one well-localized eigenvector.
        const auto& v = u.spectrum.vectors[c.members.front()];
        const auto pv = parity.apply(v);
        std::vector<double> even(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) even[i] = v[i] + pv[i];
        const double nrm = grid_norm(even, h);
        for (double& x : even) x /= nrm;
        const double even_res = residual_norm(u.op, even, e, h);

        const auto proj = project_right(u.split.embed(even), u.grid, barrier);
        const double proj_res = residual_norm(u.op, u.split.restrict_to_wells(proj.psi), e, h);
        const auto mirrored = parity_apply(proj.psi, u.grid);
        const double mirror_res = residual_norm(u.op, u.split.restrict_to_wells(mirrored), e, h);
        const double overlap = std::abs(grid_inner(mirrored, proj.psi, h));

        const std::string tag = "level" + std::to_string(k + 1);
        rb.at_most(tag + ".even_state_residual", even_res, bound);
        rb.below(tag + ".projected_residual", proj_res, 10.0 * bound);
        rb.below(tag + ".mirrored_residual", mirror_res, 10.0 * bound);
        rb.below(tag + ".parity_image_overlap", overlap, 1e-12);
        t.add({static_cast<std::int64_t>(k + 1), e, even_res, proj_res, mirror_res, bound, overlap});
        rows.push_back(Json{{"level", k + 1},
                            {"energy", e},
                            {"even_residual", even_res},
                            {"projected_residual", proj_res},
                            {"mirrored_residual", mirror_res},
                            {"parity_overlap", overlap}});
    }

    // Same construction with a finite barrier: the half-space projection of
    // the even ground state is no longer an eigenstate.
    WellGeometry wg;
    wg.alpha = get(cfg.model.alpha, 50.0);
    wg.a = u.a;
    wg.b = u.b;
    wg.mass = u.mass;
    wg.hbar = u.hbar;
    wg.validate();
    const auto model = square_double_well(wg.alpha, wg.a, wg.b);
    const Grid inner = u.grid.interior();
    const auto op_alpha = assemble_hamiltonian(inner, model.sample(inner), wg.mass, wg.hbar);
    const auto ps = solve_by_parity(op_alpha, inner, 1, 1);
    const auto cut = project_right(ps.even.vectors[0], inner, barrier);
    const double finite_res = residual_norm(op_alpha, cut.psi, ps.even.levels[0], h);
    const double finite_bound = cfg.tolerances.residual.value_or(ps.even.tolerance);

    rb.note("params", Json{{"a", u.a}, {"b", u.b}, {"mass", u.mass}, {"hbar", u.hbar}});
    rb.note("domain", split_json(u));
    rb.note("residual_bound", bound);
    rb.note("levels", rows);
    rb.note("finite_barrier", Json{{"alpha", wg.alpha},
                                   {"even_ground", ps.even.levels[0]},
                                   {"projected_residual", finite_res},
                                   {"bound", finite_bound}});
    rb.above("finite_barrier.projected_residual", finite_res, 10.0 * finite_bound);
    rb.attach(std::move(t));
}

// ---------------------------------------------------------------- spinor

void spinor_ssb(const ExperimentConfig& cfg, ReportBuilder& rb) {
    const auto& m = cfg.model;
    const double tol = cfg.tolerances.degeneracy;
    const auto model = build_spinor_model(get(m.omega_plus, std::numbers::phi), get(m.omega_minus, 1.0),
                                          get(m.mass, 1.0), get(m.hbar, 1.0));
    const Grid g = make_grid(cfg.grid, {-8.0, 8.0}, 80001);
    const double h = g.h();
    constexpr std::size_t k = 8;

    const auto two = assemble_spinor_hamiltonian(model, g);
    const auto op = two.stacked();
    const auto s = eigensolve(op, k, h);
    auto analytic = analytic_spectrum(model, static_cast<int>(k));
    analytic.resize(k);
    std::vector<double> exact;
    for (const auto& l : analytic) exact.push_back(l.energy);

    const auto sigma3 = SymmetryOp::sigma3(g.n());
    const auto fd_clusters = cluster_degeneracies(s.levels, tol);
    const auto an_clusters = cluster_degeneracies(exact, tol);
    const auto verdict = detect_ssb(op, s, sigma3, tol);

    Table t{"spinor_levels",
            {"index", "fd_energy", "analytic_energy", "analytic_channel", "analytic_n", "fd_channel", "rel_error"},
            {}};
    double worst = 0.0;
    double channel_defect = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double rel = std::abs(s.levels[i] - exact[i]) / std::max(std::abs(exact[i]), 1.0);
        worst = std::max(worst, rel);
        const Channel ch = dominant_channel(s.vectors[i]);
        const double sign = ch == Channel::Plus ? 1.0 : -1.0;
        const auto sv = sigma3.apply(s.vectors[i]);
        double d2 = 0.0;
        for (std::size_t j = 0; j < sv.size(); ++j) d2 += (sv[j] - sign * s.vectors[i][j]) * (sv[j] - sign * s.vectors[i][j]);
        channel_defect = std::max(channel_defect, std::sqrt(d2 * h));
        t.add({static_cast<std::int64_t>(i), s.levels[i], exact[i], to_string(analytic[i].channel),
               static_cast<std::int64_t>(analytic[i].n), to_string(ch), rel});
    }
    auto excited_degenerate = [](const DegeneracyReport& d) {
        std::size_t count = 0;
        for (std::size_t c = 1; c < d.clusters.size(); ++c) count += d.clusters[c].multiplicity > 1;
        return count;
    };

    const auto gp = ground_pair(model, g);
    const auto right = gp.right.stacked();
    const auto left = gp.left.stacked();
    const double pair_overlap = std::abs(grid_inner(left, right, h));
    const auto mapped = sigma3.apply(right);
    double map_defect = 0.0;
    for (std::size_t i = 0; i < mapped.size(); ++i) map_defect = std::max(map_defect, std::abs(mapped[i] - left[i]));
    const double res_r = residual_norm(op, right, 0.0, h);
    const double res_l = residual_norm(op, left, 0.0, h);

    const auto form = to_field_form(model);
    const auto rebuilt = assemble_from_field_form(form, g).stacked();
    double entry_defect = 0.0;
    double entry_scale = 0.0;
    for (std::size_t i = 0; i < op.diag.size(); ++i) {
        entry_defect = std::max(entry_defect, std::abs(op.diag[i] - rebuilt.diag[i]));
        entry_scale = std::max(entry_scale, std::abs(op.diag[i]));
    }
    for (std::size_t i = 0; i < op.offdiag.size(); ++i) {
        entry_defect = std::max(entry_defect, std::abs(op.offdiag[i] - rebuilt.offdiag[i]));
    }
    const auto rebuilt_levels = lowest_eigenvalues(rebuilt, k);
    double level_defect = 0.0;
    for (std::size_t i = 0; i < k; ++i) level_defect = std::max(level_defect, std::abs(rebuilt_levels[i] - s.levels[i]));

    Json model_json{{"omega_plus", model.omega_plus},
                    {"omega_minus", model.omega_minus},
                    {"mass", model.mass},
                    {"hbar", model.hbar},
                    {"ratio", model.ratio},
                    {"commensurate", model.commensurate()}};
    if (model.commensurate_with) {
        model_json["rational"] = {model.commensurate_with->first, model.commensurate_with->second};
        rb.note("warnings", Json::array({"frequency ratio is commensurate; excited levels of the two channels coincide"}));
    }
    rb.note("model", model_json);
    rb.note("grid", grid_json(g));
    rb.note("spectrum", spectrum_json(s));
    rb.note("analytic_levels", exact);
    rb.note("degeneracy", degeneracy_json(fd_clusters));
    rb.note("verdict", verdict_json(verdict));
    rb.note("field_form", Json{{"omega0", form.omega0},
                               {"omega_delta_sq", form.omega_delta_sq},
                               {"epsilon0", form.epsilon0},
                               {"epsilon_delta", form.epsilon_delta},
                               {"bz_at_origin", form.bz(0.0)}});

    const double bound = residual_bound(cfg, s);
    rb.at_most("levels.max_rel_error_vs_analytic", worst, 1e-3);
    rb.expect("fd.ground_multiplicity_is_2", fd_clusters.clusters.front().multiplicity == 2);
    rb.expect("fd.excited_levels_nondegenerate", excited_degenerate(fd_clusters) == 0);
    rb.expect("analytic.ground_multiplicity_is_2", an_clusters.clusters.front().multiplicity == 2);
    rb.expect("analytic.excited_levels_nondegenerate", excited_degenerate(an_clusters) == 0);
    rb.expect("broken", verdict.broken);
    rb.at_most("sigma3_commutator", sigma3_commutator_norm(two), 1e-12);
    rb.at_most("eigenspinors.sigma3_eigen_defect", channel_defect, 1e-12);
    rb.below("ground_pair.overlap", pair_overlap, 1e-10);
    rb.at_most("ground_pair.sigma3_map_defect", map_defect, 0.0);
    rb.at_most("ground_pair.right_residual", res_r, bound);
    rb.at_most("ground_pair.left_residual", res_l, bound);
    rb.at_most("field_form.entry_defect_rel", entry_defect / entry_scale, 4.0 * kEps);
    rb.at_most("field_form.level_defect", level_defect, 64.0 * kEps * op.norm());
    rb.attach(std::move(t));
}

// ---------------------------------------------------------------- pair lemma

template <typename Scalar>
struct DenseInvolution {
    std::size_t dim = 0;
    std::vector<Scalar> m;  // row-major

    template <typename In>
    std::vector<Scalar> apply(std::span<const In> v) const {
        std::vector<Scalar> out(dim, Scalar{});
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) out[i] += m[i * dim + j] * v[j];
        }
        return out;
    }
};

template <typename Scalar>
Scalar conj_of(Scalar v) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return v;
    } else {
        return std::conj(v);
    }
}

template <typename Scalar>
Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    Scalar s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += conj_of(a[i]) * b[i];
    return s;
}

template <typename Scalar>
double norm_of(const std::vector<Scalar>& a) {
    return std::sqrt(std::abs(dot(a, a)));
}

template <typename Scalar>
void axpy(std::vector<Scalar>& y, Scalar alpha, const std::vector<Scalar>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

struct LemmaTrial {
    std::size_t dim = 0;
    bool complex_field = false;
    double target = 0.0;
    double overlap = 0.0;
    double lr = 0.0;
    double mismatch = 0.0;
    double span = 0.0;
    double eigen = 0.0;
};

template <typename Scalar>
LemmaTrial lemma_trial(std::mt19937_64& rng, std::size_t dim, double target) {
    std::normal_distribution<double> gauss;
    auto draw = [&]() -> Scalar {
        if constexpr (std::is_same_v<Scalar, double>) {
            return gauss(rng);
        } else {
            const double re = gauss(rng);
            return Scalar(re, gauss(rng));
        }
    };
    auto random_vec = [&] {
        std::vector<Scalar> v(dim);
        for (auto& x : v) x = draw();
        return v;
    };
    std::uniform_int_distribution<std::size_t> rank_dist(1, dim - 1);
    const std::size_t rank = rank_dist(rng);
    std::vector<std::vector<Scalar>> q;
    while (q.size() < rank) {
        auto v = random_vec();
        for (const auto& b : q) axpy(v, -dot(b, v), b);
        const double n = norm_of(v);
        if (n < 1e-8) continue;
        for (auto& x : v) x /= n;
        q.push_back(v);
    }
    DenseInvolution<Scalar> u{dim, std::vector<Scalar>(dim * dim, Scalar{})};
    for (std::size_t i = 0; i < dim; ++i) u.m[i * dim + i] = 1.0;
    for (const auto& b : q) {
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) u.m[i * dim + j] -= 2.0 * b[i] * conj_of(b[j]);
        }
    }
    std::vector<Scalar> plus = random_vec();
    for (const auto& b : q) axpy(plus, -dot(b, plus), b);
    const double pn = norm_of(plus);
    for (auto& x : plus) x /= pn;
    std::vector<Scalar> minus(dim, Scalar{});
    for (const auto& b : q) axpy(minus, draw(), b);
    const double mn = norm_of(minus);
    for (auto& x : minus) x /= mn;

    // <A|UA> = cos^2 t - sin^2 t = target
    const double theta = 0.5 * std::acos(target);
    std::vector<Scalar> a(dim);
    for (std::size_t i = 0; i < dim; ++i) a[i] = std::cos(theta) * plus[i] + std::sin(theta) * minus[i];
    const auto b = u.template apply<Scalar>(std::span<const Scalar>(a));

    const auto pair = build_nonoverlapping_pair<Scalar>(std::span<const Scalar>(a), std::span<const Scalar>(b), u);
    LemmaTrial out;
    out.dim = dim;
    out.complex_field = !std::is_same_v<Scalar, double>;
    out.target = target;
    out.overlap = pair.overlap_ab;
    out.lr = std::abs(dot(pair.left, pair.right));
    const auto ul = u.template apply<Scalar>(std::span<const Scalar>(pair.left));
    const auto ur = u.template apply<Scalar>(std::span<const Scalar>(pair.right));
    std::vector<Scalar> d1 = ul;
    axpy(d1, Scalar(-1.0), pair.right);
    std::vector<Scalar> d2 = ur;
    axpy(d2, Scalar(-1.0), pair.left);
    out.mismatch = std::max(norm_of(d1), norm_of(d2));

    std::vector<Scalar> b_perp = b;
    axpy(b_perp, -dot(a, b), a);
    const double bpn = norm_of(b_perp);
    for (auto& x : b_perp) x /= bpn;
    for (const auto* v : {&pair.left, &pair.right}) {
        std::vector<Scalar> r = *v;
        axpy(r, -dot(a, *v), a);
        axpy(r, -dot(b_perp, *v), b_perp);
        out.span = std::max(out.span, norm_of(r));
    }
    auto up = u.template apply<Scalar>(std::span<const Scalar>(pair.plus));
    auto um = u.template apply<Scalar>(std::span<const Scalar>(pair.minus));
    axpy(up, Scalar(-1.0), pair.plus);
    axpy(um, Scalar(1.0), pair.minus);
    out.eigen = std::max(norm_of(up), norm_of(um));
    return out;
}

void pair_lemma(const ExperimentConfig& cfg, ReportBuilder& rb) {
    // Worked 2-vector case: U reflects about the bisector of A and B.
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.6, 0.8};
    const double dn = std::sqrt(1.6 * 1.6 + 0.8 * 0.8);
    const double d0 = 1.6 / dn;
    const double d1 = 0.8 / dn;
    const auto u2 = SymmetryOp::custom({2 * d0 * d0 - 1, 2 * d0 * d1, 2 * d0 * d1, 2 * d1 * d1 - 1}, 2);
    const auto ex = build_nonoverlapping_pair(a, b, u2);
    const double s10 = 1.0 / std::sqrt(10.0);
    const double ex_defect = std::max({std::abs(ex.left[0] - 3 * s10), std::abs(ex.left[1] + s10),
                                       std::abs(ex.right[0] - s10), std::abs(ex.right[1] - 3 * s10)});
    rb.note("example", Json{{"A", a}, {"B", b}, {"L", ex.left}, {"R", ex.right}, {"overlap_ab", ex.overlap_ab}});
    rb.at_most("example.defect_vs_closed_form", ex_defect, 1e-12);
    rb.at_most("example.LR_overlap", std::abs(ex.left[0] * ex.right[0] + ex.left[1] * ex.right[1]), 1e-15);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> dim_dist(2, 8);
    std::uniform_real_distribution<double> overlap_dist(-0.99, 0.99);
    Table t{"pair_lemma",
            {"trial", "dim", "field", "target_overlap", "overlap_ab", "lr_overlap", "mismatch", "span_defect",
             "eigen_defect"},
            {}};
    double lr = 0.0, mismatch = 0.0, span = 0.0, eigen = 0.0, target = 0.0;
    std::size_t complex_trials = 0;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const std::size_t dim = dim_dist(rng);
        const double c = overlap_dist(rng);
        const LemmaTrial r = trial % 2 == 0 ? lemma_trial<double>(rng, dim, c)
                                            : lemma_trial<std::complex<double>>(rng, dim, c);
        complex_trials += r.complex_field;
        lr = std::max(lr, r.lr);
        mismatch = std::max(mismatch, r.mismatch);
        span = std::max(span, r.span);
        eigen = std::max(eigen, r.eigen);
        target = std::max(target, std::abs(r.overlap - r.target));
        t.add({static_cast<std::int64_t>(trial), static_cast<std::int64_t>(r.dim),
               std::string(r.complex_field ? "complex" : "real"), r.target, r.overlap, r.lr, r.mismatch, r.span,
               r.eigen});
    }
    rb.note("trials", Json{{"count", cfg.trials}, {"complex", complex_trials}, {"seed", cfg.seed}});
    rb.at_most("trials.max_LR_overlap", lr, 1e-12);
    rb.at_most("trials.max_UL_minus_R", mismatch, 1e-12);
    rb.at_most("trials.max_span_defect", span, 1e-12);
    rb.at_most("trials.max_eigen_defect", eigen, 1e-12);
    rb.at_most("trials.max_overlap_vs_target", target, 1e-12);
    rb.attach(std::move(t));
}

using Runner = void (*)(const ExperimentConfig&, ReportBuilder&);

struct Entry {
    CatalogEntry info;
    Runner run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list{
        {{"sombrero-gap", "quartic x^4 - x^2 and sextic sombreros: non-degenerate ground level, parity unbroken"},
         sombrero_gap},
        {{"sextic-ground", "factorized sextic well: zero ground energy and exp(-a x^4) ground state"}, sextic_ground},
        {{"double-oscillator-limit", "m w^2 (|x| - a)^2: ground splitting closes as the wells separate"},
         double_oscillator_limit},
        {{"ualpha-levels", "finite square double well: transcendental even/odd levels vs finite differences"},
         ualpha_levels},
        {{"uinf-ssb", "infinite double square well: doubly degenerate levels and a broken parity pair"}, uinf_ssb},
        {{"barrier-theorem", "infinite barrier: half-space projection of even eigenstates stays an eigenstate"},
         barrier_theorem},
        {{"spinor-ssb", "two displaced oscillators on spinor channels: sigma3 broken by the ground pair"},
         spinor_ssb},
        {{"pair-lemma", "randomized check of the non-overlapping symmetry-breaking pair construction"}, pair_lemma},
    };
    return list;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> list = [] {
        std::vector<CatalogEntry> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return list;
}

bool is_experiment(const std::string& name) {
    for (const auto& e : entries()) {
        if (e.info.name == name) return true;
    }
    return false;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto it = std::find_if(entries().begin(), entries().end(),
                                 [&](const Entry& e) { return e.info.name == cfg.experiment; });
    ReportBuilder rb(cfg.experiment);
    try {
        it->run(cfg, rb);
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        rb.error("domain", e.what());
    } catch (const SolverError& e) {
        rb.error("solver", e.what());
    } catch (const SymmetryError& e) {
        rb.error("symmetry", e.what());
    }
    RunResult out;
    out.report = rb.finish(config_to_json(cfg));
    out.tables = rb.tables();
    out.checks = rb.checks();
    out.passed = rb.passed();
    return out;
}

Table figure_data(int figure, const ExperimentConfig& cfg) {
    const auto& m = cfg.model;
    const auto& gs = cfg.grid;
    switch (figure) {
        case 1: {
            const auto model = quartic_sombrero(get(m.lambda, 1.0), get(m.mu, 1.0));
            const Grid g = make_grid(gs, {-1.2, 1.2}, 241);
            Table t{"figure1", {"x", "V"}, {}};
            for (std::size_t i = 0; i < g.n(); ++i) t.add({g.x(i), model(g.x(i))});
            return t;
        }
        case 2: {
            const double a = sextic_width(m).value_or(1.0);
            const auto model = sextic_factorized(a, get(m.mass, 1.0), get(m.hbar, 1.0));
            const Grid g = make_grid(gs, {-1.5, 1.5}, 301);
            Table t{"figure2", {"x", "V", "f"}, {}};
            for (std::size_t i = 0; i < g.n(); ++i) {
                t.add({g.x(i), model(g.x(i)), sextic_ground_unnormalized(a, g.x(i))});
            }
            return t;
        }
        case 3: {
            const double a = get(m.a, 1.0);
            const auto model = double_oscillator(get(m.mass, 1.0), get(m.omega, 1.0), a, get(m.hbar, 1.0));
            const Grid g = make_grid(gs, {-(2.0 * a + 1.0), 2.0 * a + 1.0}, 401);
            Table t{"figure3", {"x", "V"}, {}};
            for (std::size_t i = 0; i < g.n(); ++i) t.add({g.x(i), model(g.x(i))});
            return t;
        }
        case 4:
        case 5: {
            const double a = get(m.a, 2.0);
            const double b = get(m.b, 0.5);
            const auto model = figure == 4 ? square_double_well(get(m.alpha, 50.0), a, b) : double_infinite_well(a, b);
            const Grid g = make_grid(gs, {-1.25 * a, 1.25 * a}, 501);
            Table t{"figure" + std::to_string(figure), {"x", "V", "wall"}, {}};
            for (std::size_t i = 0; i < g.n(); ++i) {
                const double v = model(g.x(i));
                t.add({g.x(i), v, static_cast<std::int64_t>(std::isinf(v) ? 1 : 0)});
            }
            return t;
        }
        default:
            throw ConfigError("unknown figure " + std::to_string(figure) + " (expected 1..5)");
    }
}

}  // namespace ssb::cli
