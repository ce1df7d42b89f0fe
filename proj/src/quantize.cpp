#include "ssb/quantize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "ssb/eigen.hpp"
#include "ssb/errors.hpp"
#include "ssb/models.hpp"
#include "ssb/symmetry.hpp"

namespace ssb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double well_width(const WellGeometry& g) { return g.a - g.b; }

// Energy of the k-th pole of cot((a-b) sqrt(2mE)/hbar).
double pole_energy(const WellGeometry& g, int k) {
    const double kk = k * std::numbers::pi * g.hbar / well_width(g);
    return kk * kk / (2.0 * g.mass);
}

double barrier_term(double energy, const WellGeometry& g, Parity parity) {
    const double d = g.alpha - energy;
    const double kappa = std::sqrt(2.0 * g.mass * d) / g.hbar;
    const double t = kappa * g.b;
    if (parity == Parity::Even) return std::sqrt(d) * std::tanh(t);
    if (t == 0.0) return g.hbar / (g.b * std::sqrt(2.0 * g.mass));  // sqrt(d) coth -> limit
    return std::sqrt(d) / std::tanh(t);
}

double well_term(double energy, const WellGeometry& g) {
    const double phase = well_width(g) * std::sqrt(2.0 * g.mass * energy) / g.hbar;
    const double s = std::sin(phase);
    const double c = std::cos(phase);
    if (s == 0.0) return (c > 0.0) ? -kInf : kInf;
    return -std::sqrt(energy) * c / s;
}

// Residual including the E -> alpha endpoint (used only for bracketing).
double condition_closed(double energy, const WellGeometry& g, Parity parity) {
    return well_term(energy, g) - barrier_term(energy, g, parity);
}

}  // namespace

void WellGeometry::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a > b) || !(b > 0.0)) {
        throw DomainError("well geometry requires a > b > 0");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("barrier height alpha must be > 0");
    if (!(mass > 0.0) || !(hbar > 0.0)) throw DomainError("mass and hbar must be positive");
}

std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

double matching_condition(double energy, const WellGeometry& g, Parity parity) {
    g.validate();
    if (!(energy > 0.0) || !(energy < g.alpha)) {
        throw DomainError("matching condition is defined for 0 < E < alpha");
    }
    return condition_closed(energy, g, parity);
}

double even_condition(double energy, const WellGeometry& g) {
    return matching_condition(energy, g, Parity::Even);
}

double odd_condition(double energy, const WellGeometry& g) {
    return matching_condition(energy, g, Parity::Odd);
}

SquaredSides squared_condition(double energy, const WellGeometry& g, Parity parity) {
    g.validate();
    if (!(energy > 0.0) || !(energy < g.alpha)) {
        throw DomainError("matching condition is defined for 0 < E < alpha");
    }
    const double phase = well_width(g) * std::sqrt(2.0 * g.mass * energy) / g.hbar;
    const double cot = 1.0 / std::tan(phase);
    const double kappa_b = g.b * std::sqrt(2.0 * g.mass * (g.alpha - energy)) / g.hbar;
    const double th = std::tanh(kappa_b);
    SquaredSides s;
    s.lhs = energy * cot * cot;
    s.rhs = (g.alpha - energy) * (parity == Parity::Even ? th * th : 1.0 / (th * th));
    return s;
}

RootSet subbarrier_roots(const WellGeometry& g, Parity parity) {
    g.validate();
    RootSet out;
    // On each pole-to-pole branch the residual increases strictly from a
    // negative value (or -inf) to +inf, so a branch holds at most one root;
    // the branch cut short by alpha holds one iff the residual at alpha is > 0.
    for (int k = 0;; ++k) {
        const double lo0 = pole_energy(g, k);
        if (lo0 >= g.alpha) break;
        const double pole_hi = pole_energy(g, k + 1);
        const bool truncated = pole_hi >= g.alpha;
        const double hi0 = truncated ? g.alpha : pole_hi;
        out.brackets.push_back({lo0, hi0});
        if (truncated && !(condition_closed(g.alpha, g, parity) > 0.0)) break;

        double lo = lo0;
        double hi = hi0;
        for (int it = 0; it < 2000; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (condition_closed(mid, g, parity) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // The bracket ends are a pole or alpha itself, never a valid root.
        const bool lo_ok = lo > lo0;
        const bool hi_ok = hi < hi0;
        double root = lo_ok ? lo : hi;
        if (lo_ok && hi_ok &&
            std::abs(condition_closed(hi, g, parity)) < std::abs(condition_closed(lo, g, parity))) {
            root = hi;
        }
        out.roots.push_back(root);
        out.residuals.push_back(condition_closed(root, g, parity));
        if (truncated) break;
    }
    return out;
}

FdParityLevels fd_subbarrier_levels(const WellGeometry& g, std::size_t fd_samples) {
    g.validate();
    if (fd_samples < 7 || fd_samples % 2 == 0) {
        throw DomainError("FD check needs an odd sample count >= 7");
    }
    const auto model = square_double_well(g.alpha, g.a, g.b);
    const Grid grid = build_grid(-g.a, g.a, fd_samples).interior();
    const auto op = assemble_hamiltonian(grid, model.sample(grid), g.mass, g.hbar);
    const auto sectors = parity_sectors(op);
    FdParityLevels out;
    const std::size_t ne = count_below(sectors.even, g.alpha);
    const std::size_t no = count_below(sectors.odd, g.alpha);
    if (ne > 0) out.even = lowest_eigenvalues(sectors.even, ne);
    if (no > 0) out.odd = lowest_eigenvalues(sectors.odd, no);
    return out;
}

RootReport find_subbarrier_levels(const WellGeometry& g, Parity parity, std::size_t fd_samples) {
    auto roots = subbarrier_roots(g, parity);
    RootReport rep;
    rep.parity = parity;
    rep.roots = std::move(roots.roots);
    rep.brackets = std::move(roots.brackets);
    rep.residuals = std::move(roots.residuals);
    rep.fd_samples = fd_samples;
    auto fd = fd_subbarrier_levels(g, fd_samples);
    rep.fd_levels = (parity == Parity::Even) ? std::move(fd.even) : std::move(fd.odd);
    const std::size_t m = std::min(rep.roots.size(), rep.fd_levels.size());
    for (std::size_t i = 0; i < m; ++i) {
        rep.oracle_match.push_back(std::abs(rep.roots[i] - rep.fd_levels[i]) /
                                   std::abs(rep.fd_levels[i]));
    }
    return rep;
}

std::vector<SweepRow> splitting_sweep(std::span<const double> alphas, const WellGeometry& base,
                                      int level, std::size_t jobs) {
    if (level < 1) throw DomainError("sweep level must be >= 1");
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        if (!(alphas[i] > alphas[i - 1])) throw DomainError("sweep alphas must be strictly ascending");
    }
    std::vector<SweepRow> rows(alphas.size());
    auto work = [&](std::size_t i) {
        WellGeometry g = base;
        g.alpha = alphas[i];
        const auto even = subbarrier_roots(g, Parity::Even);
        const auto odd = subbarrier_roots(g, Parity::Odd);
        SweepRow r;
        r.alpha = alphas[i];
        r.even_count = even.roots.size();
        r.odd_count = odd.roots.size();
        const auto idx = static_cast<std::size_t>(level - 1);
        if (idx < even.roots.size()) r.e_even = even.roots[idx];
        if (idx < odd.roots.size()) r.e_odd = odd.roots[idx];
        if (r.e_even && r.e_odd) r.delta = *r.e_odd - *r.e_even;
        rows[i] = r;
    };
    for (double a : alphas) {
        WellGeometry g = base;
        g.alpha = a;
        g.validate();
    }
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(alphas.size(), 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) work(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < alphas.size(); i = next++) work(i);
        });
    }
    pool.clear();
    return rows;
}

std::optional<double> threshold_alpha(std::span<const SweepRow> rows) {
    for (const auto& r : rows) {
        if (r.even_count > 0) return r.alpha;
    }
    return std::nullopt;
}

}  // namespace ssb
