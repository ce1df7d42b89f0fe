#include "ssb/spinor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ssb/errors.hpp"

namespace ssb {

std::string to_string(Channel c) { return c == Channel::Plus ? "plus" : "minus"; }

std::optional<std::pair<int, int>> nearby_rational(double r, int max_term, double tol) {
    std::optional<std::pair<int, int>> best;
    double best_err = tol;
    for (int q = 1; q <= max_term; ++q) {
        const double p = std::round(r * q);
        if (p < 1.0 || p > max_term) continue;
        const double err = std::abs(r - p / q);
        if (err <= best_err && (!best || err < best_err)) {
            best = std::make_pair(static_cast<int>(p), q);
            best_err = err;
        }
    }
    return best;
}

SpinorModel build_spinor_model(double omega_plus, double omega_minus, double mass, double hbar) {
    for (double v : {omega_plus, omega_minus, mass, hbar}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("spinor model needs positive frequencies, mass and hbar");
        }
    }
    SpinorModel m;
    m.omega_plus = omega_plus;
    m.omega_minus = omega_minus;
    m.mass = mass;
    m.hbar = hbar;
    m.ratio = omega_plus / omega_minus;
    m.commensurate_with = nearby_rational(m.ratio);
    return m;
}

std::vector<SpinorLevel> analytic_spectrum(const SpinorModel& model, int nmax) {
    if (nmax < 1) throw DomainError("nmax must be >= 1");
    std::vector<SpinorLevel> out;
    for (int n = 0; n <= nmax; ++n) {
        out.push_back({n, Channel::Plus, model.hbar * n * model.omega_plus});
        out.push_back({n, Channel::Minus, model.hbar * n * model.omega_minus});
    }
    std::stable_sort(out.begin(), out.end(), [](const SpinorLevel& a, const SpinorLevel& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.channel == Channel::Plus && b.channel == Channel::Minus;
    });
    return out;
}

double oscillator_eigenfunction(int n, double mass, double omega, double hbar, double x) {
    if (n < 0) throw DomainError("oscillator level must be >= 0");
    const double scale = std::sqrt(mass * omega / hbar);
    const double xi = scale * x;
    double prev = 0.0;
    double cur = std::exp(-0.5 * xi * xi) / std::pow(std::numbers::pi, 0.25);
    for (int k = 0; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return std::sqrt(scale) * cur;
}

std::vector<double> SpinorState::stacked() const {
    std::vector<double> v(up);
    v.insert(v.end(), down.begin(), down.end());
    return v;
}

SpinorState SpinorState::from_stacked(std::span<const double> v) {
    if (v.size() % 2 != 0) throw DomainError("stacked spinor must have even length");
    const auto half = static_cast<std::ptrdiff_t>(v.size() / 2);
    SpinorState s;
    s.up.assign(v.begin(), v.begin() + half);
    s.down.assign(v.begin() + half, v.end());
    return s;
}

GroundPair ground_pair(const SpinorModel& model, const Grid& grid) {
    auto channel = [&](double omega) {
        std::vector<double> psi(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i) {
            psi[i] = oscillator_eigenfunction(0, model.mass, omega, model.hbar, grid.x(i));
        }
        const double nrm = grid_norm(psi, grid.h());
        if (std::abs(nrm * nrm - 1.0) > 1e-8) {
            throw DomainError("grid does not resolve the channel ground state (norm^2 = " +
                              std::to_string(nrm * nrm) + ")");
        }
        for (double& v : psi) v /= nrm;
        return psi;
    };
    const auto plus = channel(model.omega_plus);
    const auto minus = channel(model.omega_minus);
    const double r2 = 1.0 / std::numbers::sqrt2;
    GroundPair gp;
    gp.right.up.resize(grid.n());
    gp.right.down.resize(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        gp.right.up[i] = plus[i] * r2;
        gp.right.down[i] = minus[i] * r2;
    }
    gp.left.up = gp.right.up;
    gp.left.down = gp.right.down;
    for (double& v : gp.left.down) v = -v;
    return gp;
}

std::vector<double> TwoChannelOperator::apply(std::span<const double> v) const {
    const std::size_t n = channel_size();
    if (v.size() != 2 * n || lower.size() != n) throw DomainError("spinor/operator size mismatch");
    auto up = upper.apply(v.subspan(0, n));
    auto down = lower.apply(v.subspan(n, n));
    if (!coupling.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            up[i] += coupling[i] * v[n + i];
            down[i] += coupling[i] * v[i];
        }
    }
    up.insert(up.end(), down.begin(), down.end());
    return up;
}

bool TwoChannelOperator::block_diagonal() const {
    return std::all_of(coupling.begin(), coupling.end(), [](double c) { return c == 0.0; });
}

TridiagonalOperator TwoChannelOperator::stacked() const {
    if (!block_diagonal()) throw DomainError("coupled channels are not a tridiagonal direct sum");
    return direct_sum(upper, lower);
}

namespace {

TwoChannelOperator assemble_channels(const Grid& grid, double mass, double hbar,
                                     const std::vector<double>& v_up,
                                     const std::vector<double>& v_down) {
    TwoChannelOperator op;
    op.upper = assemble_hamiltonian(grid, v_up, mass, hbar);
    op.lower = assemble_hamiltonian(grid, v_down, mass, hbar);
    return op;
}

}  // namespace

TwoChannelOperator assemble_spinor_hamiltonian(const SpinorModel& model, const Grid& grid) {
    std::vector<double> vp(grid.n());
    std::vector<double> vm(grid.n());
    const double m = model.mass;
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double x2 = grid.x(i) * grid.x(i);
        vp[i] = 0.5 * m * model.omega_plus * model.omega_plus * x2 - 0.5 * model.hbar * model.omega_plus;
        vm[i] = 0.5 * m * model.omega_minus * model.omega_minus * x2 - 0.5 * model.hbar * model.omega_minus;
    }
    return assemble_channels(grid, model.mass, model.hbar, vp, vm);
}

double sigma3_commutator_norm(const TwoChannelOperator& op) {
    const std::size_t n = op.channel_size();
    if (op.lower.size() != n) throw DomainError("channels have different sizes");
    if (!op.coupling.empty() && op.coupling.size() != n) throw DomainError("coupling has wrong length");
    // Each diagonal block commutes with sigma3 (it acts as +-1 there), so
    // [sigma3, H] e_j only sees the inter-channel coupling: norm 2|c_j|.
    double structural = 0.0;
    for (double c : op.coupling) structural = std::max(structural, 2.0 * std::abs(c));

    double probed = 0.0;
    std::mt19937_64 rng(0xc0ffeeULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> v(2 * n);
        for (double& x : v) x = dist(rng);
        auto sv = v;
        for (std::size_t i = n; i < 2 * n; ++i) sv[i] = -sv[i];
        auto hv = op.apply(v);
        for (std::size_t i = n; i < 2 * n; ++i) hv[i] = -hv[i];
        const auto hsv = op.apply(sv);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < 2 * n; ++i) {
            num += (hv[i] - hsv[i]) * (hv[i] - hsv[i]);
            den += v[i] * v[i];
        }
        probed = std::max(probed, std::sqrt(num / den));
    }
    return std::max(structural, probed);
}

double sigma3_commutator_check(const SpinorModel& model, const Grid& grid) {
    return sigma3_commutator_norm(assemble_spinor_hamiltonian(model, grid));
}

Spectrum spinor_fd_spectrum(const SpinorModel& model, const Grid& grid, std::size_t k) {
    const auto op = assemble_spinor_hamiltonian(model, grid).stacked();
    return eigensolve(op, k, grid.h());
}

Channel dominant_channel(std::span<const double> v) {
    const std::size_t n = v.size() / 2;
    double up = 0.0;
    double down = 0.0;
    for (std::size_t i = 0; i < n; ++i) up += v[i] * v[i];
    for (std::size_t i = n; i < v.size(); ++i) down += v[i] * v[i];
    return up >= down ? Channel::Plus : Channel::Minus;
}

double FieldForm::bz(double x) const {
    return -(2.0 / hbar) * (0.5 * mass * omega_delta_sq * x * x - epsilon_delta);
}

FieldForm to_field_form(const SpinorModel& model) {
    const double wp = model.omega_plus;
    const double wm = model.omega_minus;
    FieldForm f;
    f.mass = model.mass;
    f.hbar = model.hbar;
    f.omega0 = std::sqrt(0.5 * (wp * wp + wm * wm));
    f.omega_delta_sq = 0.5 * (wp * wp - wm * wm);
    // eps_0 +- eps_D must equal the channel displacements hbar w_+- / 2.
    f.epsilon0 = 0.25 * model.hbar * (wp + wm);
    f.epsilon_delta = 0.25 * model.hbar * (wp - wm);
    return f;
}

TwoChannelOperator assemble_from_field_form(const FieldForm& form, const Grid& grid) {
    std::vector<double> up(grid.n());
    std::vector<double> down(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double x = grid.x(i);
        const double h0 = 0.5 * form.mass * form.omega0 * form.omega0 * x * x - form.epsilon0;
        const double zeeman = -0.5 * form.hbar * form.bz(x);
        up[i] = h0 + zeeman;
        down[i] = h0 - zeeman;
    }
    return assemble_channels(grid, form.mass, form.hbar, up, down);
}

}  // namespace ssb
