#include "ssb/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssb/errors.hpp"

namespace ssb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_well_geometry(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a > b) || !(b > 0.0)) {
        throw DomainError("well geometry requires a > b > 0");
    }
}

bool on_jump(double x, double edge) {
    return std::abs(std::abs(x) - edge) <= 1e-12 * std::max(1.0, edge);
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::QuarticSombrero: return "quartic-sombrero";
        case ModelKind::SexticFactorized: return "sextic-factorized";
        case ModelKind::DoubleOscillator: return "double-oscillator";
        case ModelKind::SquareDoubleWell: return "square-double-well";
        case ModelKind::DoubleInfiniteWell: return "double-infinite-well";
    }
    return "unknown";
}

PotentialModel::PotentialModel(ModelKind kind, ModelParams params, Interval domain_hint,
                               std::optional<BarrierInterval> barrier,
                               std::optional<AnalyticOracle> analytic)
    : kind_(kind),
      params_(std::move(params)),
      domain_hint_(domain_hint),
      barrier_(barrier),
      analytic_(std::move(analytic)) {}

double PotentialModel::operator()(double x) const {
    return std::visit(
        [x](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, QuarticParams>) {
                const double x2 = x * x;
                return p.lambda * x2 * x2 - p.mu * x2;
            } else if constexpr (std::is_same_v<P, SexticParams>) {
                const double x2 = x * x;
                const double pre = p.hbar * p.hbar / (2.0 * p.mass);
                return pre * (16.0 * p.a_sextic * p.a_sextic * x2 * x2 * x2 - 12.0 * p.a_sextic * x2);
            } else if constexpr (std::is_same_v<P, DoubleOscillatorParams>) {
                const double d = std::abs(x) - p.a;
                return p.mass * p.omega * p.omega * d * d;
            } else if constexpr (std::is_same_v<P, SquareWellParams>) {
                const double ax = std::abs(x);
                if (ax >= p.a) return kInf;
                if (ax <= p.b) return p.alpha;
                return 0.0;
            } else {
                const double ax = std::abs(x);
                if (ax >= p.a || ax <= p.b) return kInf;
                return 0.0;
            }
        },
        params_);
}

std::vector<double> PotentialModel::sample(const Grid& grid) const {
    std::vector<double> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] = (*this)(grid.x(i));
    if (const auto* p = std::get_if<SquareWellParams>(&params_)) {
        for (std::size_t i = 0; i < grid.n(); ++i) {
            if (on_jump(grid.x(i), p->b)) v[i] = 0.5 * p->alpha;
        }
    }
    return v;
}

PotentialModel quartic_sombrero(double lambda, double mu) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    // Wide enough that the ground state has decayed below 1e-12 at the edge
    // (m = hbar = 1): sqrt(2 lambda) X^3 / 3 >= 30 and well past the minima.
    const double xmin_pos = std::sqrt(mu / (2.0 * lambda));
    const double reach = std::max(2.0 * xmin_pos + 1.0, std::cbrt(90.0 / std::sqrt(2.0 * lambda)));
    return PotentialModel(ModelKind::QuarticSombrero, QuarticParams{lambda, mu},
                          Interval{-reach, reach}, std::nullopt, std::nullopt);
}

double sextic_ground_unnormalized(double a_sextic, double x) {
    const double x2 = x * x;
    return std::exp(-a_sextic * x2 * x2);
}

double sextic_ground_norm(double a_sextic) {
    // int exp(-2 a x^4) dx = 2 Gamma(5/4) / (2a)^(1/4)
    return std::sqrt(2.0 * std::tgamma(1.25) / std::pow(2.0 * a_sextic, 0.25));
}

PotentialModel sextic_factorized(double a_sextic, double mass, double hbar) {
    require_positive(a_sextic, "sextic width parameter a");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    const double reach = 4.0 / std::pow(a_sextic, 0.25);
    AnalyticOracle oracle;
    oracle.ground_energy = 0.0;
    const double norm = sextic_ground_norm(a_sextic);
    oracle.ground_function = [a_sextic, norm](double x) {
        return sextic_ground_unnormalized(a_sextic, x) / norm;
    };
    return PotentialModel(ModelKind::SexticFactorized, SexticParams{a_sextic, mass, hbar},
                          Interval{-reach, reach}, std::nullopt, std::move(oracle));
}

PotentialModel double_oscillator(double mass, double omega, double a, double hbar) {
    require_positive(mass, "mass");
    require_positive(omega, "omega");
    require_positive(hbar, "hbar");
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("double oscillator separation a must be >= 0");
    const double reach = a + 6.0 / std::sqrt(mass * omega / hbar);
    return PotentialModel(ModelKind::DoubleOscillator, DoubleOscillatorParams{mass, omega, a, hbar},
                          Interval{-reach, reach}, std::nullopt, std::nullopt);
}

PotentialModel square_double_well(double alpha, double a, double b) {
    require_well_geometry(a, b);
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("barrier height alpha must be finite and >= 0");
    return PotentialModel(ModelKind::SquareDoubleWell, SquareWellParams{alpha, a, b},
                          Interval{-a, a}, BarrierInterval{-b, b}, std::nullopt);
}

PotentialModel double_infinite_well(double a, double b, double mass, double hbar) {
    require_well_geometry(a, b);
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    AnalyticOracle oracle;
    const double width = a - b;
    oracle.level_formula = [width, mass, hbar](int n) {
        const double pi = std::numbers::pi;
        return pi * pi * hbar * hbar * n * n / (2.0 * mass * width * width);
    };
    oracle.ground_energy = oracle.level_formula(1);
    oracle.level_multiplicity = 2;
    return PotentialModel(ModelKind::DoubleInfiniteWell, InfiniteWellParams{a, b, mass, hbar},
                          Interval{-a, a}, BarrierInterval{-b, b}, std::move(oracle));
}

AnnihilatorCheck annihilator_residual(double a_sextic, const Grid& grid) {
    require_positive(a_sextic, "sextic width parameter a");
    if (!grid.symmetric()) throw DomainError("annihilator check needs a symmetric grid");
    if (sextic_ground_unnormalized(a_sextic, grid.xmax()) > 1e-12) {
        throw DomainError("grid does not cover the decay of exp(-a x^4) to 1e-12");
    }
    const double norm = sextic_ground_norm(a_sextic);
    const double h = grid.h();
    double sum = 0.0;
    double sum3 = 0.0;
    for (std::size_t i = 1; i + 1 < grid.n(); ++i) {
        const double x = grid.x(i);
        const double f = sextic_ground_unnormalized(a_sextic, x) / norm;
        const double fp = (sextic_ground_unnormalized(a_sextic, grid.x(i + 1)) -
                           sextic_ground_unnormalized(a_sextic, grid.x(i - 1))) /
                          (2.0 * h * norm);
        const double r = fp + 4.0 * a_sextic * x * x * x * f;
        sum += r * r;
        // f''' = (-24 a x + 144 a^2 x^5 - 64 a^3 x^9) f
        const double x4 = x * x * x * x;
        const double f3 = (-24.0 * a_sextic * x + 144.0 * a_sextic * a_sextic * x4 * x -
                           64.0 * a_sextic * a_sextic * a_sextic * x4 * x4 * x) *
                          f;
        sum3 += f3 * f3;
    }
    AnnihilatorCheck out;
    out.residual = std::sqrt(sum * h);
    out.bound = h * h / 6.0 * std::sqrt(sum3 * h);
    if (out.residual > 2.0 * out.bound + 1e-14) {
        throw SolverError("annihilator residual " + std::to_string(out.residual) +
                          " exceeds its O(h^2) estimate " + std::to_string(out.bound) +
                          "; grid too coarse");
    }
    return out;
}

std::vector<double> uinf_eigenfunction(int n, WellSide side, double a, double b,
                                       const Grid& grid) {
    if (n < 1) throw DomainError("level index n must be >= 1");
    require_well_geometry(a, b);
    const double tol = 1e-9 * std::max(1.0, a);
    if (std::abs(grid.xmin() + a) > tol || std::abs(grid.xmax() - a) > tol) {
        throw DomainError("grid must span [-a, a]");
    }
    if (!grid.symmetric()) throw DomainError("grid must be symmetric about 0");
    const double width = a - b;
    const double amp = std::sqrt(2.0 / width);
    const double pi = std::numbers::pi;
    std::vector<double> psi(grid.n(), 0.0);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double x = grid.x(i);
        if (x > -a && x < -b) psi[i] = amp * std::sin(pi * n * (x + a) / width);
    }
    const double nrm = grid_norm(psi, grid.h());
    if (!(nrm > 0.0)) throw DomainError("grid has no samples inside the well");
    for (double& v : psi) v /= nrm;
    // the right function is the sample-for-sample mirror of the left one
    if (side == WellSide::Right) std::reverse(psi.begin(), psi.end());
    return psi;
}

}  // namespace ssb
