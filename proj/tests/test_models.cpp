#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssb/eigen.hpp"
#include "ssb/errors.hpp"
#include "ssb/models.hpp"
#include "ssb/symmetry.hpp"

using namespace ssb;

namespace {

double pi2() { return std::numbers::pi * std::numbers::pi; }

}  // namespace

TEST_CASE("quartic sombrero shape") {
    const auto v = quartic_sombrero(1.0, 1.0);
    CHECK(v.kind() == ModelKind::QuarticSombrero);
    CHECK(v(0.0) == 0.0);
    CHECK(v(1.0) == 0.0);
    CHECK(v(1.0 / std::sqrt(2.0)) == doctest::Approx(-0.25));
    CHECK(v(-1.0 / std::sqrt(2.0)) == doctest::Approx(-0.25));
    for (double x : {0.1, 0.37, 1.3, 2.9}) CHECK(v(x) == v(-x));
    CHECK(v.domain_hint().lo == -v.domain_hint().hi);
    CHECK_THROWS_AS(quartic_sombrero(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(quartic_sombrero(1.0, -1.0), DomainError);
}

TEST_CASE("sextic factorized potential") {
    const auto v = sextic_factorized(1.0);
    CHECK(v(1.0) == doctest::Approx(2.0));
    const double xm = 1.0 / std::sqrt(2.0);
    CHECK(v(xm) == doctest::Approx(-2.0));
    CHECK(v(-xm) == doctest::Approx(-2.0));
    // stationary at the minima
    CHECK(std::abs(v(xm + 1e-6) - v(xm - 1e-6)) < 1e-9);
    REQUIRE(v.analytic().has_value());
    CHECK(*v.analytic()->ground_energy == 0.0);
    // normalized ground function, checked by quadrature
    double s = 0.0;
    const double h = 1e-4;
    for (double x = -4.0; x <= 4.0; x += h) s += std::pow(v.analytic()->ground_function(x), 2);
    CHECK(s * h == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(sextic_factorized(0.0), DomainError);
}

TEST_CASE("sextic ground state is annihilated analytically") {
    for (double a : {0.5, 1.0, 2.0}) {
        for (double x : {-1.3, -0.2, 0.0, 0.7, 1.9}) {
            const double f = sextic_ground_unnormalized(a, x);
            const double df = -4.0 * a * x * x * x * f;
            CHECK(-df - 4.0 * a * x * x * x * f == 0.0);
        }
    }
}

TEST_CASE("sextic FD ground energy and state") {
    const auto model = sextic_factorized(1.0);
    const Grid g = build_grid(-3.0, 3.0, 8001);
    const auto op = assemble_hamiltonian(g, model.sample(g));
    const auto s = eigensolve(op, 2, g);
    CHECK(std::abs(s.levels[0]) < 1e-6);
    std::vector<double> f(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) f[i] = model.analytic()->ground_function(g.x(i));
    // the exact function misses the 3-point stencil by O(h^2)
    const double fine = residual_norm(op, f, 0.0, g.h());
    CHECK(fine < 1e-5);
    const Grid gc = build_grid(-3.0, 3.0, 4001);
    std::vector<double> fc(gc.n());
    for (std::size_t i = 0; i < gc.n(); ++i) fc[i] = model.analytic()->ground_function(gc.x(i));
    const double coarse = residual_norm(assemble_hamiltonian(gc, model.sample(gc)), fc, 0.0, gc.h());
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("annihilator residual on the grid") {
    const Grid g = build_grid(-3.0, 3.0, 2001);
    const auto r = annihilator_residual(1.0, g);
    // Frozen from this implementation: centred differences leave (h^2/6)|f'''|.
    CHECK(r.residual == doctest::Approx(2.2542e-5).epsilon(1e-3));
    CHECK(r.residual <= r.bound * 1.01);

    const auto fine = annihilator_residual(1.0, build_grid(-3.0, 3.0, 4001));
    CHECK(fine.residual < 1e-5);
    CHECK(r.residual / fine.residual == doctest::Approx(4.0).epsilon(0.2));

    CHECK_THROWS_AS(annihilator_residual(1.0, build_grid(-3.0, 3.0, 2000)), DomainError);
    CHECK_THROWS_AS(annihilator_residual(1.0, build_grid(-1.0, 1.0, 201)), DomainError);
}

TEST_CASE("double oscillator") {
    const auto v = double_oscillator(1.0, 1.0, 2.0);
    CHECK(v(2.0) == 0.0);
    CHECK(v(-2.0) == 0.0);
    CHECK(v(0.0) == doctest::Approx(4.0));
    const auto w = double_oscillator(2.0, 3.0, 1.5);
    CHECK(w(0.0) == doctest::Approx(2.0 * 9.0 * 2.25));

    // a = 0: single oscillator m w^2 x^2, i.e. frequency sqrt2 w
    const double omega = 1.0;
    const auto single = double_oscillator(1.0, omega, 0.0);
    const Grid g = build_grid(single.domain_hint().lo, single.domain_hint().hi, 2001);
    const auto lv = lowest_eigenvalues(assemble_hamiltonian(g, single.sample(g)), 4);
    for (int n = 0; n < 4; ++n) {
        CHECK(lv[n] == doctest::Approx(std::numbers::sqrt2 * omega * (n + 0.5)).epsilon(1e-4));
    }
    CHECK_THROWS_AS(double_oscillator(1.0, 1.0, -1.0), DomainError);
}

TEST_CASE("square double well samples") {
    const auto u = square_double_well(50.0, 2.0, 0.5);
    CHECK(u(0.0) == 50.0);
    CHECK(u(1.0) == 0.0);
    CHECK(std::isinf(u(2.0)));
    CHECK(std::isinf(u(-2.0)));
    for (double x : {0.1, 0.6, 1.7}) CHECK(u(x) == u(-x));
    REQUIRE(u.barrier().has_value());
    CHECK(u.barrier()->hi == 0.5);

    // Samples landing on the barrier edge take the midpoint of the jump.
    const Grid g = build_grid(-2.0, 2.0, 9).interior();
    const auto v = u.sample(g);
    CHECK(v[g.nearest(0.5)] == 25.0);
    CHECK(v[g.nearest(0.0)] == 50.0);

    CHECK_THROWS_AS(square_double_well(-1.0, 2.0, 0.5), DomainError);
    CHECK_THROWS_AS(square_double_well(1.0, 0.5, 2.0), DomainError);
}

TEST_CASE("zero barrier is a single box of width 2a") {
    const auto u = square_double_well(0.0, 2.0, 0.5);
    const Grid g = build_grid(-2.0, 2.0, 2001).interior();
    const auto e = lowest_eigenvalues(assemble_hamiltonian(g, u.sample(g)), 2);
    CHECK(e[0] == doctest::Approx(pi2() / (2.0 * 16.0)).epsilon(1e-5));
    CHECK(e[1] == doctest::Approx(4.0 * pi2() / (2.0 * 16.0)).epsilon(1e-5));
}

TEST_CASE("double infinite well oracle") {
    const auto u = double_infinite_well(2.0, 0.5);
    const auto& o = *u.analytic();
    CHECK(o.level_formula(1) == doctest::Approx(2.19325).epsilon(1e-5));
    CHECK(o.level_formula(1) == doctest::Approx(pi2() / 4.5));
    CHECK(o.level_formula(2) / o.level_formula(1) == 4.0);
    CHECK(o.level_multiplicity == 2);
    CHECK(std::isinf(u(0.0)));
    CHECK(u(1.0) == 0.0);
    // only a - b matters
    const auto shifted = double_infinite_well(3.0, 1.5);
    CHECK(shifted.analytic()->level_formula(3) == doctest::Approx(o.level_formula(3)).epsilon(1e-14));
}

TEST_CASE("U_inf eigenfunctions: disjoint wells, mirror images, unit norm") {
    const Grid g = build_grid(-2.0, 2.0, 4001);
    for (int n = 1; n <= 3; ++n) {
        const auto l = uinf_eigenfunction(n, WellSide::Left, 2.0, 0.5, g);
        const auto r = uinf_eigenfunction(n, WellSide::Right, 2.0, 0.5, g);
        CHECK(std::abs(grid_inner(l, r, g.h())) == 0.0);
        CHECK(parity_apply(l, g) == r);
        CHECK(grid_norm(l, g.h()) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // the closed-form normalization sqrt(2/(a-b)) is already right on a fine grid
    const Grid fine = build_grid(-2.0, 2.0, 40001);
    const auto l1 = uinf_eigenfunction(1, WellSide::Left, 2.0, 0.5, fine);
    double raw = 0.0;
    for (std::size_t i = 0; i < fine.n(); ++i) {
        const double x = fine.x(i);
        if (x > -2.0 && x < -0.5) raw += std::pow(std::sqrt(2.0 / 1.5) * std::sin(std::numbers::pi * (x + 2.0) / 1.5), 2);
    }
    CHECK(std::abs(raw * fine.h() - 1.0) < 1e-6);
    CHECK(std::abs(l1[fine.nearest(-1.25)]) == doctest::Approx(std::sqrt(2.0 / 1.5)).epsilon(1e-6));

    CHECK_THROWS_AS(uinf_eigenfunction(0, WellSide::Left, 2.0, 0.5, g), DomainError);
}

TEST_CASE("to_string covers every model") {
    CHECK(to_string(ModelKind::SexticFactorized) == "sextic-factorized");
    CHECK(to_string(ModelKind::DoubleInfiniteWell) == "double-infinite-well");
}
