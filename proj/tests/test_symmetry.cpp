#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ssb/eigen.hpp"
#include "ssb/errors.hpp"
#include "ssb/models.hpp"
#include "ssb/spinor.hpp"
#include "ssb/symmetry.hpp"

using namespace ssb;

namespace {

struct Uinf {
    Grid grid;
    SplitDomain split;
    TridiagonalOperator op;
};

Uinf make_uinf(std::size_t n = 2001) {
    Uinf u;
    u.grid = build_grid(-2.0, 2.0, n);
    u.split = split_domain(u.grid, {-0.5, 0.5});
    u.op = direct_sum(assemble_hamiltonian(u.split.left, std::vector<double>(u.split.left.n(), 0.0)),
                      assemble_hamiltonian(u.split.right, std::vector<double>(u.split.right.n(), 0.0)));
    return u;
}

// Dense complex involution I - 2 Q Q^H built from a random subspace.
struct ComplexInvolution {
    std::size_t dim;
    std::vector<std::complex<double>> m;

    std::vector<std::complex<double>> apply(std::span<const std::complex<double>> v) const {
        std::vector<std::complex<double>> out(dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) out[i] += m[i * dim + j] * v[j];
        return out;
    }
};

}  // namespace

TEST_CASE("parity_apply on sampled functions") {
    const Grid g = build_grid(-1.0, 1.0, 11);
    std::vector<double> even(g.n()), odd(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        even[i] = std::cos(g.x(i));
        odd[i] = std::sin(g.x(i));
    }
    CHECK(parity_apply(even, g) == even);
    const auto flipped = parity_apply(odd, g);
    for (std::size_t i = 0; i < g.n(); ++i) CHECK(flipped[i] == -odd[i]);
    CHECK_THROWS_AS(parity_apply(even, build_grid(0.0, 1.0, 11)), DomainError);
}

TEST_CASE("parity maps the left well state onto the right one") {
    const Grid g = build_grid(-2.0, 2.0, 801);
    const auto l = uinf_eigenfunction(1, WellSide::Left, 2.0, 0.5, g);
    const auto r = uinf_eigenfunction(1, WellSide::Right, 2.0, 0.5, g);
    CHECK(parity_apply(l, g) == r);
    CHECK(SymmetryOp::parity(g).apply(l) == r);
}

TEST_CASE("commutator norms") {
    const auto q = quartic_sombrero(1.0, 1.0);
    const Grid g = build_grid(-3.0, 3.0, 601);
    const auto op = assemble_hamiltonian(g, q.sample(g));
    CHECK(commutator_norm(op, SymmetryOp::parity(g)) <= 1e-12);
    CHECK(commutator_norm(op, SymmetryOp::parity(g), g) <= 1e-12);

    std::vector<double> tilted(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double x = g.x(i);
        tilted[i] = x * x * x * x - x * x + 0.1 * x;
    }
    const auto top = assemble_hamiltonian(g, tilted);
    CHECK(commutator_norm(top, SymmetryOp::parity(g)) > 1e-3);

    const auto sm = build_spinor_model(std::numbers::phi, 1.0);
    const auto sop = assemble_spinor_hamiltonian(sm, g).stacked();
    CHECK(commutator_norm(sop, SymmetryOp::sigma3(g.n())) == 0.0);
    // parity also commutes with the spinor model (block-wise), but sigma3 is the internal one
    CHECK_THROWS_AS(commutator_norm(op, SymmetryOp::sigma3(g.n())), DomainError);
}

TEST_CASE("custom symmetry validation") {
    CHECK_NOTHROW(SymmetryOp::custom({0, 1, 1, 0}, 2));
    CHECK_THROWS_AS(SymmetryOp::custom({1, 1, 0, 1}, 2), DomainError);
    CHECK_THROWS_AS(SymmetryOp::custom({0, 1, 1}, 2), DomainError);
    // a rotation by 90 degrees is orthogonal but not an involution
    CHECK_THROWS_AS(SymmetryOp::custom({0, -1, 1, 0}, 2), DomainError);
    const auto u = SymmetryOp::custom({0, 1, 1, 0}, 2);
    CHECK_FALSE(u.is_signed_permutation());
    CHECK(u.apply(std::vector<double>{3.0, 4.0}) == std::vector<double>{4.0, 3.0});
}

TEST_CASE("pair lemma on the 2-vector example") {
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.6, 0.8};
    // reflection about the bisector of A and B (direct arithmetic)
    const double d0 = 2.0 / std::sqrt(5.0);
    const double d1 = 1.0 / std::sqrt(5.0);
    const auto u = SymmetryOp::custom({2 * d0 * d0 - 1, 2 * d0 * d1, 2 * d0 * d1, 2 * d1 * d1 - 1}, 2);
    const auto p = build_nonoverlapping_pair(a, b, u);
    CHECK(p.left[0] == doctest::Approx(0.9487).epsilon(1e-4));
    CHECK(p.left[1] == doctest::Approx(-0.3162).epsilon(1e-4));
    CHECK(p.right[0] == doctest::Approx(0.3162).epsilon(1e-4));
    CHECK(p.right[1] == doctest::Approx(0.9487).epsilon(1e-4));
    CHECK(std::abs(p.left[0] * p.right[0] + p.left[1] * p.right[1]) < 1e-15);
    CHECK(p.overlap_ab == doctest::Approx(0.6));

    const auto ul = u.apply(p.left);
    const auto ur = u.apply(p.right);
    for (int i = 0; i < 2; ++i) {
        CHECK(ul[i] == doctest::Approx(p.right[i]).epsilon(1e-14));
        CHECK(ur[i] == doctest::Approx(p.left[i]).epsilon(1e-14));
    }
}

TEST_CASE("pair lemma with an already orthogonal pair") {
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.0, 1.0};
    const auto u = SymmetryOp::custom({0, 1, 1, 0}, 2);
    const auto p = build_nonoverlapping_pair(a, b, u);
    CHECK(p.overlap_ab == 0.0);
    CHECK(std::abs(p.left[0] * p.right[0] + p.left[1] * p.right[1]) < 1e-15);
    // with <A|B> = 0 the construction hands back A and B themselves
    CHECK(p.left[0] == doctest::Approx(1.0));
    CHECK(p.right[1] == doctest::Approx(1.0));
}

TEST_CASE("pair lemma preconditions") {
    const auto u = SymmetryOp::custom({0, 1, 1, 0}, 2);
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<double> fixed{r, r};
    CHECK_THROWS_AS(build_nonoverlapping_pair(fixed, fixed, u), SymmetryError);
    CHECK_THROWS_AS(build_nonoverlapping_pair(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}, u),
                    SymmetryError);
    CHECK_THROWS_AS(build_nonoverlapping_pair(std::vector<double>{2.0, 0.0}, std::vector<double>{0.0, 2.0}, u),
                    SymmetryError);
}

TEST_CASE("pair lemma over complex involutions") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 2 + trial % 7;
        auto rnd = [&] { return std::complex<double>(g(rng), g(rng)); };
        // one random unit vector q: U = I - 2 q q^H
        std::vector<std::complex<double>> q(dim);
        double nq = 0.0;
        for (auto& x : q) {
            x = rnd();
            nq += std::norm(x);
        }
        for (auto& x : q) x /= std::sqrt(nq);
        ComplexInvolution u{dim, std::vector<std::complex<double>>(dim * dim)};
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) u.m[i * dim + j] = (i == j ? 1.0 : 0.0) - 2.0 * q[i] * std::conj(q[j]);
        std::vector<std::complex<double>> a(dim);
        double na = 0.0;
        for (auto& x : a) {
            x = rnd();
            na += std::norm(x);
        }
        for (auto& x : a) x /= std::sqrt(na);
        const auto b = u.apply(a);
        const auto p = build_nonoverlapping_pair<std::complex<double>>(a, b, u);
        std::complex<double> lr = 0.0;
        for (std::size_t i = 0; i < dim; ++i) lr += std::conj(p.left[i]) * p.right[i];
        REQUIRE(std::abs(lr) < 1e-12);
        const auto ul = u.apply(p.left);
        double mis = 0.0;
        for (std::size_t i = 0; i < dim; ++i) mis += std::norm(ul[i] - p.right[i]);
        REQUIRE(std::sqrt(mis) < 1e-12);
    }
}

TEST_CASE("symmetry respecting combinations of the U_inf pair") {
    const Grid g = build_grid(-2.0, 2.0, 2001);
    const auto l = uinf_eigenfunction(1, WellSide::Left, 2.0, 0.5, g);
    const auto r = uinf_eigenfunction(1, WellSide::Right, 2.0, 0.5, g);
    const auto p = symmetry_respecting_pair(l, r, g.h());
    CHECK(grid_norm(p.plus, g.h()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid_norm(p.minus, g.h()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(grid_inner(p.plus, p.minus, g.h())) < 1e-14);
    // (L + R)/sqrt2 is even, (L - R)/sqrt2 is odd
    CHECK(parity_apply(p.plus, g) == p.plus);
    const auto m = parity_apply(p.minus, g);
    for (std::size_t i = 0; i < g.n(); ++i) REQUIRE(m[i] == -p.minus[i]);

    const auto q = quartic_sombrero(1.0, 1.0);
    std::vector<double> bump(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) bump[i] = std::exp(-g.x(i) * g.x(i));
    CHECK_THROWS_AS(symmetry_respecting_pair(bump, bump, g.h()), SymmetryError);
}

TEST_CASE("project_right") {
    const auto u = make_uinf();
    const auto s = eigensolve(u.op, 2, u.grid.h());
    const auto pv = SymmetryOp::parity(u.op.size()).apply(s.vectors[0]);
    std::vector<double> even(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) even[i] = (s.vectors[0][i] + pv[i]) / std::sqrt(2.0);
    const auto full = u.split.embed(even);
    const BarrierInterval barrier{-0.5, 0.5};
    const auto proj = project_right(full, u.grid, barrier);
    CHECK(proj.factor == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(grid_norm(proj.psi, u.grid.h()) == doctest::Approx(1.0).epsilon(1e-12));
    const double res = residual_norm(u.op, u.split.restrict_to_wells(proj.psi), s.levels[0], u.grid.h());
    CHECK(res < s.tolerance);
    // parity image is the left-well projection, orthogonal to the right one
    const auto left = parity_apply(proj.psi, u.grid);
    CHECK(grid_inner(left, proj.psi, u.grid.h()) == 0.0);
    CHECK(residual_norm(u.op, u.split.restrict_to_wells(left), s.levels[0], u.grid.h()) < s.tolerance);

    // already right-localized: only renormalized
    auto twice = proj.psi;
    for (double& x : twice) x *= 3.0;
    const auto again = project_right(twice, u.grid, barrier);
    for (std::size_t i = 0; i < twice.size(); ++i) REQUIRE(again.psi[i] == doctest::Approx(proj.psi[i]).epsilon(1e-12));

    const auto only_left = project_right(left, u.grid, barrier);
    CHECK(only_left.right_half_empty);
    CHECK_THROWS_AS(project_right(std::vector<double>(u.grid.n(), 0.0), u.grid, barrier), DomainError);
    CHECK_THROWS_AS(project_right(full, u.grid, {-0.2, 0.5}), DomainError);
}

TEST_CASE("detect_ssb verdicts") {
    SUBCASE("quartic sombrero keeps parity") {
        const auto q = quartic_sombrero(1.0, 1.0);
        const Grid g = build_grid(q.domain_hint().lo, q.domain_hint().hi, 1601);
        const auto op = assemble_hamiltonian(g, q.sample(g));
        const auto s = eigensolve(op, 3, g);
        const auto v = detect_ssb(op, s, SymmetryOp::parity(g));
        CHECK_FALSE(v.broken);
        CHECK(v.ground_multiplicity == 1);
        CHECK_FALSE(v.pair.has_value());
    }
    SUBCASE("U_inf breaks parity with the well-localized pair") {
        const auto u = make_uinf();
        const auto s = eigensolve(u.op, 4, u.grid.h());
        const auto v = detect_ssb(u.op, s, SymmetryOp::parity(u.op.size()));
        CHECK(v.broken);
        CHECK(v.ground_multiplicity == 2);
        REQUIRE(v.pair.has_value());
        CHECK(v.pair_overlap < 1e-12);
        const auto l = u.split.embed(v.pair->left);
        const auto r = u.split.embed(v.pair->right);
        const auto pl = uinf_eigenfunction(1, WellSide::Left, 2.0, 0.5, u.grid);
        const auto pr = uinf_eigenfunction(1, WellSide::Right, 2.0, 0.5, u.grid);
        const double h = u.grid.h();
        const double al = std::max(std::abs(grid_inner(l, pl, h)), std::abs(grid_inner(l, pr, h)));
        const double ar = std::max(std::abs(grid_inner(r, pl, h)), std::abs(grid_inner(r, pr, h)));
        CHECK(al == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ar == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("spinor model breaks sigma3") {
        const auto sm = build_spinor_model(std::numbers::phi, 1.0);
        const Grid g = build_grid(-8.0, 8.0, 80001);
        const auto op = assemble_spinor_hamiltonian(sm, g).stacked();
        const auto s = eigensolve(op, 3, g.h());
        const auto v = detect_ssb(op, s, SymmetryOp::sigma3(g.n()));
        CHECK(v.broken);
        CHECK(v.ground_multiplicity == 2);
        REQUIRE(v.pair.has_value());
        CHECK(v.pair_overlap < 1e-10);
        // L = (psi_+, psi_-)/sqrt2 up to the sign convention of the channels
        const std::size_t n = g.n();
        double up = 0.0, down = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            up += v.pair->left[i] * v.pair->left[i];
            down += v.pair->left[n + i] * v.pair->left[n + i];
        }
        CHECK(up * g.h() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(down * g.h() == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("non-commuting symmetry is rejected") {
        const Grid g = build_grid(-3.0, 3.0, 301);
        std::vector<double> tilted(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) tilted[i] = std::pow(g.x(i), 4) - g.x(i) * g.x(i) + 0.1 * g.x(i);
        const auto op = assemble_hamiltonian(g, tilted);
        const auto s = eigensolve(op, 2, g);
        CHECK_THROWS_AS(detect_ssb(op, s, SymmetryOp::parity(g)), SymmetryError);
    }
    SUBCASE("a symmetry acting trivially on a degenerate level does not break") {
        // two identical decoupled blocks; the symmetry flips the sign of the second block only
        TridiagonalOperator block{{2.0, 2.0, 2.0}, {-1.0, -1.0}};
        const auto op = direct_sum(block, block);
        const auto s = eigensolve(op, 2, 1.0);
        const auto v = detect_ssb(op, s, SymmetryOp::sigma3(3));
        CHECK(v.ground_multiplicity == 2);
        CHECK(v.broken);
        const auto ident = SymmetryOp::custom(
            {1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1},
            6);
        CHECK_FALSE(detect_ssb(op, s, ident).broken);
    }
}

TEST_CASE("parity sectors reproduce the full spectrum") {
    const auto q = quartic_sombrero(1.0, 3.0);
    const Grid g = build_grid(-3.0, 3.0, 401);
    const auto op = assemble_hamiltonian(g, q.sample(g));
    const auto full = lowest_eigenvalues(op, 8);
    const auto ps = solve_by_parity(op, g, 4, 4);
    std::vector<double> merged(ps.even.levels);
    merged.insert(merged.end(), ps.odd.levels.begin(), ps.odd.levels.end());
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i < 8; ++i) CHECK(merged[i] == doctest::Approx(full[i]).epsilon(1e-11));
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(parity_apply(ps.even.vectors[k], g) == ps.even.vectors[k]);
        const auto o = parity_apply(ps.odd.vectors[k], g);
        for (std::size_t i = 0; i < g.n(); ++i) REQUIRE(o[i] == -ps.odd.vectors[k][i]);
        CHECK(ps.even.residuals[k] <= ps.even.tolerance);
        CHECK(grid_norm(ps.even.vectors[k], g.h()) == doctest::Approx(1.0).epsilon(1e-12));
    }
    std::vector<double> tilted(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) tilted[i] = g.x(i);
    CHECK_THROWS_AS(parity_sectors(assemble_hamiltonian(g, tilted)), DomainError);
}
