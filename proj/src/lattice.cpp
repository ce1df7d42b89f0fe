#include "ssb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssb/errors.hpp"

namespace ssb {

Grid build_grid(double xmin, double xmax, std::size_t n) {
    if (!std::isfinite(xmin) || !std::isfinite(xmax)) {
        throw DomainError("grid bounds must be finite");
    }
    if (!(xmax > xmin)) {
        throw DomainError("grid requires xmax > xmin");
    }
    if (n < 3) {
        throw DomainError("grid requires at least 3 samples, got " + std::to_string(n));
    }
    Grid g;
    g.xmin_ = xmin;
    g.xmax_ = xmax;
    g.n_ = n;
    g.h_ = (xmax - xmin) / static_cast<double>(n - 1);
    g.symmetric_ = (xmin == -xmax) && (n % 2 == 1);
    return g;
}

double Grid::x(std::size_t i) const {
    if (symmetric_) {
        const std::size_t c = n_ / 2;
        if (i == c) return 0.0;
        if (i > c) return -(xmin_ + static_cast<double>(n_ - 1 - i) * h_);
    }
    if (i == n_ - 1) return xmax_;
    return xmin_ + static_cast<double>(i) * h_;
}

std::vector<double> Grid::samples() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
}

std::size_t Grid::center() const {
    if (!symmetric_) throw DomainError("grid has no x = 0 sample");
    return n_ / 2;
}

Grid Grid::interior() const {
    if (n_ < 5) throw DomainError("interior of a grid needs at least 5 samples");
    return build_grid(x(1), x(n_ - 2), n_ - 2);
}

std::size_t Grid::nearest(double pos) const {
    const double t = std::round((pos - xmin_) / h_);
    if (t <= 0.0) return 0;
    if (t >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(t);
}

double grid_inner(std::span<const double> a, std::span<const double> b, double h) {
    if (a.size() != b.size()) throw DomainError("inner product of vectors with different lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * h;
}

double grid_norm(std::span<const double> a, double h) {
    return std::sqrt(grid_inner(a, a, h));
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> psi) const {
    const std::size_t n = size();
    if (psi.size() != n) throw DomainError("operator/vector size mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * psi[i];
        if (i > 0) s += offdiag[i - 1] * psi[i - 1];
        if (i + 1 < n) s += offdiag[i] * psi[i + 1];
        out[i] = s;
    }
    return out;
}

double TridiagonalOperator::norm() const {
    const std::size_t n = size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) row += std::abs(offdiag[i - 1]);
        if (i + 1 < n) row += std::abs(offdiag[i]);
        best = std::max(best, row);
    }
    return best;
}

std::vector<double> TridiagonalOperator::dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = diag[i];
        if (i + 1 < n) {
            m[i * n + i + 1] = offdiag[i];
            m[(i + 1) * n + i] = offdiag[i];
        }
    }
    return m;
}

TridiagonalOperator direct_sum(const TridiagonalOperator& first,
                               const TridiagonalOperator& second) {
    TridiagonalOperator out;
    out.diag = first.diag;
    out.diag.insert(out.diag.end(), second.diag.begin(), second.diag.end());
    out.offdiag = first.offdiag;
    if (!first.diag.empty() && !second.diag.empty()) out.offdiag.push_back(0.0);
    out.offdiag.insert(out.offdiag.end(), second.offdiag.begin(), second.offdiag.end());
    return out;
}

TridiagonalOperator assemble_hamiltonian(const Grid& grid, std::span<const double> v,
                                         double mass, double hbar) {
    if (v.size() != grid.n()) {
        throw DomainError("potential has " + std::to_string(v.size()) + " samples, grid has " +
                          std::to_string(grid.n()));
    }
    if (!(mass > 0.0) || !(hbar > 0.0)) throw DomainError("mass and hbar must be positive");
    const double h = grid.h();
    const double t = hbar * hbar / (2.0 * mass * h * h);
    TridiagonalOperator op;
    op.diag.resize(grid.n());
    op.offdiag.assign(grid.n() - 1, -t);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        if (!std::isfinite(v[i])) {
            throw DomainError("non-finite potential sample at x = " + std::to_string(grid.x(i)) +
                              "; mask infinite regions by truncating the domain");
        }
        op.diag[i] = 2.0 * t + v[i];
    }
    return op;
}

SplitDomain split_domain(const Grid& grid, const BarrierInterval& barrier) {
    if (!(barrier.lo < barrier.hi)) throw DomainError("barrier requires lo < hi");
    if (!(barrier.lo > grid.xmin()) || !(barrier.hi < grid.xmax())) {
        throw DomainError("barrier is not strictly inside the grid");
    }
    const std::size_t ilo = grid.nearest(barrier.lo);
    const std::size_t ihi = grid.nearest(barrier.hi);
    // Unknowns: parent samples 1..ilo-1 and ihi+1..n-2.
    if (ihi < ilo || ilo < 4 || ihi + 5 > grid.n()) {
        throw DomainError("barrier leaves a well with fewer than 3 unknown samples");
    }
    SplitDomain s;
    s.parent = grid;
    s.left = build_grid(grid.x(1), grid.x(ilo - 1), ilo - 1);
    s.right = build_grid(grid.x(ihi + 1), grid.x(grid.n() - 2), grid.n() - 2 - ihi);
    s.left_walls = {grid.xmin(), grid.x(ilo)};
    s.right_walls = {grid.x(ihi), grid.xmax()};
    s.snap_lo = grid.x(ilo) - barrier.lo;
    s.snap_hi = grid.x(ihi) - barrier.hi;
    s.left_offset = 1;
    s.right_offset = ihi + 1;
    return s;
}

std::vector<double> SplitDomain::embed(std::span<const double> left_then_right) const {
    if (left_then_right.size() != unknowns()) throw DomainError("embed: wrong vector length");
    std::vector<double> full(parent.n(), 0.0);
    std::copy_n(left_then_right.begin(), left.n(), full.begin() + static_cast<std::ptrdiff_t>(left_offset));
    std::copy_n(left_then_right.begin() + static_cast<std::ptrdiff_t>(left.n()), right.n(),
                full.begin() + static_cast<std::ptrdiff_t>(right_offset));
    return full;
}

std::vector<double> SplitDomain::restrict_to_wells(std::span<const double> full) const {
    if (full.size() != parent.n()) throw DomainError("restrict: wrong vector length");
    std::vector<double> out;
    out.reserve(unknowns());
    out.insert(out.end(), full.begin() + static_cast<std::ptrdiff_t>(left_offset),
               full.begin() + static_cast<std::ptrdiff_t>(left_offset + left.n()));
    out.insert(out.end(), full.begin() + static_cast<std::ptrdiff_t>(right_offset),
               full.begin() + static_cast<std::ptrdiff_t>(right_offset + right.n()));
    return out;
}

}  // namespace ssb
