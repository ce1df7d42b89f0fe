#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssb {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
};

/**
 * Uniform 1D lattice x_i = xmin + i*h, i = 0..n-1.
 *
 * A grid is flagged symmetric when xmin == -xmax and n is odd, so that x = 0
 * is a sample. For symmetric grids the positions are generated so that
 * x(n-1-i) == -x(i) bit-for-bit, which makes sample reversal an exact parity
 * operation on anything evaluated at the samples.
 */
class Grid {
public:
    Grid() = default;

    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    std::size_t n() const { return n_; }
    double h() const { return h_; }
    bool symmetric() const { return symmetric_; }

    double x(std::size_t i) const;
    std::vector<double> samples() const;

    // Index of x = 0. Only valid on symmetric grids.
    std::size_t center() const;

    // The n-2 samples strictly between xmin and xmax: the unknowns of a
    // problem with Dirichlet walls sitting exactly on xmin and xmax.
    Grid interior() const;

    // Nearest sample index to position x (clamped to the grid).
    std::size_t nearest(double x) const;

    friend Grid build_grid(double xmin, double xmax, std::size_t n);

private:
    double xmin_ = 0.0;
    double xmax_ = 0.0;
    std::size_t n_ = 0;
    double h_ = 0.0;
    bool symmetric_ = false;
};

// Throws DomainError for non-finite bounds, xmax <= xmin or n < 3.
Grid build_grid(double xmin, double xmax, std::size_t n);

// Grid-weighted inner product h * sum(a_i * b_i) and the induced norm.
double grid_inner(std::span<const double> a, std::span<const double> b, double h);
double grid_norm(std::span<const double> a, double h);

/// Real symmetric tridiagonal matrix stored as one diagonal and one
/// off-diagonal array, so it is symmetric by construction.
struct TridiagonalOperator {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const { return diag.size(); }

    std::vector<double> apply(std::span<const double> psi) const;

    // Max absolute row sum (== infinity norm == 1-norm for symmetric).
    double norm() const;

    // Row-major dense expansion; only meant for small test instances.
    std::vector<double> dense() const;
};

// Block-diagonal operator diag(first, second); the coupling between the last
// row of `first` and the first row of `second` is exactly zero.
TridiagonalOperator direct_sum(const TridiagonalOperator& first,
                               const TridiagonalOperator& second);

/**
 * 3-point finite-difference Hamiltonian -hbar^2/(2m) d^2/dx^2 + V on the grid
 * samples, with psi = 0 implied just outside [xmin, xmax]:
 *   diag_i    = hbar^2/(m h^2) + v_i
 *   offdiag_i = -hbar^2/(2 m h^2)
 *
 * Infinite potential regions must be removed from the grid beforehand
 * (see Grid::interior and split_domain); non-finite samples are rejected.
 */
TridiagonalOperator assemble_hamiltonian(const Grid& grid, std::span<const double> v,
                                         double mass = 1.0, double hbar = 1.0);

struct BarrierInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/**
 * Result of cutting an impenetrable barrier out of a walled domain.
 *
 * The parent grid's end samples and every sample inside the snapped barrier
 * are Dirichlet points (psi = 0). `left` and `right` hold only the unknown
 * samples of each well; `left_walls` / `right_walls` are the positions of the
 * Dirichlet edges that bound them.
 */
struct SplitDomain {
    Grid parent;
    Grid left;
    Grid right;
    Interval left_walls;
    Interval right_walls;
    // Snapped endpoint minus requested endpoint.
    double snap_lo = 0.0;
    double snap_hi = 0.0;
    // Parent index of the first sample of each sub-grid.
    std::size_t left_offset = 0;
    std::size_t right_offset = 0;

    std::size_t unknowns() const { return left.n() + right.n(); }

    // Maps a vector laid out as [left samples, right samples] onto the parent
    // grid, writing zeros at the Dirichlet points.
    std::vector<double> embed(std::span<const double> left_then_right) const;

    // Inverse of embed: picks the well samples out of a parent-grid vector.
    std::vector<double> restrict_to_wells(std::span<const double> full) const;
};

// Barrier endpoints are snapped to the nearest parent samples; the snap
// distances are recorded. Throws DomainError if the barrier is not strictly
// inside the grid or a well ends up with fewer than 3 unknowns.
SplitDomain split_domain(const Grid& grid, const BarrierInterval& barrier);

}  // namespace ssb
