#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ssb/lattice.hpp"

namespace ssb {

inline constexpr double kDefaultDegeneracyTol = 1e-8;

/**
 * Lowest eigenpairs of a discretized Hamiltonian.
 *
 * Vectors are normalized with the grid weight, spacing * sum(psi_i^2) = 1,
 * and carry the sign convention "first sample with |psi| > 1e-12 is
 * positive". `residuals[j]` is the grid-weighted ||H psi_j - E_j psi_j||;
 * `tolerance` is the bound the solver guarantees for every residual.
 */
struct Spectrum {
    std::vector<double> levels;
    std::vector<std::vector<double>> vectors;
    std::vector<double> residuals;
    double spacing = 1.0;
    double tolerance = 0.0;
    std::optional<Grid> grid;

    std::size_t size() const { return levels.size(); }
};

// k lowest eigenpairs; op.size() must equal grid.n().
Spectrum eigensolve(const TridiagonalOperator& op, std::size_t k, const Grid& grid);

// Same, for operators that do not live on a single grid (direct sums of
// wells or channels); `spacing` is the quadrature weight of each sample.
Spectrum eigensolve(const TridiagonalOperator& op, std::size_t k, double spacing);

// k lowest eigenvalues only (Sturm bisection), ascending.
std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, std::size_t k);

// Number of eigenvalues strictly below x.
std::size_t count_below(const TridiagonalOperator& op, double x);

struct LevelCluster {
    double mean = 0.0;
    std::size_t multiplicity = 0;
    std::vector<std::size_t> members;
    double spread = 0.0;
};

struct DegeneracyReport {
    std::vector<LevelCluster> clusters;
    double tol = kDefaultDegeneracyTol;
};

// Greedy scan over ascending levels: a new cluster starts whenever the gap to
// the previous level exceeds tol. Throws DomainError on unsorted input or
// non-positive tol.
DegeneracyReport cluster_degeneracies(std::span<const double> levels,
                                      double tol = kDefaultDegeneracyTol);

// Grid-weighted ||H psi - e psi||_2.
double residual_norm(const TridiagonalOperator& op, std::span<const double> psi, double e,
                     double spacing = 1.0);

}  // namespace ssb
