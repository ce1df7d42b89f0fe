#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssb/lattice.hpp"

namespace ssb {

// Square double well with impenetrable outer walls at |x| = a and a barrier
// of height alpha on |x| <= b.
struct WellGeometry {
    double alpha = 50.0;
    double a = 2.0;
    double b = 0.5;
    double mass = 1.0;
    double hbar = 1.0;

    // Throws DomainError unless a > b > 0, alpha > 0, mass, hbar > 0.
    void validate() const;
};

enum class Parity { Even, Odd };

std::string to_string(Parity p);

/**
 * Unsquared matching residuals below the barrier (0 < E < alpha):
 *   even: -sqrt(E) cot((a-b) sqrt(2mE)/hbar) - sqrt(alpha-E) tanh(b sqrt(2m(alpha-E))/hbar)
 *   odd:  same with coth in place of tanh
 * Zeros are exactly the bound levels of that parity. At a pole of cot the
 * result is a signed infinity. Throws DomainError for E outside (0, alpha).
 */
double even_condition(double energy, const WellGeometry& g);
double odd_condition(double energy, const WellGeometry& g);
double matching_condition(double energy, const WellGeometry& g, Parity parity);

// Both sides of the squared relation E cot^2(...) = (alpha - E) tanh^{+-2}(...);
// equal at every root of the unsquared residual.
struct SquaredSides {
    double lhs = 0.0;
    double rhs = 0.0;
};
SquaredSides squared_condition(double energy, const WellGeometry& g, Parity parity);

// Roots of the matching condition below the barrier, found by bisection
// between consecutive poles of cot down to the last representable bracket.
struct RootSet {
    std::vector<double> roots;
    std::vector<Interval> brackets;  // pole-delimited search intervals
    std::vector<double> residuals;   // matching residual at each root
};
RootSet subbarrier_roots(const WellGeometry& g, Parity parity);

struct RootReport {
    Parity parity = Parity::Even;
    std::vector<double> roots;
    std::vector<Interval> brackets;
    std::vector<double> residuals;
    // Finite-difference cross-check on the walled domain, same parity.
    std::vector<double> fd_levels;   // FD eigenvalues below alpha
    std::vector<double> oracle_match;  // |root - fd| / fd, index-paired
    std::size_t fd_samples = 0;
};

inline constexpr std::size_t kDefaultWellSamples = 4001;

// Roots plus an FD verification with `fd_samples` samples over [-a, a].
RootReport find_subbarrier_levels(const WellGeometry& g, Parity parity,
                                  std::size_t fd_samples = kDefaultWellSamples);

struct FdParityLevels {
    std::vector<double> even;
    std::vector<double> odd;
};

// Parity-resolved FD eigenvalues of U_alpha below alpha.
FdParityLevels fd_subbarrier_levels(const WellGeometry& g, std::size_t fd_samples);

struct SweepRow {
    double alpha = 0.0;
    std::optional<double> e_even;
    std::optional<double> e_odd;
    // E_odd - E_even, present only when both levels exist below the barrier.
    std::optional<double> delta;
    std::size_t even_count = 0;
    std::size_t odd_count = 0;
};

/**
 * Level `level` (1-based) of each parity for every alpha in ascending order.
 * Rows where the level is not bound below the barrier keep empty fields.
 * Entries are computed by up to `jobs` worker threads; output order follows
 * `alphas`.
 */
std::vector<SweepRow> splitting_sweep(std::span<const double> alphas, const WellGeometry& base,
                                      int level, std::size_t jobs = 1);

// Smallest alpha in the sweep with a nonempty even root list.
std::optional<double> threshold_alpha(std::span<const SweepRow> rows);

}  // namespace ssb
