#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ssb/eigen.hpp"
#include "ssb/errors.hpp"
#include "ssb/lattice.hpp"

namespace ssb {

enum class SymmetryKind { Parity, Sigma3, Custom };

std::string to_string(SymmetryKind kind);

/**
 * Unitary involution acting on state vectors.
 *
 * Parity and Sigma3 are signed permutations (psi'_i = s_i psi_{p(i)}), which
 * lets commutators be evaluated exactly in O(n). Custom operators are dense
 * real orthogonal involutions for small test spaces.
 */
class SymmetryOp {
public:
    // Sample reversal on n samples (exact parity on a symmetric grid, or on
    // a mirror-symmetric [left well, right well] layout).
    static SymmetryOp parity(std::size_t n);
    // Throws DomainError unless the grid is symmetric.
    static SymmetryOp parity(const Grid& grid);
    // diag(+1, -1) on a stacked (up, down) spinor with `channel_size`
    // samples per channel.
    static SymmetryOp sigma3(std::size_t channel_size);
    // Row-major dim x dim matrix; must satisfy U^2 = 1 and U^T U = 1 to 1e-10.
    static SymmetryOp custom(std::vector<double> matrix, std::size_t dim);

    SymmetryKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }

    std::vector<double> apply(std::span<const double> psi) const;
    std::vector<std::complex<double>> apply(std::span<const std::complex<double>> psi) const;

    bool is_signed_permutation() const { return kind_ != SymmetryKind::Custom; }
    std::size_t source(std::size_t i) const { return perm_[i]; }
    double sign(std::size_t i) const { return sign_[i]; }
    const std::vector<double>& matrix() const { return matrix_; }

private:
    SymmetryKind kind_ = SymmetryKind::Custom;
    std::size_t dim_ = 0;
    std::vector<std::size_t> perm_;
    std::vector<double> sign_;
    std::vector<double> matrix_;
};

// psi(x) -> psi(-x) on a symmetric grid.
std::vector<double> parity_apply(std::span<const double> psi, const Grid& grid);

// max_i ||(H U - U H) e_i||_2 over the canonical basis.
double commutator_norm(const TridiagonalOperator& op, const SymmetryOp& u);
double commutator_norm(const TridiagonalOperator& op, const SymmetryOp& u, const Grid& grid);

template <typename Scalar>
struct NonoverlappingPair {
    std::vector<Scalar> left;   // L = (|+> + |->)/sqrt2
    std::vector<Scalar> right;  // R = (|+> - |->)/sqrt2 = U L
    std::vector<Scalar> plus;   // U|+> = +|+>
    std::vector<Scalar> minus;  // U|-> = -|->
    double overlap_ab = 0.0;    // <A|B>, real for involutions
};

namespace detail {

template <typename Scalar>
std::complex<double> weighted_dot(std::span<const Scalar> a, std::span<const Scalar> b,
                                  double weight) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if constexpr (std::is_same_v<Scalar, double>) {
            s += a[i] * b[i];
        } else {
            s += std::conj(a[i]) * b[i];
        }
    }
    return s * weight;
}

template <typename Scalar>
double weighted_distance(std::span<const Scalar> a, std::span<const Scalar> b, double weight) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s * weight);
}

}  // namespace detail

/**
 * Builds a non-overlapping symmetry-breaking pair from any normalized,
 * linearly independent A and B = U A.
 *
 *   |+> = (A + B) / sqrt(2 (1 + <A|B>)),  |-> = (A - B) / sqrt(2 (1 - <A|B>))
 *   L = (|+> + |->) / sqrt2,              R = (|+> - |->) / sqrt2
 *
 * For a unitary involution <A|UA> is automatically real. Inner products are
 * weight * sum(conj(a_i) b_i). Throws SymmetryError when A and B are
 * (numerically) collinear, B != U A, or the inputs are not normalized.
 */
template <typename Scalar, typename Involution>
NonoverlappingPair<Scalar> build_nonoverlapping_pair(std::span<const Scalar> a,
                                                     std::span<const Scalar> b,
                                                     const Involution& u, double weight = 1.0,
                                                     double tol = 1e-10) {
    if (a.size() != b.size() || a.empty()) throw DomainError("pair states must have equal, nonzero length");
    const double na = std::sqrt(detail::weighted_dot(a, a, weight).real());
    const double nb = std::sqrt(detail::weighted_dot(b, b, weight).real());
    if (std::abs(na - 1.0) > tol || std::abs(nb - 1.0) > tol) {
        throw SymmetryError("pair states must be normalized");
    }
    const std::vector<Scalar> ua = u.apply(a);
    const double mismatch = detail::weighted_distance<Scalar>(ua, b, weight);
    if (mismatch > tol) {
        throw SymmetryError("B differs from U A by " + std::to_string(mismatch));
    }
    const std::complex<double> ab = detail::weighted_dot(a, b, weight);
    if (std::abs(ab.imag()) > tol) throw SymmetryError("<A|UA> is not real; U is not an involution");
    const double c = ab.real();
    if (std::abs(c) >= 1.0 - tol) throw SymmetryError("A and B are collinear; no pair exists");

    NonoverlappingPair<Scalar> out;
    out.overlap_ab = c;
    const double sp = 1.0 / std::sqrt(2.0 * (1.0 + c));
    const double sm = 1.0 / std::sqrt(2.0 * (1.0 - c));
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::size_t n = a.size();
    out.plus.resize(n);
    out.minus.resize(n);
    out.left.resize(n);
    out.right.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.plus[i] = (a[i] + b[i]) * sp;
        out.minus[i] = (a[i] - b[i]) * sm;
        out.left[i] = (out.plus[i] + out.minus[i]) * r2;
        out.right[i] = (out.plus[i] - out.minus[i]) * r2;
    }
    return out;
}

inline NonoverlappingPair<double> build_nonoverlapping_pair(std::span<const double> a,
                                                            std::span<const double> b,
                                                            const SymmetryOp& u,
                                                            double weight = 1.0,
                                                            double tol = 1e-10) {
    return build_nonoverlapping_pair<double, SymmetryOp>(a, b, u, weight, tol);
}

struct RespectingPair {
    std::vector<double> plus;   // (L + R)/sqrt2
    std::vector<double> minus;  // (L - R)/sqrt2
};

// Throws SymmetryError unless |<L|R>| <= tol.
RespectingPair symmetry_respecting_pair(std::span<const double> left,
                                        std::span<const double> right, double weight = 1.0,
                                        double tol = 1e-10);

struct Projection {
    std::vector<double> psi;
    // True when the right half vanished identically; psi is then the input.
    bool right_half_empty = false;
    // Renormalization factor applied to h(x) psi(x).
    double factor = 1.0;
};

// Keeps the samples with x >= 0 and renormalizes to unit grid norm.
Projection project_right(std::span<const double> psi, const Grid& grid,
                         const BarrierInterval& barrier);

struct SSBVerdict {
    std::size_t ground_multiplicity = 0;
    double ground_energy = 0.0;
    double commutator_norm = 0.0;
    std::optional<NonoverlappingPair<double>> pair;
    double pair_overlap = 0.0;   // |<L|R>|
    double pair_mismatch = 0.0;  // ||U L - R||
    bool broken = false;
    double tol = kDefaultDegeneracyTol;
};

/**
 * Decides whether the ground level breaks symmetry u.
 *
 * Vectors in `spectrum` must live in the same coordinates as `op` and `u`.
 * The ground cluster is found with `tol`; for multiplicity >= 2 the first two
 * cluster vectors v0, v1 are used: A = v0, B = U v0 feed the pair lemma. When
 * v0 happens to be a U eigenvector, A = (v0 + v1')/sqrt2 is used instead, where
 * v1' is v1 orthogonalized against v0; if v1' has the same U eigenvalue the
 * symmetry acts trivially on the level and it is not broken.
 *
 * Throws SymmetryError if [H, U] exceeds tol or U v0 leaves the span of
 * {v0, v1}.
 */
SSBVerdict detect_ssb(const TridiagonalOperator& op, const Spectrum& spectrum,
                      const SymmetryOp& u, double tol = kDefaultDegeneracyTol);

/**
 * Exact block-diagonalization of a parity-symmetric tridiagonal operator on a
 * symmetric grid. Even sector: samples c..n-1 with the center coupling scaled
 * by sqrt2 (psi_c = sqrt2 y_0). Odd sector: samples c+1..n-1 (psi_c = 0).
 */
struct ParitySectors {
    TridiagonalOperator even;
    TridiagonalOperator odd;
    std::size_t center = 0;
    std::size_t n = 0;

    std::vector<double> expand_even(std::span<const double> y) const;
    std::vector<double> expand_odd(std::span<const double> y) const;
};

// Throws DomainError unless op is invariant under sample reversal.
ParitySectors parity_sectors(const TridiagonalOperator& op);

struct ParitySpectra {
    Spectrum even;
    Spectrum odd;
};

// Lowest k_even even and k_odd odd eigenpairs with vectors on the full grid.
ParitySpectra solve_by_parity(const TridiagonalOperator& op, const Grid& grid,
                              std::size_t k_even, std::size_t k_odd);

}  // namespace ssb
