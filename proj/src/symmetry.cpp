#include "ssb/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace ssb {

std::string to_string(SymmetryKind kind) {
    switch (kind) {
        case SymmetryKind::Parity: return "parity";
        case SymmetryKind::Sigma3: return "sigma3";
        case SymmetryKind::Custom: return "custom";
    }
    return "unknown";
}

SymmetryOp SymmetryOp::parity(std::size_t n) {
    SymmetryOp u;
    u.kind_ = SymmetryKind::Parity;
    u.dim_ = n;
    u.perm_.resize(n);
    u.sign_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) u.perm_[i] = n - 1 - i;
    return u;
}

SymmetryOp SymmetryOp::parity(const Grid& grid) {
    if (!grid.symmetric()) throw DomainError("parity needs a symmetric grid");
    return parity(grid.n());
}

SymmetryOp SymmetryOp::sigma3(std::size_t channel_size) {
    SymmetryOp u;
    u.kind_ = SymmetryKind::Sigma3;
    u.dim_ = 2 * channel_size;
    u.perm_.resize(u.dim_);
    u.sign_.resize(u.dim_);
    for (std::size_t i = 0; i < u.dim_; ++i) {
        u.perm_[i] = i;
        u.sign_[i] = (i < channel_size) ? 1.0 : -1.0;
    }
    return u;
}

SymmetryOp SymmetryOp::custom(std::vector<double> matrix, std::size_t dim) {
    if (matrix.size() != dim * dim || dim == 0) throw DomainError("custom symmetry: matrix is not dim x dim");
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            double sq = 0.0;
            double gram = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                sq += matrix[i * dim + k] * matrix[k * dim + j];
                gram += matrix[k * dim + i] * matrix[k * dim + j];
            }
            const double id = (i == j) ? 1.0 : 0.0;
            if (std::abs(sq - id) > 1e-10 || std::abs(gram - id) > 1e-10) {
                throw DomainError("custom symmetry must be an orthogonal involution");
            }
        }
    }
    SymmetryOp u;
    u.kind_ = SymmetryKind::Custom;
    u.dim_ = dim;
    u.matrix_ = std::move(matrix);
    return u;
}

namespace {

template <typename Scalar>
std::vector<Scalar> apply_impl(const SymmetryOp& u, std::span<const Scalar> psi) {
    const std::size_t n = u.dim();
    if (psi.size() != n) throw DomainError("symmetry/vector size mismatch");
    std::vector<Scalar> out(n);
    if (u.is_signed_permutation()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = u.sign(i) * psi[u.source(i)];
    } else {
        const auto& m = u.matrix();
        for (std::size_t i = 0; i < n; ++i) {
            Scalar s{};
            for (std::size_t k = 0; k < n; ++k) s += m[i * n + k] * psi[k];
            out[i] = s;
        }
    }
    return out;
}

}  // namespace

std::vector<double> SymmetryOp::apply(std::span<const double> psi) const {
    return apply_impl(*this, psi);
}

std::vector<std::complex<double>> SymmetryOp::apply(std::span<const std::complex<double>> psi) const {
    return apply_impl(*this, psi);
}

std::vector<double> parity_apply(std::span<const double> psi, const Grid& grid) {
    if (!grid.symmetric()) throw DomainError("parity needs a symmetric grid");
    if (psi.size() != grid.n()) throw DomainError("state does not match grid");
    return std::vector<double>(psi.rbegin(), psi.rend());
}

double commutator_norm(const TridiagonalOperator& op, const SymmetryOp& u) {
    const std::size_t n = op.size();
    if (u.dim() != n) throw DomainError("commutator: operator and symmetry sizes differ");
    auto h_entry = [&](std::size_t i, std::size_t j) -> double {
        if (i == j) return op.diag[i];
        if (i + 1 == j) return op.offdiag[i];
        if (j + 1 == i) return op.offdiag[j];
        return 0.0;
    };
    double worst = 0.0;
    if (u.is_signed_permutation()) {
        std::vector<std::size_t> inverse(n);
        for (std::size_t i = 0; i < n; ++i) inverse[u.source(i)] = i;
        for (std::size_t j = 0; j < n; ++j) {
            std::map<std::size_t, double> col;
            // H U e_j: U e_j = s_q e_q with q = p^{-1}(j).
            const std::size_t q = inverse[j];
            const double sq = u.sign(q);
            for (std::size_t r = (q > 0 ? q - 1 : 0); r <= std::min(q + 1, n - 1); ++r) {
                col[r] += h_entry(r, q) * sq;
            }
            // U H e_j: (U v)_i = s_i v_{p(i)}, v = H e_j supported on j-1..j+1.
            for (std::size_t k = (j > 0 ? j - 1 : 0); k <= std::min(j + 1, n - 1); ++k) {
                const std::size_t i = inverse[k];
                col[i] -= u.sign(i) * h_entry(k, j);
            }
            double s = 0.0;
            for (const auto& [idx, v] : col) s += v * v;
            worst = std::max(worst, std::sqrt(s));
        }
        return worst;
    }
    const auto& m = u.matrix();
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double hu = 0.0;
            double uh = 0.0;
            for (std::size_t k = (i > 0 ? i - 1 : 0); k <= std::min(i + 1, n - 1); ++k) {
                hu += h_entry(i, k) * m[k * n + j];
            }
            for (std::size_t k = (j > 0 ? j - 1 : 0); k <= std::min(j + 1, n - 1); ++k) {
                uh += m[i * n + k] * h_entry(k, j);
            }
            s += (hu - uh) * (hu - uh);
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double commutator_norm(const TridiagonalOperator& op, const SymmetryOp& u, const Grid& grid) {
    if (op.size() != grid.n()) throw DomainError("commutator: operator does not match grid");
    if (u.kind() == SymmetryKind::Parity && !grid.symmetric()) {
        throw DomainError("parity needs a symmetric grid");
    }
    return commutator_norm(op, u);
}

RespectingPair symmetry_respecting_pair(std::span<const double> left,
                                        std::span<const double> right, double weight,
                                        double tol) {
    if (left.size() != right.size()) throw DomainError("pair states must have equal length");
    const double overlap = grid_inner(left, right, weight);
    if (std::abs(overlap) > tol) {
        throw SymmetryError("states overlap (" + std::to_string(overlap) + "); no respecting pair");
    }
    RespectingPair out;
    out.plus.resize(left.size());
    out.minus.resize(left.size());
    const double r2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < left.size(); ++i) {
        out.plus[i] = (left[i] + right[i]) * r2;
        out.minus[i] = (left[i] - right[i]) * r2;
    }
    return out;
}

Projection project_right(std::span<const double> psi, const Grid& grid,
                         const BarrierInterval& barrier) {
    if (!grid.symmetric()) throw DomainError("projection needs a symmetric grid");
    if (psi.size() != grid.n()) throw DomainError("state does not match grid");
    if (!(barrier.hi > 0.0) ||
        std::abs(barrier.lo + barrier.hi) > 1e-12 * std::max(1.0, barrier.hi)) {
        throw DomainError("projection needs a barrier centered at x = 0");
    }
    double right = 0.0;
    double left = 0.0;
    for (std::size_t i = 0; i < grid.n(); ++i) {
        (grid.x(i) >= 0.0 ? right : left) += psi[i] * psi[i];
    }
    Projection out;
    if (right == 0.0) {
        if (left == 0.0) throw DomainError("cannot project a zero state");
        out.psi.assign(psi.begin(), psi.end());
        out.right_half_empty = true;
        return out;
    }
    out.factor = 1.0 / std::sqrt(right * grid.h());
    out.psi.assign(grid.n(), 0.0);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        if (grid.x(i) >= 0.0) out.psi[i] = out.factor * psi[i];
    }
    return out;
}

SSBVerdict detect_ssb(const TridiagonalOperator& op, const Spectrum& spectrum,
                      const SymmetryOp& u, double tol) {
    if (spectrum.size() < 2) throw DomainError("SSB detection needs at least two levels");
    SSBVerdict v;
    v.tol = tol;
    v.commutator_norm = commutator_norm(op, u);
    if (v.commutator_norm > tol) {
        throw SymmetryError("operator does not commute with " + to_string(u.kind()) +
                            " (||[H,U]|| = " + std::to_string(v.commutator_norm) + ")");
    }
    const auto rep = cluster_degeneracies(spectrum.levels, tol);
    const auto& ground = rep.clusters.front();
    v.ground_multiplicity = ground.multiplicity;
    v.ground_energy = ground.mean;
    if (ground.multiplicity < 2) return v;

    const double w = spectrum.spacing;
    const auto& v0 = spectrum.vectors[ground.members[0]];
    std::vector<double> v1 = spectrum.vectors[ground.members[1]];
    const double c01 = grid_inner(v0, v1, w);
    for (std::size_t i = 0; i < v1.size(); ++i) v1[i] -= c01 * v0[i];
    const double n1 = grid_norm(v1, w);
    for (double& x : v1) x /= n1;

    const auto uv0 = u.apply(v0);
    const double c0 = grid_inner(v0, uv0, w);
    const double c1 = grid_inner(v1, uv0, w);
    std::vector<double> outside(uv0);
    for (std::size_t i = 0; i < outside.size(); ++i) outside[i] -= c0 * v0[i] + c1 * v1[i];
    if (grid_norm(outside, w) > tol) {
        throw SymmetryError("U maps the ground eigenspace outside itself; no verdict");
    }

    std::vector<double> a;
    if (std::abs(c0) < 1.0 - 1e-10) {
        a = v0;
    } else {
        const double s1 = grid_inner(v1, u.apply(v1), w);
        if (s1 * c0 > 0.0) return v;  // U acts as +-1 on the whole level
        a.resize(v0.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = (v0[i] + v1[i]) / std::numbers::sqrt2;
    }
    const auto b = u.apply(a);
    auto pair = build_nonoverlapping_pair(a, b, u, w, std::max(tol, 1e-10));
    v.pair_overlap = std::abs(grid_inner(pair.left, pair.right, w));
    v.pair_mismatch = detail::weighted_distance<double>(u.apply(pair.left), pair.right, w);
    v.broken = v.pair_overlap <= tol && v.pair_mismatch <= tol;
    v.pair = std::move(pair);
    return v;
}

ParitySectors parity_sectors(const TridiagonalOperator& op) {
    const std::size_t n = op.size();
    if (n < 3 || n % 2 == 0) throw DomainError("parity sectors need an odd number of samples");
    for (std::size_t i = 0; i < n; ++i) {
        const double a = op.diag[i];
        const double b = op.diag[n - 1 - i];
        if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
            throw DomainError("operator is not parity symmetric");
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = op.offdiag[i];
        const double b = op.offdiag[n - 2 - i];
        if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
            throw DomainError("operator is not parity symmetric");
        }
    }
    ParitySectors s;
    s.n = n;
    s.center = n / 2;
    const auto c = static_cast<std::ptrdiff_t>(s.center);
    s.even.diag.assign(op.diag.begin() + c, op.diag.end());
    s.even.offdiag.assign(op.offdiag.begin() + c, op.offdiag.end());
    s.even.offdiag.front() *= std::numbers::sqrt2;
    s.odd.diag.assign(op.diag.begin() + c + 1, op.diag.end());
    s.odd.offdiag.assign(op.offdiag.begin() + c + 1, op.offdiag.end());
    return s;
}

std::vector<double> ParitySectors::expand_even(std::span<const double> y) const {
    if (y.size() != even.size()) throw DomainError("even sector vector has wrong length");
    std::vector<double> psi(n);
    psi[center] = y[0];
    for (std::size_t j = 1; j < y.size(); ++j) {
        psi[center + j] = y[j] / std::numbers::sqrt2;
        psi[center - j] = y[j] / std::numbers::sqrt2;
    }
    return psi;
}

std::vector<double> ParitySectors::expand_odd(std::span<const double> y) const {
    if (y.size() != odd.size()) throw DomainError("odd sector vector has wrong length");
    std::vector<double> psi(n, 0.0);
    for (std::size_t j = 0; j < y.size(); ++j) {
        psi[center + 1 + j] = y[j] / std::numbers::sqrt2;
        psi[center - 1 - j] = -y[j] / std::numbers::sqrt2;
    }
    return psi;
}

namespace {

void finish_full(Spectrum& s, const TridiagonalOperator& op, const Grid& grid) {
    s.grid = grid;
    s.residuals.clear();
    for (std::size_t j = 0; j < s.size(); ++j) {
        auto& psi = s.vectors[j];
        for (double x : psi) {
            if (std::abs(x) > 1e-12) {
                if (x < 0.0) {
                    for (double& y : psi) y = -y;
                }
                break;
            }
        }
        s.residuals.push_back(residual_norm(op, psi, s.levels[j], grid.h()));
    }
    s.tolerance *= 2.0;
}

}  // namespace

ParitySpectra solve_by_parity(const TridiagonalOperator& op, const Grid& grid,
                              std::size_t k_even, std::size_t k_odd) {
    if (!grid.symmetric()) throw DomainError("parity-resolved solve needs a symmetric grid");
    if (op.size() != grid.n()) throw DomainError("operator size does not match grid");
    const auto sectors = parity_sectors(op);
    ParitySpectra out;
    if (k_even > 0) {
        out.even = eigensolve(sectors.even, k_even, grid.h());
        for (auto& y : out.even.vectors) y = sectors.expand_even(y);
        finish_full(out.even, op, grid);
    }
    if (k_odd > 0) {
        out.odd = eigensolve(sectors.odd, k_odd, grid.h());
        for (auto& y : out.odd.vectors) y = sectors.expand_odd(y);
        finish_full(out.odd, op, grid);
    }
    return out;
}

}  // namespace ssb
