#include "ssb/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ssb/errors.hpp"

namespace ssb {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxInverseIterations = 12;

struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past last
    TridiagonalOperator op;
};

// Splits at negligible couplings, |e_i|^2 <= eps^2 |d_i d_{i+1}|.
std::vector<Block> unreduced_blocks(const TridiagonalOperator& op) {
    std::vector<Block> blocks;
    const std::size_t n = op.size();
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 <= n; ++i) {
        const bool last = (i + 1 == n);
        bool split = last;
        if (!last) {
            const double e = op.offdiag[i];
            split = e * e <= kEps * kEps * std::abs(op.diag[i] * op.diag[i + 1]) ||
                    e == 0.0;
        }
        if (split) {
            Block b;
            b.begin = start;
            b.end = i + 1;
            b.op.diag.assign(op.diag.begin() + static_cast<std::ptrdiff_t>(start),
                             op.diag.begin() + static_cast<std::ptrdiff_t>(i + 1));
            b.op.offdiag.assign(op.offdiag.begin() + static_cast<std::ptrdiff_t>(start),
                                op.offdiag.begin() + static_cast<std::ptrdiff_t>(i));
            blocks.push_back(std::move(b));
            start = i + 1;
        }
    }
    return blocks;
}

double pivot_floor(const TridiagonalOperator& op) {
    double emax = 1.0;
    for (double e : op.offdiag) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax;
}

std::size_t sturm_count(const TridiagonalOperator& op, double x, double pivmin) {
    std::size_t count = 0;
    double q = op.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < op.size(); ++i) {
        const double e = op.offdiag[i - 1];
        q = op.diag[i] - x - e * e / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

Interval gershgorin(const TridiagonalOperator& op) {
    const std::size_t n = op.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(op.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(op.offdiag[i]);
        lo = std::min(lo, op.diag[i] - r);
        hi = std::max(hi, op.diag[i] + r);
    }
    const double pad = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) * static_cast<double>(n) +
                       std::numeric_limits<double>::min();
    return {lo - pad, hi + pad};
}

// j-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double bisect_eigenvalue(const TridiagonalOperator& op, std::size_t j, Interval bounds,
                         double pivmin) {
    double lo = bounds.lo;
    double hi = bounds.hi;
    for (int it = 0; it < 4000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(op, mid, pivmin) > j) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> block_eigenvalues(const TridiagonalOperator& op, std::size_t k) {
    const double pivmin = pivot_floor(op);
    const Interval bounds = gershgorin(op);
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = bisect_eigenvalue(op, j, bounds, pivmin);
    std::sort(out.begin(), out.end());
    return out;
}

// LU factorization with partial pivoting of (T - shift I), LAPACK dgttrf
// layout: dl multipliers, d / du / du2 the three bands of U.
struct PivotedLU {
    std::vector<double> dl, d, du, du2;
    std::vector<unsigned char> swapped;

    PivotedLU(const TridiagonalOperator& op, double shift, double pivmin) {
        const std::size_t n = op.size();
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = op.diag[i] - shift;
        dl = op.offdiag;
        du = op.offdiag;
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        swapped.assign(n > 1 ? n - 1 : 0, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                const double fact = (d[i] == 0.0) ? 0.0 : dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
        for (double& p : d) {
            if (std::abs(p) < pivmin) p = std::copysign(pivmin, p == 0.0 ? 1.0 : p);
        }
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t i = n; i-- > 2;) {
            const std::size_t r = i - 2;
            b[r] = (b[r] - du[r] * b[r + 1] - du2[r] * b[r + 2]) / d[r];
        }
    }
};

double unit_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double plain_residual(const TridiagonalOperator& op, const std::vector<double>& v, double e) {
    const std::size_t n = op.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (op.diag[i] - e) * v[i];
        if (i > 0) r += op.offdiag[i - 1] * v[i - 1];
        if (i + 1 < n) r += op.offdiag[i] * v[i + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& against) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : against) {
            double dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += u[i] * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
        }
    }
}

double residual_bound(const TridiagonalOperator& op) {
    const double n = static_cast<double>(std::max<std::size_t>(op.size(), 1));
    return 16.0 * std::sqrt(n) * kEps * std::max(op.norm(), std::numeric_limits<double>::min());
}

// Unit-norm eigenvectors of one unreduced block for the given ascending
// eigenvalues. Members of a numerical cluster are kept mutually orthogonal.
std::vector<std::vector<double>> block_vectors(const TridiagonalOperator& op,
                                               std::span<const double> values) {
    const std::size_t n = op.size();
    std::vector<std::vector<double>> vecs;
    if (n == 1) {
        vecs.assign(values.size(), std::vector<double>{1.0});
        return vecs;
    }
    const double tnorm = std::max(op.norm(), std::numeric_limits<double>::min());
    const double cluster_gap = 1e-3 * tnorm;
    const double perturb = 10.0 * kEps * tnorm;
    const double pivmin = kEps * tnorm;
    const double tol = residual_bound(op);

    std::vector<std::vector<double>> cluster;
    double prev_shift = -std::numeric_limits<double>::infinity();
    double prev_value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < values.size(); ++j) {
        double shift = values[j];
        if (j == 0 || values[j] - prev_value > cluster_gap) {
            cluster.clear();
        } else if (shift - prev_shift < perturb) {
            shift = prev_shift + perturb;
        }
        PivotedLU lu(op, shift, pivmin);

        std::mt19937_64 rng(0x5eed0000ULL + j);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> v(n);
        for (double& x : v) x = dist(rng);
        orthogonalize(v, cluster);
        double nv = unit_norm(v);
        for (double& x : v) x /= nv;

        bool converged = false;
        int extra = 0;
        for (int it = 0; it < kMaxInverseIterations; ++it) {
            lu.solve(v);
            orthogonalize(v, cluster);
            nv = unit_norm(v);
            if (!(nv > 0.0) || !std::isfinite(nv)) {
                throw SolverError("inverse iteration broke down for eigenvalue " +
                                  std::to_string(values[j]));
            }
            for (double& x : v) x /= nv;
            if (converged) {
                if (++extra >= 1) break;
                continue;
            }
            if (plain_residual(op, v, values[j]) <= tol) converged = true;
        }
        if (!converged) {
            throw SolverError("inverse iteration did not converge for eigenvalue " +
                              std::to_string(values[j]) + " within " +
                              std::to_string(kMaxInverseIterations) + " iterations");
        }
        cluster.push_back(v);
        vecs.push_back(std::move(v));
        prev_shift = shift;
        prev_value = values[j];
    }
    return vecs;
}

Spectrum solve(const TridiagonalOperator& op, std::size_t k, double spacing) {
    const std::size_t n = op.size();
    if (n == 0 || op.offdiag.size() + 1 != n) throw DomainError("malformed tridiagonal operator");
    if (k < 1 || k > n) {
        throw DomainError("eigensolve needs 1 <= k <= n (k = " + std::to_string(k) +
                          ", n = " + std::to_string(n) + ")");
    }
    if (!(spacing > 0.0)) throw DomainError("spacing must be positive");
    for (double d : op.diag) {
        if (!std::isfinite(d)) throw DomainError("operator has non-finite entries");
    }

    struct Candidate {
        double value;
        std::size_t block;
    };
    const auto blocks = unreduced_blocks(op);
    std::vector<std::vector<double>> block_values(blocks.size());
    std::vector<Candidate> all;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        block_values[b] = block_eigenvalues(blocks[b].op, std::min(k, blocks[b].op.size()));
        for (double v : block_values[b]) all.push_back({v, b});
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) {
        if (x.value != y.value) return x.value < y.value;
        return x.block < y.block;
    });
    all.resize(k);

    // Vectors per block, for the eigenvalues of that block that were selected.
    std::vector<std::size_t> used(blocks.size(), 0);
    for (const auto& c : all) ++used[c.block];
    std::vector<std::vector<std::vector<double>>> block_vecs(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (used[b] == 0) continue;
        block_vecs[b] = block_vectors(
            blocks[b].op, std::span<const double>(block_values[b].data(), used[b]));
    }

    Spectrum s;
    s.spacing = spacing;
    s.tolerance = residual_bound(op);
    std::fill(used.begin(), used.end(), 0);
    const double scale = 1.0 / std::sqrt(spacing);
    for (const auto& c : all) {
        const Block& blk = blocks[c.block];
        const auto& local = block_vecs[c.block][used[c.block]++];
        std::vector<double> v(n, 0.0);
        for (std::size_t i = 0; i < local.size(); ++i) v[blk.begin + i] = local[i] * scale;
        for (double x : v) {
            if (std::abs(x) > 1e-12) {
                if (x < 0.0) {
                    for (double& y : v) y = -y;
                }
                break;
            }
        }
        s.levels.push_back(c.value);
        s.residuals.push_back(residual_norm(op, v, c.value, spacing));
        s.vectors.push_back(std::move(v));
    }
    return s;
}

}  // namespace

Spectrum eigensolve(const TridiagonalOperator& op, std::size_t k, const Grid& grid) {
    if (op.size() != grid.n()) throw DomainError("operator size does not match grid");
    Spectrum s = solve(op, k, grid.h());
    s.grid = grid;
    return s;
}

Spectrum eigensolve(const TridiagonalOperator& op, std::size_t k, double spacing) {
    return solve(op, k, spacing);
}

std::vector<double> lowest_eigenvalues(const TridiagonalOperator& op, std::size_t k) {
    if (k < 1 || k > op.size()) throw DomainError("lowest_eigenvalues needs 1 <= k <= n");
    return block_eigenvalues(op, k);
}

std::size_t count_below(const TridiagonalOperator& op, double x) {
    if (op.size() == 0) return 0;
    return sturm_count(op, x, pivot_floor(op));
}

DegeneracyReport cluster_degeneracies(std::span<const double> levels, double tol) {
    if (!(tol > 0.0)) throw DomainError("degeneracy tolerance must be positive");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] < levels[i - 1]) throw DomainError("levels must be sorted ascending");
    }
    DegeneracyReport rep;
    rep.tol = tol;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i == 0 || levels[i] - levels[i - 1] > tol) rep.clusters.emplace_back();
        rep.clusters.back().members.push_back(i);
    }
    for (auto& c : rep.clusters) {
        double sum = 0.0;
        for (auto m : c.members) sum += levels[m];
        c.multiplicity = c.members.size();
        c.mean = sum / static_cast<double>(c.multiplicity);
        c.spread = levels[c.members.back()] - levels[c.members.front()];
    }
    return rep;
}

double residual_norm(const TridiagonalOperator& op, std::span<const double> psi, double e,
                     double spacing) {
    if (psi.size() != op.size()) {
        throw DomainError("residual_norm: vector has " + std::to_string(psi.size()) +
                          " samples, operator has " + std::to_string(op.size()));
    }
    const auto hpsi = op.apply(psi);
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double r = hpsi[i] - e * psi[i];
        s += r * r;
    }
    return std::sqrt(s * spacing);
}

}  // namespace ssb
