#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ssb/lattice.hpp"

namespace ssb {

enum class ModelKind {
    QuarticSombrero,
    SexticFactorized,
    DoubleOscillator,
    SquareDoubleWell,
    DoubleInfiniteWell,
};

std::string to_string(ModelKind kind);

// V = lambda x^4 - mu x^2
struct QuarticParams {
    double lambda = 1.0;
    double mu = 1.0;
};

// V = hbar^2/(2m) (16 a^2 x^6 - 12 a x^2); `a_sextic` is the width parameter
// of the exact ground state exp(-a x^4).
struct SexticParams {
    double a_sextic = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
};

// V = m omega^2 (|x| - a)^2
struct DoubleOscillatorParams {
    double mass = 1.0;
    double omega = 1.0;
    double a = 0.0;
    double hbar = 1.0;
};

// Walls at |x| >= a, barrier of height alpha on |x| <= b, zero in between.
struct SquareWellParams {
    double alpha = 50.0;
    double a = 2.0;
    double b = 0.5;
};

// Walls at |x| >= a and on |x| <= b.
struct InfiniteWellParams {
    double a = 2.0;
    double b = 0.5;
    double mass = 1.0;
    double hbar = 1.0;
};

using ModelParams = std::variant<QuarticParams, SexticParams, DoubleOscillatorParams,
                                 SquareWellParams, InfiniteWellParams>;

struct AnalyticOracle {
    std::optional<double> ground_energy;
    // Normalized ground state; empty when no closed form exists.
    std::function<double(double)> ground_function;
    // Level n >= 1 energy; empty when no closed form exists.
    std::function<double(int)> level_formula;
    // Multiplicity every level_formula entry carries.
    int level_multiplicity = 1;
};

/**
 * A potential from the model zoo. Evaluation returns +infinity inside
 * impenetrable regions; solvers never see those values because the domain is
 * truncated there first (Grid::interior, split_domain).
 */
class PotentialModel {
public:
    PotentialModel(ModelKind kind, ModelParams params, Interval domain_hint,
                   std::optional<BarrierInterval> barrier, std::optional<AnalyticOracle> analytic);

    ModelKind kind() const { return kind_; }
    const ModelParams& params() const { return params_; }
    Interval domain_hint() const { return domain_hint_; }
    const std::optional<BarrierInterval>& barrier() const { return barrier_; }
    const std::optional<AnalyticOracle>& analytic() const { return analytic_; }

    double operator()(double x) const;

    // Finite-difference sampling: identical to pointwise evaluation except
    // that a sample sitting exactly on a finite jump takes the mean of the
    // two one-sided limits.
    std::vector<double> sample(const Grid& grid) const;

private:
    ModelKind kind_;
    ModelParams params_;
    Interval domain_hint_;
    std::optional<BarrierInterval> barrier_;
    std::optional<AnalyticOracle> analytic_;
};

PotentialModel quartic_sombrero(double lambda, double mu);
PotentialModel sextic_factorized(double a_sextic, double mass = 1.0, double hbar = 1.0);
PotentialModel double_oscillator(double mass, double omega, double a, double hbar = 1.0);
PotentialModel square_double_well(double alpha, double a, double b);
PotentialModel double_infinite_well(double a, double b, double mass = 1.0, double hbar = 1.0);

// Unnormalized exact sextic ground state exp(-a x^4) and its L2 norm over the
// whole line.
double sextic_ground_unnormalized(double a_sextic, double x);
double sextic_ground_norm(double a_sextic);

struct AnnihilatorCheck {
    double residual = 0.0;  // grid norm of (f' + 4 a x^3 f), f normalized
    double bound = 0.0;     // leading truncation estimate (h^2/6) ||f'''||
};

// Applies the first-order operator that annihilates exp(-a x^4) using centered
// differences at interior samples. Throws SolverError when the residual
// exceeds twice its O(h^2) estimate (grid too coarse to trust), DomainError if
// the grid is not symmetric or does not contain the decay of f to 1e-12.
AnnihilatorCheck annihilator_residual(double a_sextic, const Grid& grid);

enum class WellSide { Left, Right };

// Closed-form eigenfunction of level n in one well of the double infinite
// well, sampled on the grid and renormalized there. The right function is
// the exact mirror image of the left one, psi_R(x) = psi_L(-x).
std::vector<double> uinf_eigenfunction(int n, WellSide side, double a, double b,
                                       const Grid& grid);

}  // namespace ssb
