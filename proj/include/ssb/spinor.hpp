#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssb/eigen.hpp"
#include "ssb/lattice.hpp"

namespace ssb {

enum class Channel { Plus, Minus };

std::string to_string(Channel c);

/**
 * Two energy-displaced harmonic oscillators acting on the two components of a
 * spinor:
 *   H_+- = p^2/2m + m w_+-^2 x^2 / 2 - hbar w_+- / 2
 * so both channel ground energies are exactly zero.
 */
struct SpinorModel {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
    double ratio = 0.0;  // omega_plus / omega_minus
    // Set when the ratio lies within 1e-9 of p/q with p, q <= 64.
    std::optional<std::pair<int, int>> commensurate_with;

    bool commensurate() const { return commensurate_with.has_value(); }
};

SpinorModel build_spinor_model(double omega_plus, double omega_minus, double mass = 1.0,
                               double hbar = 1.0);

// Best rational approximation p/q of r with 1 <= p, q <= max_term, or nullopt
// if none lies within tol.
std::optional<std::pair<int, int>> nearby_rational(double r, int max_term = 64, double tol = 1e-9);

struct SpinorLevel {
    int n = 0;
    Channel channel = Channel::Plus;
    double energy = 0.0;
};

// Merged ladders E = hbar n w_+- for n = 0..nmax, ascending; ties list the
// plus channel first.
std::vector<SpinorLevel> analytic_spectrum(const SpinorModel& model, int nmax);

// Normalized n-th eigenfunction of p^2/2m + m w^2 x^2/2 (Hermite function).
double oscillator_eigenfunction(int n, double mass, double omega, double hbar, double x);

struct SpinorState {
    std::vector<double> up;
    std::vector<double> down;

    // Stacked (up, down) layout used by the two-channel operators.
    std::vector<double> stacked() const;
    static SpinorState from_stacked(std::span<const double> v);
};

struct GroundPair {
    SpinorState right;  // (psi_+0, psi_-0)/sqrt2
    SpinorState left;   // sigma3 right = (psi_+0, -psi_-0)/sqrt2
};

// Closed-form channel ground states, each renormalized on the grid. Throws
// DomainError if a channel's closed-form grid norm is off by more than 1e-8
// (grid does not resolve it).
GroundPair ground_pair(const SpinorModel& model, const Grid& grid);

/// Hamiltonian on stacked spinors: diag(upper, lower) plus an optional local
/// coupling c(x) between the channels (zero for the physical model).
struct TwoChannelOperator {
    TridiagonalOperator upper;
    TridiagonalOperator lower;
    std::vector<double> coupling;

    std::size_t channel_size() const { return upper.size(); }
    std::vector<double> apply(std::span<const double> stacked) const;
    bool block_diagonal() const;
    // Direct sum of the channels; throws DomainError if coupling is nonzero.
    TridiagonalOperator stacked() const;
};

TwoChannelOperator assemble_spinor_hamiltonian(const SpinorModel& model, const Grid& grid);

// max over basis probes of ||[sigma3, H] e_j||, cross-checked with a few
// deterministic random probes.
double sigma3_commutator_norm(const TwoChannelOperator& op);
double sigma3_commutator_check(const SpinorModel& model, const Grid& grid);

// Lowest k levels of the discretized two-channel Hamiltonian (stacked layout).
Spectrum spinor_fd_spectrum(const SpinorModel& model, const Grid& grid, std::size_t k);

// Channel holding most of the weight of a stacked state.
Channel dominant_channel(std::span<const double> stacked);

/**
 * Magnetostatic form H = H_0 * 1 - (hbar/2) B_z(x) sigma_3 with
 *   H_0 = p^2/2m + m w_0^2 x^2/2 - eps_0,
 *   B_z = -(2/hbar) (m w_D^2 x^2/2 - eps_D).
 * w_D^2 is stored signed, so w_+ < w_- needs no special casing.
 */
struct FieldForm {
    double omega0 = 0.0;
    double omega_delta_sq = 0.0;
    double epsilon0 = 0.0;
    double epsilon_delta = 0.0;
    double mass = 1.0;
    double hbar = 1.0;

    double bz(double x) const;
};

FieldForm to_field_form(const SpinorModel& model);

TwoChannelOperator assemble_from_field_form(const FieldForm& form, const Grid& grid);

}  // namespace ssb
