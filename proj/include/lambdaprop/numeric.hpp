#pragma once

// Co-propagation of the field envelopes and the atomic amplitudes in running
// coordinates (η, τ):
//
//     ∂_η Ω_p = i q a1* a2,   ∂_η Ω_s = i q a3* a2,   i ∂_τ φ = H φ.
//
// τ is integrated slice by slice from the |1> initial state, η is marched with
// a Heun predictor-corrector.

#include <cstddef>
#include <span>
#include <vector>

#include "lambdaprop/core.hpp"
#include "lambdaprop/dressed.hpp"

namespace lambdaprop {

enum class TauScheme {
    /// Fourth-order commutator-free Magnus with closed-form 3x3 exponentials.
    /// Norm-preserving for Γ = 0 at any step size.
    magnus4,
    /// Classical RK4 with midpoint fields from cubic interpolation of the samples.
    rk4,
};

/// Norm drift (Γ = 0) beyond which a τ solve is rejected as under-resolved.
inline constexpr double kNormDriftLimit = 1e-4;

struct SolveOptions {
    double delta = 0.0;
    double gamma = 0.0;
    TauScheme scheme = TauScheme::magnus4;
};

/// Amplitudes at every τ node. `tau` must be uniform; fields are sampled on it.
/// Throws step_unstable on non-finite amplitudes or (Γ = 0) norm drift above kNormDriftLimit.
std::vector<AtomicState> integrate_schrodinger(std::span<const double> tau, std::span<const cplx> pump,
                                               std::span<const cplx> stokes, const SolveOptions& options,
                                               AtomicState initial = {});

/// Complex pump/Stokes envelopes over the (η, τ) grid, η-major.
class FieldGrid {
public:
    FieldGrid() = default;
    FieldGrid(std::vector<double> eta, std::vector<double> tau);

    [[nodiscard]] std::size_t n_eta() const { return eta_.size(); }
    [[nodiscard]] std::size_t n_tau() const { return tau_.size(); }
    [[nodiscard]] const std::vector<double>& eta() const { return eta_; }
    [[nodiscard]] const std::vector<double>& tau() const { return tau_; }

    cplx& pump(std::size_t n, std::size_t j) { return pump_[n * n_tau() + j]; }
    cplx& stokes(std::size_t n, std::size_t j) { return stokes_[n * n_tau() + j]; }
    [[nodiscard]] cplx pump(std::size_t n, std::size_t j) const { return pump_[n * n_tau() + j]; }
    [[nodiscard]] cplx stokes(std::size_t n, std::size_t j) const { return stokes_[n * n_tau() + j]; }

    [[nodiscard]] std::span<const cplx> pump_slice(std::size_t n) const { return {pump_.data() + n * n_tau(), n_tau()}; }
    [[nodiscard]] std::span<const cplx> stokes_slice(std::size_t n) const { return {stokes_.data() + n * n_tau(), n_tau()}; }
    std::span<cplx> pump_slice(std::size_t n) { return {pump_.data() + n * n_tau(), n_tau()}; }
    std::span<cplx> stokes_slice(std::size_t n) { return {stokes_.data() + n * n_tau(), n_tau()}; }

private:
    std::vector<double> eta_;
    std::vector<double> tau_;
    std::vector<cplx> pump_;
    std::vector<cplx> stokes_;
};

class StateGrid {
public:
    StateGrid() = default;
    StateGrid(std::size_t n_eta, std::size_t n_tau) : n_tau_(n_tau), states_(n_eta * n_tau) {}

    [[nodiscard]] std::size_t n_eta() const { return n_tau_ == 0 ? 0 : states_.size() / n_tau_; }
    [[nodiscard]] std::size_t n_tau() const { return n_tau_; }
    AtomicState& at(std::size_t n, std::size_t j) { return states_[n * n_tau_ + j]; }
    [[nodiscard]] const AtomicState& at(std::size_t n, std::size_t j) const { return states_[n * n_tau_ + j]; }
    [[nodiscard]] std::span<const AtomicState> slice(std::size_t n) const { return {states_.data() + n * n_tau_, n_tau_}; }
    std::span<AtomicState> slice(std::size_t n) { return {states_.data() + n * n_tau_, n_tau_}; }

private:
    std::size_t n_tau_ = 0;
    std::vector<AtomicState> states_;
};

struct SliceFields {
    std::vector<cplx> pump;
    std::vector<cplx> stokes;
};

/// ∂_η of both fields at each τ node: i q a1* a2 and i q a3* a2.
SliceFields maxwell_rhs(std::span<const AtomicState> states);

/// One Heun step in η. `states` must solve the Schrödinger equation for `fields`.
SliceFields step_fields(std::span<const double> tau, const SliceFields& fields,
                        std::span<const AtomicState> states, double d_eta, const SolveOptions& options);

struct Propagation {
    SimulationConfig config;
    FieldGrid fields;
    StateGrid states;
};

Propagation propagate(const SimulationConfig& config, TauScheme scheme = TauScheme::magnus4);
Propagation propagate(const SimulationConfig& config, const PulseEnvelope& pump, const PulseEnvelope& stokes,
                      TauScheme scheme = TauScheme::magnus4);

/// Centered-difference residuals of the local conservation laws on interior
/// nodes (1 ≤ n ≤ N−2, 1 ≤ j ≤ M−2), η-major with stride n_tau − 2:
///   pump:  ∂_η|Ω_p|² − q ∂_τ|a1|²
///   stokes: ∂_η|Ω_s|² − q ∂_τ|a3|²
///   total: ∂_η Ω² + q ∂_τ|a2|²
/// Needs at least three η slices; otherwise the arrays are empty.
struct ConservationResiduals {
    std::vector<double> pump;
    std::vector<double> stokes;
    std::vector<double> total;
    double max_abs = 0.0;             ///< over all three
    double max_d_eta_omega_sq = 0.0;  ///< scale: max |∂_η Ω²|
};

ConservationResiduals conservation_residuals(const FieldGrid& fields, const StateGrid& states);

}  // namespace lambdaprop
