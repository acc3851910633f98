#pragma once

// First-order (superadiabatic) solution of the angle propagation equations
//
//     ∂_η ψ + (q/Δ²) cos³2ψ ∂_τ ψ = 0,
//     ∂_η θ − (q/Ω²) cos²ψ ∂_τ θ = 0,   (same for the relative phase φ)
//
// by characteristics: ψ(η,τ) = ψ0(ζ), θ(η,τ) = θ0(ξ), φ(η,τ) = φ0(ξ) with
//
//     ζ = τ − η (q/Δ²) cos³2ψ0(ζ),
//     ∫_ζ^ξ Ω0²(t) dt = q η cos⁴ψ0(ζ) (2 − cos2ψ0(ζ)).
//
// Only Δ > 0 is supported; Δ < 0 maps onto it by ψ -> π/2 − ψ with |b2> taking
// the role of |b1>.

#include <functional>
#include <optional>

#include "lambdaprop/core.hpp"
#include "lambdaprop/dressed.hpp"

namespace lambdaprop {

/// Compression denominator 1 − (6qη/Δ²) ψ0' cos²2ψ0 sin2ψ0 below this is a near-shock warning.
inline constexpr double kShockWarning = 0.05;

/// Boundary data at η = 0 built from the entrance envelopes.
class EntranceProfile {
public:
    /// Throws invalid_config unless delta > 0.
    EntranceProfile(PulseEnvelope pump, PulseEnvelope stokes, double delta);
    static EntranceProfile from_config(const SimulationConfig& config);

    [[nodiscard]] double delta() const { return delta_; }
    [[nodiscard]] const PulseEnvelope& pump() const { return pump_; }
    [[nodiscard]] const PulseEnvelope& stokes() const { return stokes_; }

    [[nodiscard]] double omega_sq(double t) const;
    [[nodiscard]] double omega(double t) const;
    [[nodiscard]] double d_omega(double t) const;
    [[nodiscard]] double psi(double t) const;
    [[nodiscard]] double d_psi(double t) const;
    /// θ0(t). Where both fields vanish the limit value is used: the Gaussian
    /// amplitude ratio for Gaussian pairs, otherwise the nearest earlier
    /// non-degenerate value.
    [[nodiscard]] double theta(double t) const;
    [[nodiscard]] double phase_p(double t) const;
    [[nodiscard]] double phase_s(double t) const;
    /// φ0(t) = arg Ω_p − arg Ω_s.
    [[nodiscard]] double phi(double t) const;

    /// ∫_a^b Ω0² dt, accurate in both tails.
    [[nodiscard]] double energy_between(double a, double b) const;
    [[nodiscard]] double energy_before(double t) const;
    [[nodiscard]] double energy_after(double t) const;
    [[nodiscard]] double total_energy() const;

    /// Interval outside which Ω0² is negligible (below 1e-300 or outside the samples).
    [[nodiscard]] std::pair<double, double> support() const;
    /// Largest of the two pulse peaks.
    [[nodiscard]] double peak_rabi() const;

private:
    [[nodiscard]] double pulse_energy_between(const PulseEnvelope& env, double a, double b) const;

    PulseEnvelope pump_;
    PulseEnvelope stokes_;
    double delta_;
};

struct ZetaSolution {
    double zeta = 0.0;
    /// 1 − (6qη/Δ²) ψ0'(ζ) cos²2ψ0 sin2ψ0 = 1/(∂ζ/∂τ).
    double denominator = 1.0;
    bool near_shock = false;  ///< denominator < kShockWarning
};

/// Throws shock_detected when the implicit equation has several roots on its
/// bracket or the denominator at the root is ≤ 0.
ZetaSolution solve_zeta(double eta, double tau, const EntranceProfile& profile);

/// Throws adiabaticity_horizon when the remaining energy after ζ cannot cover
/// the right-hand side.
double solve_xi(double eta, double zeta, const EntranceProfile& profile);

struct CharacteristicPoint {
    double eta = 0.0;
    double tau = 0.0;
    double zeta = 0.0;
    double xi = 0.0;
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    cplx omega_p;
    cplx omega_s;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;
    bool near_shock = false;
};

/// Populations are those of pure |b1> following:
/// p1 = cos²ψ sin²θ, p2 = sin²ψ, p3 = cos²ψ cos²θ.
CharacteristicPoint analytic_point(double eta, double tau, const EntranceProfile& profile);

struct StretchFactors {
    double dzeta_dtau = 1.0;
    double dxi_dtau = 1.0;
    /// Ω0²(ζ)/Ω0²(ξ): amplification of the θ and φ nonadiabatic coupling.
    double scale = 1.0;
};

StretchFactors stretch_factors(double eta, double tau, const EntranceProfile& profile);

/// Propagation-length and time limits of the first-order solution at η = length.
/// The energy and time limits are order-of-magnitude estimates with unit constant.
struct LimitsReport {
    double eta_max = 0.0;                  ///< ∫Ω0² / q
    std::optional<double> tau_max;         ///< ∫_{τmax}^∞ Ω0² = q·length; empty if unbounded (length 0) or no solution
    bool tau_max_unbounded = false;        ///< length == 0
    double tau_delay_medium = 0.0;         ///< (qL/Δ²) cos³2ψ0 at the peak ψ0
    double tau_delay_small_angle = 0.0;    ///< qL/Δ²
    double shock_ratio = 0.0;              ///< max 6ψ0 tan2ψ0 (qL/Δ²) cos³2ψ0 / T
    double shock_ratio_small_angle = 0.0;  ///< 12 qTL (Ω_max/Δ)² / (ΔT)²
    double reshaping_ratio = 0.0;          ///< qTL / (Ω_max T)²
    /// Single-atom conditions at the pulse peak Ω_max.
    double abs_delta_t = 0.0;
    double stark_ratio = 0.0;
    double loss_ratio = 0.0;
    double loss_ratio_small_angle = 0.0;
};

LimitsReport limits(const SimulationConfig& config, const EntranceProfile& profile);
LimitsReport limits(const SimulationConfig& config);

/// τ at which ∫_τ^∞ Ω0² = q η, or empty when η ≥ η_max.
std::optional<double> tau_max_at(double eta, const EntranceProfile& profile);

/// Generic system ∂_η ψ + a(ψ) ∂_τ ψ = 0, ∂_η θ − b(ψ) ∂_τ θ = 0 with a, b > 0.
struct CharacteristicSpeeds {
    std::function<double(double)> a;
    std::function<double(double)> a_prime;
    std::function<double(double)> b;
};

/// Speeds that reduce the generic system to the Λ-medium equations.
CharacteristicSpeeds lambda_medium_speeds(double delta);

struct ZetaXi {
    double zeta = 0.0;
    double xi = 0.0;
};

/// Solves ζ = τ − η a(ψ0(ζ)) and then ξ from
///     η = ∫_ζ^ξ dζ'/(a+b)(ψ0(ζ')) · exp[∫_{ψ0(ζ)}^{ψ0(ζ')} a'/(a+b) dψ]
/// by adaptive Gauss-Kronrod quadrature. Errors as solve_zeta / solve_xi.
ZetaXi general_characteristics(const CharacteristicSpeeds& speeds, const EntranceProfile& profile, double eta,
                               double tau);

}  // namespace lambdaprop
