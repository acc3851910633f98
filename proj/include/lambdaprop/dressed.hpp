#pragma once

// Single-atom Λ system at exact two-photon resonance: RWA Hamiltonian in the
// {|1>, |2>, |3>} basis, mixing angles, the analytic dressed basis and
// pointwise adiabaticity measures.
//
//     H = [ 0      -Ω_p*   0    ]
//         [ -Ω_p    Δ     -Ω_s  ]
//         [ 0      -Ω_s*   0    ]
//
// Loss from |2> enters as Δ -> Δ - iΓ/2.

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "lambdaprop/core.hpp"

namespace lambdaprop {

/// Fields with |Ω_p| and |Ω_s| both below this leave θ undefined.
inline constexpr double kFieldFloor = 1e-12;

struct AtomicState {
    cplx a1{1.0, 0.0};
    cplx a2{0.0, 0.0};
    cplx a3{0.0, 0.0};

    [[nodiscard]] double norm() const { return std::norm(a1) + std::norm(a2) + std::norm(a3); }
    [[nodiscard]] Eigen::Vector3cd vector() const { return {a1, a2, a3}; }
    static AtomicState from_vector(const Eigen::Vector3cd& v) { return {v(0), v(1), v(2)}; }
};

struct MixingAngles {
    double theta = 0.0;    ///< tan θ = |Ω_p/Ω_s|, in [0, π/2]
    double psi = 0.0;      ///< tan 2ψ = 2Ω/Δ, in [0, π/2); [0, π/4) for Δ > 0
    double phi_rel = 0.0;  ///< arg Ω_p − arg Ω_s wrapped to (−π, π]
};

struct DressedFrame {
    double theta = 0.0;
    double psi = 0.0;
    double phi_p = 0.0;
    double phi_s = 0.0;
    double phi_rel = 0.0;
    double lambda_b1 = 0.0;
    double lambda_b2 = 0.0;
    double lambda_d = 0.0;
    double omega_gen = 0.0;
};

Eigen::Matrix3cd hamiltonian(cplx omega_p, cplx omega_s, double delta, double gamma = 0.0);

/// ψ uses the full-range convention ψ = atan2(2Ω, Δ)/2, so Δ < 0 maps onto
/// ψ ∈ (π/4, π/2) where |1> connects to |b2> instead of |b1>.
/// Throws degenerate_angles when both fields are below kFieldFloor, or when Ω = Δ = 0.
MixingAngles mixing_angles(cplx omega_p, cplx omega_s, double delta);

/// Eigenvalues (λ_b1, λ_b2) of the bright pair; λ_d = 0. Stable against cancellation.
std::array<double, 2> bright_eigenvalues(double omega_gen, double delta);

/// Frame at one point. When both fields are below kFieldFloor, θ is taken from
/// `frozen_theta` (the previous grid value); without it the call throws degenerate_angles.
DressedFrame dressed_frame(cplx omega_p, cplx omega_s, double delta,
                           std::optional<double> frozen_theta = std::nullopt);

Eigen::Vector3cd bright1_vector(const DressedFrame& frame);
Eigen::Vector3cd bright2_vector(const DressedFrame& frame);
Eigen::Vector3cd dark_vector(const DressedFrame& frame);

struct Eigensystem {
    std::array<double, 3> values{};  ///< λ_b1, λ_b2, λ_d
    Eigen::Matrix3cd vectors;        ///< columns |b1>, |b2>, |d>
};

/// Built from the mixing angles rather than a numerical eigensolver, so ordering
/// and phases are fixed. `frozen_theta` as for dressed_frame.
Eigensystem eigensystem(cplx omega_p, cplx omega_s, double delta, std::optional<double> frozen_theta = std::nullopt);

struct DressedProjections {
    double b1 = 0.0;
    double b2 = 0.0;
    double d = 0.0;
};

DressedProjections project_dressed(const AtomicState& state, const DressedFrame& frame);

/// Local fields and their τ-derivatives.
struct FieldSample {
    cplx omega_p;
    cplx omega_s;
    cplx d_omega_p;
    cplx d_omega_s;
};

struct AdiabaticityMetrics {
    double abs_delta_t = 0.0;             ///< |Δ|T, must be >> 1
    double stark_ratio = 0.0;             ///< Ω²T/|Δ|, must be >> 1
    double loss_ratio = 0.0;              ///< ΓTψ², must be << 1
    double loss_ratio_small_angle = 0.0;  ///< ΓT(Ω/Δ)²
    double bright_dark_ratio = 0.0;       ///< |λ_b1 − λ_d| over the θ/φ coupling; >> 1 when adiabatic
    double bright_bright_ratio = 0.0;     ///< |λ_b1 − λ_b2| over the ψ/φ coupling; >> 1 when adiabatic

    [[nodiscard]] bool single_atom_conditions_hold() const {
        return abs_delta_t > 1.0 && stark_ratio > 1.0 && loss_ratio < 1.0;
    }
    [[nodiscard]] bool coupling_conditions_hold() const {
        return bright_dark_ratio > 1.0 && bright_bright_ratio > 1.0;
    }
};

/// Zero derivatives give infinite coupling ratios.
AdiabaticityMetrics adiabaticity_metrics(const FieldSample& sample, double delta, double gamma,
                                         double interaction_time = 1.0);

}  // namespace lambdaprop
