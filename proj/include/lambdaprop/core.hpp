#pragma once

// Dimensionless units throughout: time in T (the Stokes duration), Rabi
// frequencies, detuning and loss rate in 1/T, propagation length in 1/(qT)
// so that the medium coupling q equals 1.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lambdaprop/error.hpp"

namespace lambdaprop {

using cplx = std::complex<double>;

/// Medium coupling coefficient in the dimensionless unit system.
inline constexpr double kCoupling = 1.0;

/// Envelopes must fall below this fraction of their peak at both window edges.
inline constexpr double kEdgeFraction = 1e-6;

/// Default grid resolution: points over the default window and η steps per unit length.
inline constexpr int kDefaultTauPoints = 2201;
inline constexpr int kDefaultEtaStepsPerUnit = 10;

struct TauWindow {
    double min = -5.0;
    double max = 6.0;
};

struct SimulationConfig {
    double omega_p_max = 100.0;
    double omega_s_max = 100.0;
    double t_p = 1.0;
    double t_s = 1.0;
    double tau_delay = 1.3;
    double delta = 1000.0;
    double gamma = 0.0;
    double phase_p = 0.0;
    double phase_s = 0.0;
    double length = 0.0;
    int n_tau = kDefaultTauPoints;
    /// Number of η steps; unset means kDefaultEtaStepsPerUnit per unit length.
    std::optional<int> n_eta;
    TauWindow tau_window;
    /// Resolution used when n_eta is unset. Not a file key; see LAMBDAPROP_DEFAULT_GRID.
    int eta_steps_per_unit = kDefaultEtaStepsPerUnit;

    /// Throws Error(invalid_config) when an invariant is violated.
    void validate() const;

    [[nodiscard]] int eta_steps() const;
};

/// Smooth complex envelope Ω(τ). Gaussian: amplitude·e^{iφ}·exp(−((τ−center)/width)²).
/// Tabulated: linear interpolation between (τ, value) samples, zero outside.
class PulseEnvelope {
public:
    enum class Shape { gaussian, tabulated };

    static PulseEnvelope gaussian(double amplitude, double center, double width, double phase = 0.0);
    /// Samples must be strictly increasing in τ and continuously differentiable
    /// to sampling tolerance (no slope kinks); throws invalid_config otherwise.
    static PulseEnvelope tabulated(std::vector<std::pair<double, cplx>> samples);

    [[nodiscard]] Shape shape() const noexcept { return shape_; }
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] double center() const noexcept { return center_; }
    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double phase() const noexcept { return phase_; }
    [[nodiscard]] const std::vector<std::pair<double, cplx>>& samples() const noexcept { return samples_; }

    [[nodiscard]] cplx value(double tau) const;
    [[nodiscard]] cplx derivative(double tau) const;
    /// Largest |Ω| over the envelope.
    [[nodiscard]] double peak() const;

private:
    Shape shape_ = Shape::gaussian;
    double amplitude_ = 0.0;
    double center_ = 0.0;
    double width_ = 1.0;
    double phase_ = 0.0;
    std::vector<std::pair<double, cplx>> samples_;
};

/// Pump centered at −τ_d/2, Stokes at +τ_d/2.
PulseEnvelope pump_envelope(const SimulationConfig& config);
PulseEnvelope stokes_envelope(const SimulationConfig& config);

struct Grid {
    std::vector<double> eta;
    std::vector<double> tau;

    [[nodiscard]] double d_eta() const { return eta.size() > 1 ? eta[1] - eta[0] : 0.0; }
    [[nodiscard]] double d_tau() const { return tau[1] - tau[0]; }
};

Grid build_grid(const SimulationConfig& config);

/// Pump and Stokes sampled on the τ grid at η = 0.
struct EntranceFields {
    std::vector<cplx> pump;
    std::vector<cplx> stokes;

    /// Ω² = |Ω_p|² + |Ω_s|² at sample i.
    [[nodiscard]] double omega_sq(std::size_t i) const { return std::norm(pump[i]) + std::norm(stokes[i]); }
};

/// Throws edge_amplitude_too_large when an envelope exceeds kEdgeFraction of its
/// peak at a window edge.
EntranceFields entrance_fields(const SimulationConfig& config);
EntranceFields entrance_fields(const SimulationConfig& config, const PulseEnvelope& pump,
                               const PulseEnvelope& stokes);

}  // namespace lambdaprop
