#include "lambdaprop/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lambdaprop {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_config: return "InvalidConfig";
        case ErrorKind::edge_amplitude_too_large: return "EdgeAmplitudeTooLarge";
        case ErrorKind::degenerate_angles: return "DegenerateAngles";
        case ErrorKind::step_unstable: return "StepUnstable";
        case ErrorKind::shock_detected: return "ShockDetected";
        case ErrorKind::adiabaticity_horizon: return "AdiabaticityHorizon";
        case ErrorKind::io: return "IOError";
    }
    return "Error";
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::invalid_config, msg); }

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SimulationConfig::validate() const {
    for (auto [name, v] : {std::pair{"omega_p_max", omega_p_max}, {"omega_s_max", omega_s_max},
                           {"t_p", t_p}, {"t_s", t_s}, {"tau_delay", tau_delay}, {"delta", delta},
                           {"gamma", gamma}, {"phase_p", phase_p}, {"phase_s", phase_s},
                           {"length", length}}) {
        if (!finite(v)) invalid(std::string(name) + " must be finite");
    }
    if (t_p <= 0.0) invalid("t_p must be > 0");
    if (t_s <= 0.0) invalid("t_s must be > 0");
    if (omega_p_max < 0.0 || omega_s_max < 0.0) invalid("peak Rabi frequencies must be >= 0");
    if (gamma < 0.0) invalid("gamma must be >= 0");
    if (length < 0.0) invalid("length must be >= 0");
    if (n_tau < 2) invalid("n_tau must be >= 2");
    if (n_eta && *n_eta < 1) invalid("n_eta must be >= 1");
    if (eta_steps_per_unit < 1) invalid("eta steps per unit must be >= 1");
    if (!finite(tau_window.min) || !finite(tau_window.max) || !(tau_window.min < tau_window.max))
        invalid("tau_window must satisfy min < max");
}

int SimulationConfig::eta_steps() const {
    if (n_eta) return *n_eta;
    return std::max(1, static_cast<int>(std::ceil(length * eta_steps_per_unit - 1e-9)));
}

PulseEnvelope PulseEnvelope::gaussian(double amplitude, double center, double width, double phase) {
    if (!(width > 0.0)) invalid("gaussian width must be > 0");
    PulseEnvelope env;
    env.shape_ = Shape::gaussian;
    env.amplitude_ = amplitude;
    env.center_ = center;
    env.width_ = width;
    env.phase_ = phase;
    return env;
}

PulseEnvelope PulseEnvelope::tabulated(std::vector<std::pair<double, cplx>> samples) {
    if (samples.size() < 2) invalid("tabulated envelope needs at least 2 samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first))
            invalid("tabulated envelope times must be strictly increasing");
    }
    // A kink shows up as a slope jump between neighbouring intervals that is a
    // sizeable fraction of the steepest slope; smooth sampled shapes give jumps of
    // order f''·h instead.
    double max_slope = 0.0;
    std::vector<cplx> slopes(samples.size() - 1);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        slopes[i] = (samples[i + 1].second - samples[i].second) / (samples[i + 1].first - samples[i].first);
        max_slope = std::max(max_slope, std::abs(slopes[i]));
    }
    for (std::size_t i = 1; i < slopes.size(); ++i) {
        if (std::abs(slopes[i] - slopes[i - 1]) > 0.25 * max_slope) {
            std::ostringstream msg;
            msg << "tabulated envelope is not continuously differentiable near tau = " << samples[i].first;
            invalid(msg.str());
        }
    }
    PulseEnvelope env;
    env.shape_ = Shape::tabulated;
    env.samples_ = std::move(samples);
    double peak = 0.0;
    for (const auto& [t, v] : env.samples_) peak = std::max(peak, std::abs(v));
    env.amplitude_ = peak;
    return env;
}

cplx PulseEnvelope::value(double tau) const {
    if (shape_ == Shape::gaussian) {
        const double x = (tau - center_) / width_;
        return std::polar(amplitude_ * std::exp(-x * x), phase_);
    }
    if (tau <= samples_.front().first || tau >= samples_.back().first) {
        if (tau == samples_.front().first) return samples_.front().second;
        if (tau == samples_.back().first) return samples_.back().second;
        return {0.0, 0.0};
    }
    auto it = std::upper_bound(samples_.begin(), samples_.end(), tau,
                               [](double t, const auto& s) { return t < s.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    const double w = (tau - t0) / (t1 - t0);
    return v0 + w * (v1 - v0);
}

cplx PulseEnvelope::derivative(double tau) const {
    if (shape_ == Shape::gaussian) {
        const double x = (tau - center_) / width_;
        return value(tau) * (-2.0 * x / width_);
    }
    if (tau < samples_.front().first || tau > samples_.back().first) return {0.0, 0.0};
    auto it = std::upper_bound(samples_.begin(), samples_.end(), tau,
                               [](double t, const auto& s) { return t < s.first; });
    if (it == samples_.end()) --it;
    if (it == samples_.begin()) ++it;
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    return (v1 - v0) / (t1 - t0);
}

double PulseEnvelope::peak() const { return std::abs(amplitude_); }

PulseEnvelope pump_envelope(const SimulationConfig& config) {
    return PulseEnvelope::gaussian(config.omega_p_max, -0.5 * config.tau_delay, config.t_p, config.phase_p);
}

PulseEnvelope stokes_envelope(const SimulationConfig& config) {
    return PulseEnvelope::gaussian(config.omega_s_max, 0.5 * config.tau_delay, config.t_s, config.phase_s);
}

Grid build_grid(const SimulationConfig& config) {
    config.validate();
    Grid grid;
    const auto n_tau = static_cast<std::size_t>(config.n_tau);
    grid.tau.resize(n_tau);
    const double t0 = config.tau_window.min;
    const double span = config.tau_window.max - t0;
    for (std::size_t j = 0; j < n_tau; ++j)
        grid.tau[j] = t0 + span * static_cast<double>(j) / static_cast<double>(n_tau - 1);
    grid.tau.back() = config.tau_window.max;

    const auto n_eta = static_cast<std::size_t>(config.eta_steps());
    grid.eta.resize(n_eta + 1);
    for (std::size_t n = 0; n <= n_eta; ++n)
        grid.eta[n] = config.length * static_cast<double>(n) / static_cast<double>(n_eta);
    grid.eta.back() = config.length;
    return grid;
}

EntranceFields entrance_fields(const SimulationConfig& config) {
    return entrance_fields(config, pump_envelope(config), stokes_envelope(config));
}

EntranceFields entrance_fields(const SimulationConfig& config, const PulseEnvelope& pump,
                               const PulseEnvelope& stokes) {
    const Grid grid = build_grid(config);
    auto check_edges = [&](const PulseEnvelope& env, const char* name) {
        const double limit = kEdgeFraction * env.peak();
        for (double edge : {config.tau_window.min, config.tau_window.max}) {
            if (std::abs(env.value(edge)) > limit) {
                std::ostringstream msg;
                msg << name << " amplitude at window edge tau = " << edge << " is "
                    << std::abs(env.value(edge)) << ", above " << kEdgeFraction << " of its peak";
                throw Error(ErrorKind::edge_amplitude_too_large, msg.str());
            }
        }
    };
    check_edges(pump, "pump");
    check_edges(stokes, "Stokes");

    EntranceFields out;
    out.pump.reserve(grid.tau.size());
    out.stokes.reserve(grid.tau.size());
    for (double t : grid.tau) {
        out.pump.push_back(pump.value(t));
        out.stokes.push_back(stokes.value(t));
    }
    return out;
}

}  // namespace lambdaprop
