#pragma once

// Diagnostics over a finished propagation: transfer summaries, numeric versus
// characteristic populations, dressed-state projections, the field mixing angle
// and pulse reshaping.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lambdaprop/characteristics.hpp"
#include "lambdaprop/numeric.hpp"

namespace lambdaprop {

/// Final P3 at or above this counts as complete transfer.
inline constexpr double kCompleteTransfer = 0.99;
/// Peaks are counted only above this fraction of the slice maximum, in height and prominence.
inline constexpr double kPeakFloor = 0.05;
/// Pump energy fraction after the Stokes trailing half maximum that marks a broken pulse order.
inline constexpr double kTailFractionLimit = 0.05;

struct TransferSummary {
    double eta = 0.0;
    double final_p1 = 0.0;
    double final_p2 = 0.0;
    double final_p3 = 0.0;
    double peak_p2 = 0.0;
    double max_pd = 0.0;
    /// sup |P3_num − P3_ana| over the τ nodes before the analytic solution stops.
    /// Empty when the analytic solution is unavailable at every node.
    std::optional<double> sup_p3_difference;
    /// First τ node at which the analytic solution fails.
    std::optional<double> horizon_tau;
    /// Name of the error that stopped it (AdiabaticityHorizon, ShockDetected, ...).
    std::string analytic_error;
};

/// Analytic P3 on a τ grid; nodes at and after the first failure are empty.
struct AnalyticSeries {
    std::vector<std::optional<double>> p3;
    std::optional<double> horizon_tau;
    std::string error;
};

AnalyticSeries analytic_p3_series(double eta, std::span<const double> tau, const EntranceProfile& profile);

/// sup |a − b|. Throws invalid_config on a length mismatch.
double sup_norm_difference(std::span<const double> a, std::span<const double> b);

std::vector<TransferSummary> compare(const Propagation& run);
/// Runs the numeric solver and compares. Solver errors of the analytic side are
/// recorded per slice; numeric instability still throws.
std::vector<TransferSummary> compare(const SimulationConfig& config);

struct DressedSeries {
    double eta = 0.0;
    std::vector<double> pb1;
    std::vector<double> pb2;
    std::vector<double> pd;
    double max_pd = 0.0;
    double max_pb2 = 0.0;
};

/// θ on one slice. Where Ω < kEdgeFraction × slice peak (or both fields are below
/// kFieldFloor) the previous value is held; leading nodes take the first live
/// value, and an all-zero slice gives π/2. Projections hold the whole frame the same way.
std::vector<double> frozen_theta_series(std::span<const cplx> pump, std::span<const cplx> stokes);

std::vector<DressedSeries> dressed_series(const Propagation& run);
std::vector<DressedSeries> dressed_series(const SimulationConfig& config);

struct ThetaTrajectory {
    double eta = 0.0;
    std::vector<double> tau;
    std::vector<double> theta;
    double final_theta = 0.0;
};

/// θ(τ) on the η slice nearest to `eta`.
ThetaTrajectory theta_trajectory(const Propagation& run, double eta);
ThetaTrajectory theta_trajectory(const SimulationConfig& config, double eta);

struct ReshapingSlice {
    double eta = 0.0;
    int pump_peaks = 0;
    int stokes_peaks = 0;
    double pump_tail_fraction = 0.0;
    bool order_broken = false;
};

struct ReshapingReport {
    std::vector<ReshapingSlice> slices;

    [[nodiscard]] int max_pump_peaks() const;
    [[nodiscard]] bool any_order_broken() const;
};

/// Local maxima with height and prominence at least floor × max(values).
int count_peaks(std::span<const double> values, double floor = kPeakFloor);

/// ∫|Ω_p|² after the last τ where |Ω_s| ≥ max|Ω_s|/2, over ∫|Ω_p|². Zero for zero pump.
double pump_tail_fraction(std::span<const double> tau, std::span<const cplx> pump, std::span<const cplx> stokes);

ReshapingReport detect_reshaping(const FieldGrid& fields);

}  // namespace lambdaprop
