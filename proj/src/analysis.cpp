#include "lambdaprop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lambdaprop/error.hpp"
#include "parallel.hpp"

namespace lambdaprop {

AnalyticSeries analytic_p3_series(double eta, std::span<const double> tau, const EntranceProfile& profile) {
    AnalyticSeries out;
    out.p3.resize(tau.size());
    for (std::size_t j = 0; j < tau.size(); ++j) {
        try {
            out.p3[j] = analytic_point(eta, tau[j], profile).p3;
        } catch (const Error& e) {
            out.horizon_tau = tau[j];
            out.error = std::string(to_string(e.kind()));
            break;
        }
    }
    return out;
}

double sup_norm_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::invalid_config, "sup norm of series with different lengths");
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
    return sup;
}

namespace {

// Nodes where Ω is below kEdgeFraction of the slice peak (or both fields below
// kFieldFloor) carry no usable angle information; their frame is held.
std::vector<bool> frozen_mask(std::span<const cplx> pump, std::span<const cplx> stokes) {
    const std::size_t n = pump.size();
    std::vector<double> omega(n);
    double peak = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        omega[j] = std::sqrt(std::norm(pump[j]) + std::norm(stokes[j]));
        peak = std::max(peak, omega[j]);
    }
    std::vector<bool> frozen(n);
    for (std::size_t j = 0; j < n; ++j) {
        const bool degenerate = std::abs(pump[j]) < kFieldFloor && std::abs(stokes[j]) < kFieldFloor;
        frozen[j] = degenerate || omega[j] < kEdgeFraction * peak;
    }
    return frozen;
}

// Forward-fill frozen entries from the previous live one, back-fill leading ones.
template <class T>
bool hold_frozen(std::vector<T>& values, const std::vector<bool>& frozen) {
    std::optional<std::size_t> first;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!frozen[j]) {
            if (!first) first = j;
        } else if (first) {
            values[j] = values[j - 1];
        }
    }
    if (!first) return false;
    std::fill(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(*first), values[*first]);
    return true;
}

}  // namespace

std::vector<double> frozen_theta_series(std::span<const cplx> pump, std::span<const cplx> stokes) {
    const auto frozen = frozen_mask(pump, stokes);
    std::vector<double> theta(pump.size(), std::numbers::pi / 2);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (!frozen[j]) theta[j] = std::atan2(std::abs(pump[j]), std::abs(stokes[j]));
    }
    if (!hold_frozen(theta, frozen)) std::fill(theta.begin(), theta.end(), std::numbers::pi / 2);
    return theta;
}

namespace {

DressedSeries slice_projections(const Propagation& run, std::size_t n) {
    const auto& f = run.fields;
    const std::size_t m = f.n_tau();
    DressedSeries s;
    s.eta = f.eta()[n];
    s.pb1.resize(m);
    s.pb2.resize(m);
    s.pd.resize(m);
    const auto pump = f.pump_slice(n);
    const auto stokes = f.stokes_slice(n);
    auto frozen = frozen_mask(pump, stokes);
    std::vector<DressedFrame> frames(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (frozen[j]) continue;
        try {
            frames[j] = dressed_frame(pump[j], stokes[j], run.config.delta);
        } catch (const Error&) {
            frozen[j] = true;
        }
    }
    if (!hold_frozen(frames, frozen)) {
        // No field anywhere: the bare states are the dressed basis with |b1> = |1>.
        DressedFrame bare;
        bare.theta = std::numbers::pi / 2;
        std::fill(frames.begin(), frames.end(), bare);
    }
    for (std::size_t j = 0; j < m; ++j) {
        const auto p = project_dressed(run.states.at(n, j), frames[j]);
        s.pb1[j] = p.b1;
        s.pb2[j] = p.b2;
        s.pd[j] = p.d;
        s.max_pd = std::max(s.max_pd, p.d);
        s.max_pb2 = std::max(s.max_pb2, p.b2);
    }
    return s;
}

}  // namespace

std::vector<DressedSeries> dressed_series(const Propagation& run) {
    std::vector<DressedSeries> out(run.fields.n_eta());
    detail::parallel_for(out.size(), [&](std::size_t n) { out[n] = slice_projections(run, n); });
    return out;
}

std::vector<DressedSeries> dressed_series(const SimulationConfig& config) { return dressed_series(propagate(config)); }

std::vector<TransferSummary> compare(const Propagation& run) {
    const auto& f = run.fields;
    std::optional<EntranceProfile> profile;
    std::string profile_error;
    try {
        profile.emplace(EntranceProfile::from_config(run.config));
    } catch (const Error& e) {
        profile_error = std::string(to_string(e.kind()));
    }

    std::vector<TransferSummary> out(f.n_eta());
    detail::parallel_for(out.size(), [&](std::size_t n) {
        TransferSummary& t = out[n];
        t.eta = f.eta()[n];
        const auto states = run.states.slice(n);
        const auto& last = states.back();
        t.final_p1 = std::norm(last.a1);
        t.final_p2 = std::norm(last.a2);
        t.final_p3 = std::norm(last.a3);
        for (const auto& s : states) t.peak_p2 = std::max(t.peak_p2, std::norm(s.a2));
        t.max_pd = slice_projections(run, n).max_pd;

        if (!profile) {
            t.analytic_error = profile_error;
            return;
        }
        const auto series = analytic_p3_series(t.eta, f.tau(), *profile);
        t.horizon_tau = series.horizon_tau;
        t.analytic_error = series.error;
        for (std::size_t j = 0; j < states.size(); ++j) {
            if (!series.p3[j]) break;
            const double d = std::abs(std::norm(states[j].a3) - *series.p3[j]);
            t.sup_p3_difference = std::max(t.sup_p3_difference.value_or(0.0), d);
        }
    });
    return out;
}

std::vector<TransferSummary> compare(const SimulationConfig& config) { return compare(propagate(config)); }

ThetaTrajectory theta_trajectory(const Propagation& run, double eta) {
    const auto& f = run.fields;
    const auto& etas = f.eta();
    std::size_t best = 0;
    for (std::size_t n = 1; n < etas.size(); ++n) {
        if (std::abs(etas[n] - eta) < std::abs(etas[best] - eta)) best = n;
    }
    ThetaTrajectory t;
    t.eta = etas[best];
    t.tau = f.tau();
    t.theta = frozen_theta_series(f.pump_slice(best), f.stokes_slice(best));
    t.final_theta = t.theta.back();
    return t;
}

ThetaTrajectory theta_trajectory(const SimulationConfig& config, double eta) {
    SimulationConfig c = config;
    c.length = std::max(config.length, eta);
    return theta_trajectory(propagate(c), eta);
}

int ReshapingReport::max_pump_peaks() const {
    int m = 0;
    for (const auto& s : slices) m = std::max(m, s.pump_peaks);
    return m;
}

bool ReshapingReport::any_order_broken() const {
    return std::any_of(slices.begin(), slices.end(), [](const ReshapingSlice& s) { return s.order_broken; });
}

int count_peaks(std::span<const double> values, double floor) {
    const std::size_t n = values.size();
    if (n < 3) return 0;
    const double top = *std::max_element(values.begin(), values.end());
    if (!(top > 0.0)) return 0;
    const double threshold = floor * top;
    int count = 0;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(values[i] > values[i - 1])) {
            ++i;
            continue;
        }
        // Walk across a plateau.
        std::size_t r = i;
        while (r + 1 < n && values[r + 1] == values[i]) ++r;
        if (r + 1 >= n || !(values[r + 1] < values[i])) {
            i = r + 1;
            continue;
        }
        const double h = values[i];
        if (h >= threshold) {
            double left_min = h;
            for (std::size_t k = i; k-- > 0;) {
                if (values[k] > h) break;
                left_min = std::min(left_min, values[k]);
            }
            // Ties go to the later peak, so equal twins over a shallow dip count once.
            double right_min = h;
            for (std::size_t k = r + 1; k < n; ++k) {
                if (values[k] >= h) break;
                right_min = std::min(right_min, values[k]);
            }
            if (h - std::max(left_min, right_min) >= threshold) ++count;
        }
        i = r + 1;
    }
    return count;
}

double pump_tail_fraction(std::span<const double> tau, std::span<const cplx> pump, std::span<const cplx> stokes) {
    const std::size_t n = tau.size();
    if (n < 2) return 0.0;
    double smax = 0.0;
    for (const auto& s : stokes) smax = std::max(smax, std::abs(s));
    std::size_t start = 0;
    if (smax > 0.0) {
        for (std::size_t j = n; j-- > 0;) {
            if (std::abs(stokes[j]) >= 0.5 * smax) {
                start = j;
                break;
            }
        }
    }
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double piece = 0.5 * (std::norm(pump[j]) + std::norm(pump[j + 1])) * (tau[j + 1] - tau[j]);
        total += piece;
        if (j >= start) tail += piece;
    }
    return total > 0.0 ? tail / total : 0.0;
}

ReshapingReport detect_reshaping(const FieldGrid& fields) {
    ReshapingReport report;
    report.slices.resize(fields.n_eta());
    std::vector<double> mag(fields.n_tau());
    for (std::size_t n = 0; n < fields.n_eta(); ++n) {
        ReshapingSlice& s = report.slices[n];
        s.eta = fields.eta()[n];
        const auto pump = fields.pump_slice(n);
        const auto stokes = fields.stokes_slice(n);
        std::transform(pump.begin(), pump.end(), mag.begin(), [](cplx v) { return std::abs(v); });
        s.pump_peaks = count_peaks(mag);
        std::transform(stokes.begin(), stokes.end(), mag.begin(), [](cplx v) { return std::abs(v); });
        s.stokes_peaks = count_peaks(mag);
        s.pump_tail_fraction = pump_tail_fraction(fields.tau(), pump, stokes);
        s.order_broken = s.pump_peaks > 1 || s.pump_tail_fraction > kTailFractionLimit;
    }
    return report;
}

}  // namespace lambdaprop
