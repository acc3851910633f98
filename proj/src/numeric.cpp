#include "lambdaprop/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace lambdaprop {

namespace {

// Gauss-Legendre nodes on [0, 1] and the commutator-free weights
// U = exp(-ih(a1 H1 + a2 H2)) exp(-ih(a2 H1 + a1 H2)).
const double kSqrt3 = std::sqrt(3.0);
const double kGauss1 = 0.5 - kSqrt3 / 6.0;
const double kGauss2 = 0.5 + kSqrt3 / 6.0;
const double kCf1 = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kCf2 = (3.0 + 2.0 * kSqrt3) / 12.0;

using Weights = std::array<double, 4>;

// Cubic Lagrange weights on nodes 0..3 evaluated at x.
Weights lagrange4(double x) {
    return {-(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0, x * (x - 2.0) * (x - 3.0) / 2.0,
            -x * (x - 1.0) * (x - 3.0) / 2.0, x * (x - 1.0) * (x - 2.0) / 6.0};
}

struct GaussInterpolator {
    // Per stencil offset (first node at j-1, j, or j-2).
    std::array<Weights, 3> at1;
    std::array<Weights, 3> at2;
    std::array<Weights, 3> mid;

    GaussInterpolator() {
        for (int k = 0; k < 3; ++k) {
            const double base = (k == 0) ? 1.0 : (k == 1 ? 0.0 : 2.0);
            at1[k] = lagrange4(base + kGauss1);
            at2[k] = lagrange4(base + kGauss2);
            mid[k] = lagrange4(base + 0.5);
        }
    }
};

// Stencil choice for the interval [j, j+1] on an n-point grid (n ≥ 4).
std::pair<int, std::size_t> stencil(std::size_t j, std::size_t n) {
    if (j == 0) return {1, 0};
    if (j + 2 >= n) return {2, j - 2};
    return {0, j - 1};
}

cplx interpolate(std::span<const cplx> f, std::size_t first, const Weights& w) {
    cplx v(0.0, 0.0);
    for (std::size_t m = 0; m < 4; ++m) v += w[m] * f[first + m];
    return v;
}

const GaussInterpolator& gauss_interpolator() {
    static const GaussInterpolator interp;
    return interp;
}

// exp(-i h M) v for M = [[0,-P*,0],[-P,D,-S],[0,-S*,0]], D possibly complex.
// The bright combination |B> = (P*|1> + S*|3>)/Ω couples only to |2>; the
// orthogonal dark combination is stationary.
void apply_lambda_exponential(cplx p, cplx s, cplx d, double h, cplx& v1, cplx& v2, cplx& v3) {
    const double omega_sq = std::norm(p) + std::norm(s);
    if (omega_sq == 0.0) {
        v2 *= std::exp(cplx(0.0, -h) * d);
        return;
    }
    const double omega = std::sqrt(omega_sq);
    const cplx b = (p * v1 + s * v3) / omega;
    // 2x2 block A = [[0, -Ω], [-Ω, D]] = (D/2) I + K with K² = r² I.
    const cplx half_d = 0.5 * d;
    const cplx r = std::sqrt(half_d * half_d + omega_sq);
    const cplx x = h * r;
    const cplx c = std::cos(x);
    cplx sinc_h;  // sin(h r)/r
    if (std::abs(x) < 1e-4) {
        sinc_h = h * (1.0 - x * x / 6.0);
    } else {
        sinc_h = std::sin(x) / r;
    }
    const cplx phase = std::exp(cplx(0.0, -h) * half_d);
    const cplx mi_sinc = cplx(0.0, -1.0) * sinc_h;
    // K = [[-D/2, -Ω], [-Ω, D/2]]
    const cplx nb = phase * (c * b + mi_sinc * (-half_d * b - omega * v2));
    const cplx n2 = phase * (c * v2 + mi_sinc * (-omega * b + half_d * v2));
    const cplx db = (nb - b) / omega;
    v1 += db * std::conj(p);
    v3 += db * std::conj(s);
    v2 = n2;
}

void check_solution(std::span<const AtomicState> out, double gamma) {
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double nrm = out[j].norm();
        const bool bad = !std::isfinite(nrm) || (gamma == 0.0 && std::abs(nrm - 1.0) > kNormDriftLimit) ||
                         (gamma > 0.0 && nrm > 1.0 + kNormDriftLimit);
        if (bad) {
            std::ostringstream msg;
            msg << "norm " << nrm << " at tau index " << j << "; refine the tau grid";
            throw Error(ErrorKind::step_unstable, msg.str());
        }
    }
}

std::vector<AtomicState> solve_magnus(std::span<const double> tau, std::span<const cplx> pump,
                                      std::span<const cplx> stokes, const SolveOptions& opt, AtomicState state) {
    const std::size_t n = tau.size();
    std::vector<AtomicState> out(n);
    out[0] = state;
    if (n < 2) return out;
    const double h = tau[1] - tau[0];
    const cplx d_half(0.5 * opt.delta, -0.25 * opt.gamma);  // (a1 + a2) (Δ − iΓ/2)
    const auto& gi = gauss_interpolator();

    for (std::size_t j = 0; j + 1 < n; ++j) {
        cplx p1, p2, s1, s2;
        if (n < 4) {
            // Linear interpolation on very short grids.
            p1 = pump[j] + kGauss1 * (pump[j + 1] - pump[j]);
            p2 = pump[j] + kGauss2 * (pump[j + 1] - pump[j]);
            s1 = stokes[j] + kGauss1 * (stokes[j + 1] - stokes[j]);
            s2 = stokes[j] + kGauss2 * (stokes[j + 1] - stokes[j]);
        } else {
            const auto [k, first] = stencil(j, n);
            p1 = interpolate(pump, first, gi.at1[k]);
            p2 = interpolate(pump, first, gi.at2[k]);
            s1 = interpolate(stokes, first, gi.at1[k]);
            s2 = interpolate(stokes, first, gi.at2[k]);
        }
        apply_lambda_exponential(kCf2 * p1 + kCf1 * p2, kCf2 * s1 + kCf1 * s2, d_half, h, state.a1, state.a2,
                                 state.a3);
        apply_lambda_exponential(kCf1 * p1 + kCf2 * p2, kCf1 * s1 + kCf2 * s2, d_half, h, state.a1, state.a2,
                                 state.a3);
        out[j + 1] = state;
    }
    return out;
}

std::vector<AtomicState> solve_rk4(std::span<const double> tau, std::span<const cplx> pump,
                                   std::span<const cplx> stokes, const SolveOptions& opt, AtomicState state) {
    const std::size_t n = tau.size();
    std::vector<AtomicState> out(n);
    out[0] = state;
    const cplx d(opt.delta, -0.5 * opt.gamma);
    const cplx mi(0.0, -1.0);
    // dφ/dτ = -i H φ
    auto rhs = [&](cplx p, cplx s, const std::array<cplx, 3>& v) {
        return std::array<cplx, 3>{mi * (-std::conj(p) * v[1]), mi * (-p * v[0] + d * v[1] - s * v[2]),
                                   mi * (-std::conj(s) * v[1])};
    };
    const auto& gi = gauss_interpolator();
    std::array<cplx, 3> v{state.a1, state.a2, state.a3};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = tau[j + 1] - tau[j];
        cplx pm = 0.5 * (pump[j] + pump[j + 1]);
        cplx sm = 0.5 * (stokes[j] + stokes[j + 1]);
        if (n >= 4) {
            const auto [k, first] = stencil(j, n);
            pm = interpolate(pump, first, gi.mid[k]);
            sm = interpolate(stokes, first, gi.mid[k]);
        }
        auto axpy = [](const std::array<cplx, 3>& a, double f, const std::array<cplx, 3>& b) {
            return std::array<cplx, 3>{a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2]};
        };
        const auto k1 = rhs(pump[j], stokes[j], v);
        const auto k2 = rhs(pm, sm, axpy(v, 0.5 * h, k1));
        const auto k3 = rhs(pm, sm, axpy(v, 0.5 * h, k2));
        const auto k4 = rhs(pump[j + 1], stokes[j + 1], axpy(v, h, k3));
        for (int i = 0; i < 3; ++i) v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        out[j + 1] = {v[0], v[1], v[2]};
    }
    return out;
}

}  // namespace

std::vector<AtomicState> integrate_schrodinger(std::span<const double> tau, std::span<const cplx> pump,
                                               std::span<const cplx> stokes, const SolveOptions& options,
                                               AtomicState initial) {
    if (pump.size() != tau.size() || stokes.size() != tau.size())
        throw Error(ErrorKind::invalid_config, "field samples do not match the tau grid");
    if (tau.empty()) return {};
    auto out = options.scheme == TauScheme::magnus4 ? solve_magnus(tau, pump, stokes, options, initial)
                                                    : solve_rk4(tau, pump, stokes, options, initial);
    check_solution(out, options.gamma);
    return out;
}

FieldGrid::FieldGrid(std::vector<double> eta, std::vector<double> tau)
    : eta_(std::move(eta)), tau_(std::move(tau)), pump_(eta_.size() * tau_.size()), stokes_(eta_.size() * tau_.size()) {}

SliceFields maxwell_rhs(std::span<const AtomicState> states) {
    const cplx iq(0.0, kCoupling);
    SliceFields out{std::vector<cplx>(states.size()), std::vector<cplx>(states.size())};
    for (std::size_t j = 0; j < states.size(); ++j) {
        out.pump[j] = iq * std::conj(states[j].a1) * states[j].a2;
        out.stokes[j] = iq * std::conj(states[j].a3) * states[j].a2;
    }
    return out;
}

SliceFields step_fields(std::span<const double> tau, const SliceFields& fields, std::span<const AtomicState> states,
                        double d_eta, const SolveOptions& options) {
    const std::size_t n = tau.size();
    const SliceFields k0 = maxwell_rhs(states);
    SliceFields predicted{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        predicted.pump[j] = fields.pump[j] + d_eta * k0.pump[j];
        predicted.stokes[j] = fields.stokes[j] + d_eta * k0.stokes[j];
    }
    const auto predicted_states = integrate_schrodinger(tau, predicted.pump, predicted.stokes, options, states.front());
    const SliceFields k1 = maxwell_rhs(predicted_states);
    SliceFields next{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        next.pump[j] = fields.pump[j] + 0.5 * d_eta * (k0.pump[j] + k1.pump[j]);
        next.stokes[j] = fields.stokes[j] + 0.5 * d_eta * (k0.stokes[j] + k1.stokes[j]);
    }
    return next;
}

Propagation propagate(const SimulationConfig& config, TauScheme scheme) {
    return propagate(config, pump_envelope(config), stokes_envelope(config), scheme);
}

Propagation propagate(const SimulationConfig& config, const PulseEnvelope& pump, const PulseEnvelope& stokes,
                      TauScheme scheme) {
    const Grid grid = build_grid(config);
    const EntranceFields entrance = entrance_fields(config, pump, stokes);
    const SolveOptions options{config.delta, config.gamma, scheme};

    Propagation out{config, FieldGrid(grid.eta, grid.tau), StateGrid(grid.eta.size(), grid.tau.size())};
    SliceFields current{entrance.pump, entrance.stokes};
    std::vector<AtomicState> states = integrate_schrodinger(grid.tau, current.pump, current.stokes, options);

    auto store = [&](std::size_t n) {
        std::copy(current.pump.begin(), current.pump.end(), out.fields.pump_slice(n).begin());
        std::copy(current.stokes.begin(), current.stokes.end(), out.fields.stokes_slice(n).begin());
        std::copy(states.begin(), states.end(), out.states.slice(n).begin());
    };
    store(0);
    for (std::size_t n = 1; n < grid.eta.size(); ++n) {
        const double d_eta = grid.eta[n] - grid.eta[n - 1];
        if (d_eta != 0.0) {
            current = step_fields(grid.tau, current, states, d_eta, options);
            states = integrate_schrodinger(grid.tau, current.pump, current.stokes, options);
        }
        store(n);
    }
    return out;
}

ConservationResiduals conservation_residuals(const FieldGrid& fields, const StateGrid& states) {
    ConservationResiduals r;
    const std::size_t ne = fields.n_eta();
    const std::size_t nt = fields.n_tau();
    if (ne < 3 || nt < 3) return r;
    const double de = fields.eta()[1] - fields.eta()[0];
    const double dt = fields.tau()[1] - fields.tau()[0];
    if (de == 0.0) return r;
    const double q = kCoupling;
    const std::size_t stride = nt - 2;
    r.pump.resize((ne - 2) * stride);
    r.stokes.resize((ne - 2) * stride);
    r.total.resize((ne - 2) * stride);
    for (std::size_t n = 1; n + 1 < ne; ++n) {
        for (std::size_t j = 1; j + 1 < nt; ++j) {
            const double dp = (std::norm(fields.pump(n + 1, j)) - std::norm(fields.pump(n - 1, j))) / (2.0 * de);
            const double ds = (std::norm(fields.stokes(n + 1, j)) - std::norm(fields.stokes(n - 1, j))) / (2.0 * de);
            const double d1 = (std::norm(states.at(n, j + 1).a1) - std::norm(states.at(n, j - 1).a1)) / (2.0 * dt);
            const double d2 = (std::norm(states.at(n, j + 1).a2) - std::norm(states.at(n, j - 1).a2)) / (2.0 * dt);
            const double d3 = (std::norm(states.at(n, j + 1).a3) - std::norm(states.at(n, j - 1).a3)) / (2.0 * dt);
            const std::size_t k = (n - 1) * stride + (j - 1);
            r.pump[k] = dp - q * d1;
            r.stokes[k] = ds - q * d3;
            r.total[k] = dp + ds + q * d2;
            r.max_abs = std::max({r.max_abs, std::abs(r.pump[k]), std::abs(r.stokes[k]), std::abs(r.total[k])});
            r.max_d_eta_omega_sq = std::max(r.max_d_eta_omega_sq, std::abs(dp + ds));
        }
    }
    return r;
}

}  // namespace lambdaprop
