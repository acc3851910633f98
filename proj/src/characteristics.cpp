#include "lambdaprop/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lambdaprop {

namespace {

constexpr double kNegligibleIntensity = 1e-300;
constexpr int kRootScan = 32;

// erf(xb) − erf(xa) without cancellation in either tail.
double erf_difference(double xa, double xb) {
    if (xa >= 0.0) return std::erfc(xa) - std::erfc(xb);
    if (xb <= 0.0) return std::erfc(-xb) - std::erfc(-xa);
    return std::erf(xb) - std::erf(xa);
}

// ∫_a^b |v0 + (t−t0)/(t1−t0) (v1 − v0)|² dt over a linear piece with endpoint values va, vb.
double linear_piece_energy(cplx va, cplx vb, double h) {
    return h * (std::norm(va) + std::real(va * std::conj(vb)) + std::norm(vb)) / 3.0;
}

double tabulated_energy_before(const PulseEnvelope& env, double t) {
    const auto& s = env.samples();
    if (t <= s.front().first) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (t >= s[i + 1].first) {
            acc += linear_piece_energy(s[i].second, s[i + 1].second, s[i + 1].first - s[i].first);
        } else {
            acc += linear_piece_energy(s[i].second, env.value(t), t - s[i].first);
            break;
        }
    }
    return acc;
}

// Safeguarded Newton on a bracket [lo, hi] with f(lo) ≤ 0 ≤ f(hi).
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double lo, double hi, double f_tol) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= f_tol) return x;
        if (fx < 0.0) lo = x;
        else hi = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return x;
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

// Number of sign changes of g sampled on [lo, hi].
template <class G>
int count_sign_changes(G&& g, double lo, double hi) {
    int changes = 0;
    double prev = g(lo);
    for (int k = 1; k <= kRootScan; ++k) {
        const double x = lo + (hi - lo) * k / kRootScan;
        const double cur = g(x);
        if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0) || (cur == 0.0 && k < kRootScan)) ++changes;
        prev = cur;
    }
    return changes;
}

[[noreturn]] void throw_shock(double eta, double tau, const std::string& why) {
    std::ostringstream msg;
    msg << "characteristics cross at eta = " << eta << ", tau = " << tau << " (" << why << ")";
    throw Error(ErrorKind::shock_detected, msg.str());
}

[[noreturn]] void throw_horizon(double eta, double zeta) {
    std::ostringstream msg;
    msg << "no xi for eta = " << eta << ", zeta = " << zeta << ": remaining pulse energy is exhausted";
    throw Error(ErrorKind::adiabaticity_horizon, msg.str());
}

double cos4_factor(double psi) {
    const double c = std::cos(psi);
    return c * c * c * c * (2.0 - std::cos(2.0 * psi));
}

}  // namespace

EntranceProfile::EntranceProfile(PulseEnvelope pump, PulseEnvelope stokes, double delta)
    : pump_(std::move(pump)), stokes_(std::move(stokes)), delta_(delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_config, "analytic solution requires delta > 0");
}

EntranceProfile EntranceProfile::from_config(const SimulationConfig& config) {
    config.validate();
    return EntranceProfile(pump_envelope(config), stokes_envelope(config), config.delta);
}

double EntranceProfile::omega_sq(double t) const { return std::norm(pump_.value(t)) + std::norm(stokes_.value(t)); }

double EntranceProfile::omega(double t) const { return std::sqrt(omega_sq(t)); }

double EntranceProfile::d_omega(double t) const {
    const double w = omega(t);
    if (w == 0.0) return 0.0;
    return std::real(std::conj(pump_.value(t)) * pump_.derivative(t) +
                     std::conj(stokes_.value(t)) * stokes_.derivative(t)) / w;
}

double EntranceProfile::psi(double t) const { return 0.5 * std::atan(2.0 * omega(t) / delta_); }

double EntranceProfile::d_psi(double t) const {
    const double x = 2.0 * omega(t) / delta_;
    return d_omega(t) / (delta_ * (1.0 + x * x));
}

double EntranceProfile::theta(double t) const {
    using Shape = PulseEnvelope::Shape;
    if (pump_.shape() == Shape::gaussian && stokes_.shape() == Shape::gaussian) {
        const double ap = std::abs(pump_.amplitude());
        const double as = std::abs(stokes_.amplitude());
        if (ap == 0.0) return 0.0;
        if (as == 0.0) return 0.5 * std::numbers::pi;
        const double xp = (t - pump_.center()) / pump_.width();
        const double xs = (t - stokes_.center()) / stokes_.width();
        const double log_ratio = std::log(ap / as) - xp * xp + xs * xs;
        return log_ratio > 0.0 ? 0.5 * std::numbers::pi - std::atan(std::exp(-log_ratio))
                               : std::atan(std::exp(log_ratio));
    }
    const double ap = std::abs(pump_.value(t));
    const double as = std::abs(stokes_.value(t));
    if (ap >= kFieldFloor || as >= kFieldFloor) return std::atan2(ap, as);
    // Frozen at the nearest earlier time with a defined angle, scanning the knots.
    std::vector<double> knots;
    for (const auto* env : {&pump_, &stokes_}) {
        if (env->shape() == Shape::tabulated)
            for (const auto& s : env->samples()) knots.push_back(s.first);
    }
    std::sort(knots.begin(), knots.end());
    std::optional<double> frozen;
    for (double k : knots) {
        const double kp = std::abs(pump_.value(k));
        const double ks = std::abs(stokes_.value(k));
        if (kp < kFieldFloor && ks < kFieldFloor) continue;
        if (k <= t || !frozen) frozen = std::atan2(kp, ks);
        if (k > t) break;
    }
    return frozen.value_or(0.5 * std::numbers::pi);
}

double EntranceProfile::phase_p(double t) const {
    return pump_.shape() == PulseEnvelope::Shape::gaussian ? pump_.phase() : std::arg(pump_.value(t));
}

double EntranceProfile::phase_s(double t) const {
    return stokes_.shape() == PulseEnvelope::Shape::gaussian ? stokes_.phase() : std::arg(stokes_.value(t));
}

double EntranceProfile::phi(double t) const {
    return std::remainder(phase_p(t) - phase_s(t), 2.0 * std::numbers::pi);
}

double EntranceProfile::pulse_energy_between(const PulseEnvelope& env, double a, double b) const {
    if (env.shape() == PulseEnvelope::Shape::gaussian) {
        const double amp = env.amplitude();
        const double w = env.width();
        const double scale = amp * amp * w * std::sqrt(0.5 * std::numbers::pi) * 0.5;
        const double k = std::numbers::sqrt2 / w;
        return scale * erf_difference(k * (a - env.center()), k * (b - env.center()));
    }
    return tabulated_energy_before(env, b) - tabulated_energy_before(env, a);
}

double EntranceProfile::energy_between(double a, double b) const {
    return pulse_energy_between(pump_, a, b) + pulse_energy_between(stokes_, a, b);
}

double EntranceProfile::energy_before(double t) const {
    return energy_between(-std::numeric_limits<double>::infinity(), t);
}

double EntranceProfile::energy_after(double t) const {
    return energy_between(t, std::numeric_limits<double>::infinity());
}

double EntranceProfile::total_energy() const {
    const double inf = std::numeric_limits<double>::infinity();
    return energy_between(-inf, inf);
}

std::pair<double, double> EntranceProfile::support() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* env : {&pump_, &stokes_}) {
        if (env->peak() == 0.0) continue;
        if (env->shape() == PulseEnvelope::Shape::gaussian) {
            const double a2 = env->amplitude() * env->amplitude();
            const double reach = env->width() * std::sqrt(0.5 * std::log(a2 / kNegligibleIntensity));
            lo = std::min(lo, env->center() - reach);
            hi = std::max(hi, env->center() + reach);
        } else {
            lo = std::min(lo, env->samples().front().first);
            hi = std::max(hi, env->samples().back().first);
        }
    }
    if (lo > hi) return {0.0, 0.0};
    return {lo, hi};
}

double EntranceProfile::peak_rabi() const { return std::max(pump_.peak(), stokes_.peak()); }

ZetaSolution solve_zeta(double eta, double tau, const EntranceProfile& profile) {
    if (eta == 0.0) return {tau, 1.0, false};
    const double delta = profile.delta();
    const double c = eta * kCoupling / (delta * delta);
    auto a = [&](double z) {
        const double x = std::cos(2.0 * profile.psi(z));
        return x * x * x;
    };
    auto g = [&](double z) { return z - tau + c * a(z); };
    auto dg = [&](double z) {
        const double p = profile.psi(z);
        const double c2 = std::cos(2.0 * p);
        return 1.0 - 6.0 * c * profile.d_psi(z) * c2 * c2 * std::sin(2.0 * p);
    };
    const double lo = tau - c;
    const double hi = tau;
    if (count_sign_changes(g, lo, hi) > 1) throw_shock(eta, tau, "multiple roots for zeta");
    // Locate the (single) sign change.
    double a_lo = lo;
    double a_hi = hi;
    double prev = g(lo);
    if (prev == 0.0) a_hi = lo;
    for (int k = 1; k <= kRootScan && a_hi != a_lo; ++k) {
        const double x = lo + (hi - lo) * k / kRootScan;
        const double cur = g(x);
        if (prev <= 0.0 && cur >= 0.0) {
            a_lo = lo + (hi - lo) * (k - 1) / kRootScan;
            a_hi = x;
            break;
        }
        prev = cur;
    }
    const double zeta = a_hi == a_lo ? a_lo : bracketed_root(g, dg, a_lo, a_hi, 1e-14);
    ZetaSolution out{zeta, dg(zeta), false};
    if (!(out.denominator > 0.0)) throw_shock(eta, tau, "non-positive stretch denominator");
    out.near_shock = out.denominator < kShockWarning;
    return out;
}

double solve_xi(double eta, double zeta, const EntranceProfile& profile) {
    if (eta == 0.0) return zeta;
    const double rhs = kCoupling * eta * cos4_factor(profile.psi(zeta));
    const double available = profile.energy_after(zeta);
    if (!(available > rhs)) throw_horizon(eta, zeta);
    auto f = [&](double x) { return profile.energy_between(zeta, x) - rhs; };
    auto df = [&](double x) { return profile.omega_sq(x); };
    double hi = std::max(profile.support().second, zeta + 1.0);
    int expansions = 0;
    while (f(hi) <= 0.0) {
        hi = zeta + 2.0 * (hi - zeta);
        if (++expansions > 200) throw_horizon(eta, zeta);
    }
    const double tol = 1e-12 * std::max(profile.total_energy(), std::numeric_limits<double>::min());
    return bracketed_root(f, df, zeta, hi, tol);
}

CharacteristicPoint analytic_point(double eta, double tau, const EntranceProfile& profile) {
    const ZetaSolution z = solve_zeta(eta, tau, profile);
    const double xi = solve_xi(eta, z.zeta, profile);
    CharacteristicPoint p;
    p.eta = eta;
    p.tau = tau;
    p.zeta = z.zeta;
    p.xi = xi;
    p.near_shock = z.near_shock;
    p.psi = profile.psi(z.zeta);
    p.theta = profile.theta(xi);
    p.phi = profile.phi(xi);
    const double omega = profile.omega(z.zeta);
    p.omega_p = std::polar(omega * std::sin(p.theta), profile.phase_p(xi));
    p.omega_s = std::polar(omega * std::cos(p.theta), profile.phase_s(xi));
    const double cp = std::cos(p.psi);
    const double sp = std::sin(p.psi);
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    p.p1 = cp * cp * st * st;
    p.p2 = sp * sp;
    p.p3 = cp * cp * ct * ct;
    return p;
}

StretchFactors stretch_factors(double eta, double tau, const EntranceProfile& profile) {
    const ZetaSolution z = solve_zeta(eta, tau, profile);
    const double xi = solve_xi(eta, z.zeta, profile);
    StretchFactors out;
    out.dzeta_dtau = 1.0 / z.denominator;
    const double w_zeta = profile.omega_sq(z.zeta);
    const double w_xi = profile.omega_sq(xi);
    const double p = profile.psi(z.zeta);
    const double s = std::sin(p);
    const double c = std::cos(p);
    // d/dψ [cos⁴ψ (2 − cos2ψ)] = −12 cos³ψ sin³ψ
    const double rhs_slope = -12.0 * kCoupling * eta * c * c * c * s * s * s * profile.d_psi(z.zeta);
    const double inf = std::numeric_limits<double>::infinity();
    out.dxi_dtau = w_xi > 0.0 ? out.dzeta_dtau * (w_zeta + rhs_slope) / w_xi : inf;
    out.scale = w_xi > 0.0 ? w_zeta / w_xi : inf;
    return out;
}

std::optional<double> tau_max_at(double eta, const EntranceProfile& profile) {
    if (eta <= 0.0) return std::nullopt;
    const double target = kCoupling * eta;
    if (!(profile.total_energy() > target)) return std::nullopt;
    auto [lo, hi] = profile.support();
    auto f = [&](double t) { return target - profile.energy_after(t); };  // increasing in t
    auto df = [&](double t) { return profile.omega_sq(t); };
    while (f(lo) > 0.0) lo -= 1.0 + std::abs(lo);
    while (f(hi) < 0.0) hi += 1.0 + std::abs(hi);
    return bracketed_root(f, df, lo, hi, 1e-13 * target);
}

LimitsReport limits(const SimulationConfig& config, const EntranceProfile& profile) {
    const double q = kCoupling;
    const double length = config.length;
    const double delta = profile.delta();
    LimitsReport r;
    r.eta_max = profile.total_energy() / q;
    r.tau_max_unbounded = length == 0.0;
    r.tau_max = tau_max_at(length, profile);

    // Scan ψ0 over the window.
    const int samples = std::max(config.n_tau, 2001);
    double psi_peak = 0.0;
    double shock = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = config.tau_window.min + (config.tau_window.max - config.tau_window.min) * i / (samples - 1);
        const double p = profile.psi(t);
        psi_peak = std::max(psi_peak, p);
        const double c2 = std::cos(2.0 * p);
        shock = std::max(shock, 6.0 * p * std::tan(2.0 * p) * c2 * c2 * c2);
    }
    const double c2 = std::cos(2.0 * psi_peak);
    r.tau_delay_small_angle = q * length / (delta * delta);
    r.tau_delay_medium = r.tau_delay_small_angle * c2 * c2 * c2;
    r.shock_ratio = shock * r.tau_delay_small_angle;

    const double omega_max = profile.peak_rabi();
    r.shock_ratio_small_angle = 12.0 * q * length * (omega_max / delta) * (omega_max / delta) / (delta * delta);
    r.reshaping_ratio = omega_max > 0.0 ? q * length / (omega_max * omega_max)
                                        : (length > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    const double psi_max = 0.5 * std::atan(2.0 * omega_max / delta);
    r.abs_delta_t = std::abs(delta);
    r.stark_ratio = omega_max * omega_max / std::abs(delta);
    r.loss_ratio = config.gamma * psi_max * psi_max;
    r.loss_ratio_small_angle = config.gamma * (omega_max / delta) * (omega_max / delta);
    return r;
}

LimitsReport limits(const SimulationConfig& config) { return limits(config, EntranceProfile::from_config(config)); }

CharacteristicSpeeds lambda_medium_speeds(double delta) {
    const double q = kCoupling;
    const double d2 = delta * delta;
    CharacteristicSpeeds s;
    s.a = [=](double psi) {
        const double c = std::cos(2.0 * psi);
        return q / d2 * c * c * c;
    };
    s.a_prime = [=](double psi) {
        const double c = std::cos(2.0 * psi);
        return -6.0 * q / d2 * c * c * std::sin(2.0 * psi);
    };
    s.b = [=](double psi) {
        const double omega = 0.5 * delta * std::tan(2.0 * psi);
        const double c = std::cos(psi);
        return q * c * c / (omega * omega);
    };
    return s;
}

ZetaXi general_characteristics(const CharacteristicSpeeds& speeds, const EntranceProfile& profile, double eta,
                               double tau) {
    if (eta == 0.0) return {tau, tau};
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;

    // ζ = τ − η a(ψ0(ζ))
    auto g = [&](double z) { return z - tau + eta * speeds.a(profile.psi(z)); };
    auto dg = [&](double z) { return 1.0 + eta * speeds.a_prime(profile.psi(z)) * profile.d_psi(z); };
    const double hi_z = tau;
    double reach = std::max(eta * speeds.a(profile.psi(tau)), 1e-12);
    while (g(tau - reach) > 0.0) reach *= 2.0;
    const double lo_z = tau - reach;
    if (count_sign_changes(g, lo_z, hi_z) > 1) throw_shock(eta, tau, "multiple roots for zeta");
    const double zeta = bracketed_root(g, dg, lo_z, hi_z, 1e-14);
    if (!(dg(zeta) > 0.0)) throw_shock(eta, tau, "non-positive stretch denominator");

    const double psi_ref = profile.psi(zeta);
    auto inv_speed = [&](double psi) { return 1.0 / (speeds.a(psi) + speeds.b(psi)); };
    auto exponent = [&](double psi) {
        if (psi == psi_ref) return 0.0;
        auto f = [&](double p) { return speeds.a_prime(p) * inv_speed(p); };
        return gauss<double, 30>::integrate(f, psi_ref, psi);
    };
    auto weight = [&](double z) {
        const double p = profile.psi(z);
        const double inv = inv_speed(p);
        return inv == 0.0 ? 0.0 : inv * std::exp(exponent(p));
    };
    // Depth is capped: near steep fronts the relative target can be out of reach and
    // unbounded bisection costs seconds for no gain in the root.
    auto integrate = [&](double a, double b) {
        if (a == b) return 0.0;
        return gauss_kronrod<double, 31>::integrate(weight, a, b, 8, 1e-10);
    };

    const double end = std::max(profile.support().second, zeta);
    // Accumulate s over the support in pieces so the adaptive rule sees the pulse structure.
    double lo = zeta;
    double s_lo = 0.0;
    double hi = end;
    double s_hi = 0.0;
    {
        const int pieces = 64;
        double prev = zeta;
        double acc = 0.0;
        bool found = false;
        for (int k = 1; k <= pieces; ++k) {
            const double x = zeta + (end - zeta) * k / pieces;
            const double next = acc + integrate(prev, x);
            if (next >= eta) {
                lo = prev;
                s_lo = acc;
                hi = x;
                s_hi = next;
                found = true;
                break;
            }
            acc = next;
            prev = x;
        }
        if (!found) {
            // Past the support ψ0 is constant, so s grows linearly if the speed stays finite.
            const double w_end = weight(end);
            if (!(w_end > 0.0)) throw_horizon(eta, zeta);
            return {zeta, end + (eta - acc) / w_end};
        }
    }
    (void)s_hi;
    // Newton-bisection on s(x) − η with s(x) = s_lo + ∫_lo^x w.
    double a = lo;
    double sa = s_lo;
    double b = hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double sx = sa + integrate(a, x);
        const double fx = sx - eta;
        if (std::abs(fx) <= 1e-11 * eta) break;
        if (fx < 0.0) {
            a = x;
            sa = sx;
        } else {
            b = x;
        }
        if (b - a <= 1e-13 * std::max(1.0, std::abs(x))) break;
        const double w = weight(x);
        double next = w > 0.0 ? x - fx / w : a - 1.0;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        x = next;
    }
    return {zeta, x};
}

}  // namespace lambdaprop
