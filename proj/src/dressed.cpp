#include "lambdaprop/dressed.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lambdaprop {

namespace {

double wrap_phase(double x) {
    x = std::remainder(x, 2.0 * std::numbers::pi);
    if (x <= -std::numbers::pi) x += 2.0 * std::numbers::pi;
    return x;
}

double ratio_or_inf(double num, double den) {
    return den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
}

}  // namespace

Eigen::Matrix3cd hamiltonian(cplx omega_p, cplx omega_s, double delta, double gamma) {
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(0, 1) = -std::conj(omega_p);
    h(1, 0) = -omega_p;
    h(1, 1) = cplx(delta, -0.5 * gamma);
    h(1, 2) = -omega_s;
    h(2, 1) = -std::conj(omega_s);
    return h;
}

MixingAngles mixing_angles(cplx omega_p, cplx omega_s, double delta) {
    const double ap = std::abs(omega_p);
    const double as = std::abs(omega_s);
    if (ap < kFieldFloor && as < kFieldFloor)
        throw Error(ErrorKind::degenerate_angles, "both fields vanish; theta is undefined");
    const double omega = std::hypot(ap, as);
    if (omega == 0.0 && delta == 0.0) throw Error(ErrorKind::degenerate_angles, "psi undefined at Omega = Delta = 0");
    MixingAngles angles;
    angles.theta = std::atan2(ap, as);
    angles.psi = 0.5 * std::atan2(2.0 * omega, delta);
    angles.phi_rel = wrap_phase(std::arg(omega_p) - std::arg(omega_s));
    return angles;
}

std::array<double, 2> bright_eigenvalues(double omega_gen, double delta) {
    const double omega_sq = omega_gen * omega_gen;
    const double root = std::hypot(2.0 * omega_gen, delta);
    if (root == 0.0) return {0.0, 0.0};
    if (delta >= 0.0) {
        const double upper = 0.5 * (delta + root);
        return {-omega_sq / upper, upper};
    }
    const double lower = 0.5 * (delta - root);
    return {lower, -omega_sq / lower};
}

DressedFrame dressed_frame(cplx omega_p, cplx omega_s, double delta, std::optional<double> frozen_theta) {
    DressedFrame frame;
    const double ap = std::abs(omega_p);
    const double as = std::abs(omega_s);
    frame.omega_gen = std::hypot(ap, as);
    if (ap < kFieldFloor && as < kFieldFloor) {
        if (!frozen_theta) throw Error(ErrorKind::degenerate_angles, "both fields vanish and no previous theta");
        frame.theta = *frozen_theta;
    } else {
        frame.theta = std::atan2(ap, as);
    }
    if (frame.omega_gen == 0.0 && delta == 0.0)
        throw Error(ErrorKind::degenerate_angles, "psi undefined at Omega = Delta = 0");
    frame.psi = 0.5 * std::atan2(2.0 * frame.omega_gen, delta);
    frame.phi_p = std::arg(omega_p);
    frame.phi_s = std::arg(omega_s);
    frame.phi_rel = wrap_phase(frame.phi_p - frame.phi_s);
    const auto [b1, b2] = bright_eigenvalues(frame.omega_gen, delta);
    frame.lambda_b1 = b1;
    frame.lambda_b2 = b2;
    frame.lambda_d = 0.0;
    return frame;
}

Eigen::Vector3cd bright1_vector(const DressedFrame& f) {
    const double cp = std::cos(f.psi);
    return {cp * std::sin(f.theta) * std::polar(1.0, -f.phi_p), cplx(std::sin(f.psi), 0.0),
            cp * std::cos(f.theta) * std::polar(1.0, -f.phi_s)};
}

Eigen::Vector3cd bright2_vector(const DressedFrame& f) {
    const double sp = std::sin(f.psi);
    return {sp * std::sin(f.theta) * std::polar(1.0, -f.phi_p), cplx(-std::cos(f.psi), 0.0),
            sp * std::cos(f.theta) * std::polar(1.0, -f.phi_s)};
}

Eigen::Vector3cd dark_vector(const DressedFrame& f) {
    return {std::cos(f.theta) * std::polar(1.0, -f.phi_p), cplx(0.0, 0.0),
            -std::sin(f.theta) * std::polar(1.0, -f.phi_s)};
}

Eigensystem eigensystem(cplx omega_p, cplx omega_s, double delta, std::optional<double> frozen_theta) {
    const DressedFrame frame = dressed_frame(omega_p, omega_s, delta, frozen_theta);
    Eigensystem sys;
    sys.values = {frame.lambda_b1, frame.lambda_b2, frame.lambda_d};
    sys.vectors.col(0) = bright1_vector(frame);
    sys.vectors.col(1) = bright2_vector(frame);
    sys.vectors.col(2) = dark_vector(frame);
    return sys;
}

DressedProjections project_dressed(const AtomicState& state, const DressedFrame& frame) {
    const Eigen::Vector3cd v = state.vector();
    return {std::norm(bright1_vector(frame).dot(v)), std::norm(bright2_vector(frame).dot(v)),
            std::norm(dark_vector(frame).dot(v))};
}

AdiabaticityMetrics adiabaticity_metrics(const FieldSample& s, double delta, double gamma,
                                         double interaction_time) {
    const double t = interaction_time;
    const double ap = std::abs(s.omega_p);
    const double as = std::abs(s.omega_s);
    const double omega_sq = ap * ap + as * as;
    const double omega = std::sqrt(omega_sq);
    const MixingAngles angles = mixing_angles(s.omega_p, s.omega_s, delta);

    // d|Ω| = Re(Ω* Ω')/|Ω|, dφ = Im(Ω* Ω')/|Ω|².
    auto amp_rate = [](cplx w, cplx dw) { return std::abs(w) > 0.0 ? std::real(std::conj(w) * dw) / std::abs(w) : std::abs(dw); };
    auto phase_rate = [](cplx w, cplx dw) { return std::norm(w) > 0.0 ? std::imag(std::conj(w) * dw) / std::norm(w) : 0.0; };
    const double dap = amp_rate(s.omega_p, s.d_omega_p);
    const double das = amp_rate(s.omega_s, s.d_omega_s);
    const double dphi_p = phase_rate(s.omega_p, s.d_omega_p);
    const double dphi_s = phase_rate(s.omega_s, s.d_omega_s);
    const double dtheta = omega_sq > 0.0 ? (as * dap - ap * das) / omega_sq : 0.0;
    const double domega = omega > 0.0 ? (ap * dap + as * das) / omega : 0.0;
    const double x = 2.0 * omega / delta;
    const double dpsi = delta != 0.0 ? domega / (delta * (1.0 + x * x)) : 0.0;

    const auto [lb1, lb2] = bright_eigenvalues(omega, delta);
    const double st = std::sin(angles.theta);
    const double ct = std::cos(angles.theta);

    // |i a − b| = hypot(a, b) for real a, b.
    const double coupling_d = std::hypot(dtheta, (dphi_p - dphi_s) * ct * st) * std::abs(std::cos(angles.psi));
    const double coupling_b = std::hypot(dpsi, 0.5 * (dphi_p * st * st + dphi_s * ct * ct) * std::sin(2.0 * angles.psi));

    AdiabaticityMetrics m;
    m.abs_delta_t = std::abs(delta) * t;
    m.stark_ratio = delta != 0.0 ? omega_sq * t / std::abs(delta) : std::numeric_limits<double>::infinity();
    m.loss_ratio = gamma * t * angles.psi * angles.psi;
    m.loss_ratio_small_angle =
        delta != 0.0 ? gamma * t * omega_sq / (delta * delta) : std::numeric_limits<double>::infinity();
    m.bright_dark_ratio = ratio_or_inf(std::abs(lb1), coupling_d);
    m.bright_bright_ratio = ratio_or_inf(std::abs(lb1 - lb2), coupling_b);
    return m;
}

}  // namespace lambdaprop
