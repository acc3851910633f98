// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lambdaprop/analysis.hpp"
#include "lambdaprop/characteristics.hpp"
#include "lambdaprop/cli.hpp"
#include "lambdaprop/dressed.hpp"
#include "lambdaprop/error.hpp"
#include "lambdaprop/numeric.hpp"

using namespace lambdaprop;

namespace {

struct Report {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? " ok" : " FAILED");
    }
};

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::size_t slice_at(const FieldGrid& f, double eta) {
    const auto& e = f.eta();
    const auto it = std::min_element(e.begin(), e.end(),
                                     [&](double a, double b) { return std::abs(a - eta) < std::abs(b - eta); });
    return static_cast<std::size_t>(it - e.begin());
}

double final_p3(const Propagation& run, std::size_t n) { return std::norm(run.states.slice(n).back().a3); }

double max_norm_drift(const Propagation& run) {
    double drift = 0.0;
    for (std::size_t n = 0; n < run.fields.n_eta(); ++n) {
        for (const auto& s : run.states.slice(n)) drift = std::max(drift, std::abs(s.norm() - 1.0));
    }
    return drift;
}

SimulationConfig entrance_case() { return SimulationConfig{}; }

SimulationConfig experiment(double length) {
    SimulationConfig c;
    c.omega_p_max = 108.6;
    c.omega_s_max = 110.5;
    c.tau_delay = 1.4;
    c.t_p = 0.8;
    c.delta = 50.0;
    c.length = length;
    return c;
}

SimulationConfig horizon_case() {
    SimulationConfig c;
    c.delta = 50.0;
    c.length = 7.0;
    return c;
}

SimulationConfig long_medium(double gamma = 0.0) {
    SimulationConfig c;
    c.length = 100.0;
    c.gamma = gamma;
    return c;
}

SimulationConfig weak_fields(double length) {
    SimulationConfig c;
    c.omega_p_max = 20.0;
    c.omega_s_max = 20.0;
    c.tau_delay = 1.0;
    c.delta = 40.0;
    c.length = length;
    return c;
}

Report entrance_dynamics() {
    Report r;
    const auto run = propagate(entrance_case());
    double peak_p2 = 0.0;
    for (const auto& s : run.states.slice(0)) peak_p2 = std::max(peak_p2, std::norm(s.a2));
    const double p3 = final_p3(run, 0);
    r.check(p3 > 0.99, "final P3 " + num(p3, 6) + " > 0.99");
    r.check(peak_p2 < 0.02, "max P2 " + num(peak_p2) + " < 0.02");
    return r;
}

Report experiment_transfer() {
    Report r;
    const auto run = propagate(experiment(5.0));
    double p3_at_two = 0.0;
    for (double x : {0.0, 2.0, 4.0}) {
        const double p3 = final_p3(run, slice_at(run.fields, x));
        if (x == 2.0) p3_at_two = p3;
        r.check(p3 > 0.99, "P3(" + num(x) + ") " + num(p3, 6) + " > 0.99");
    }
    const std::size_t last = slice_at(run.fields, 5.0);
    const double p3_five = final_p3(run, last);
    r.check(p3_five < p3_at_two - 0.02, "P3(5) " + num(p3_five, 6) + " < P3(2) - 0.02");
    const double max_pd = dressed_series(run)[last].max_pd;
    r.check(max_pd > 0.05, "max Pd(5) " + num(max_pd) + " > 0.05");
    return r;
}

Report horizon() {
    Report r;
    const auto config = horizon_case();
    const auto lim = limits(config);
    const double tau_max = lim.tau_max.value_or(std::nan(""));
    r.check(tau_max >= 2.2 && tau_max <= 2.45, "tau_max " + num(tau_max) + " in [2.2, 2.45]");

    const auto run = propagate(config);
    const std::size_t n = run.fields.n_eta() - 1;
    const auto& tau = run.fields.tau();
    const auto summary = compare(run);
    const auto stop = summary[n].horizon_tau;
    const bool stopped_by_horizon = stop.has_value() && summary[n].analytic_error == "AdiabaticityHorizon";

    // The surge is where the numeric dark population rises fastest.
    const auto pd = dressed_series(run)[n].pd;
    std::size_t surge = 1;
    double steepest = -1.0;
    for (std::size_t j = 1; j + 1 < pd.size(); ++j) {
        const double slope = (pd[j + 1] - pd[j - 1]) / (tau[j + 1] - tau[j - 1]);
        if (slope > steepest) {
            steepest = slope;
            surge = j;
        }
    }
    const double gap = stop ? std::abs(*stop - tau[surge]) : std::nan("");
    r.check(stopped_by_horizon && gap <= 0.15,
            "horizon at " + (stop ? num(*stop) : std::string("none")) + " vs Pd surge at " + num(tau[surge]) +
                " within 0.15");

    const auto analytic = analytic_p3_series(config.length, tau, EntranceProfile::from_config(config));
    double sup = 0.0;
    for (std::size_t j = 0; j < tau.size() && tau[j] < tau_max - 0.3; ++j) {
        if (!analytic.p3[j]) {
            sup = std::numeric_limits<double>::infinity();
            break;
        }
        sup = std::max(sup, std::abs(std::norm(run.states.at(n, j).a3) - *analytic.p3[j]));
    }
    r.check(sup < 0.05, "P3 sup before tau_max - 0.3 " + num(sup) + " < 0.05");
    return r;
}

Report long_distance() {
    Report r;
    const auto run = propagate(long_medium());
    const std::size_t n = run.fields.n_eta() - 1;
    const double p3 = final_p3(run, n);
    r.check(std::abs(p3 - 0.99) <= 0.01, "final P3 " + num(p3, 6) + " = 0.99 +- 0.01");
    const double ratio = limits(long_medium()).reshaping_ratio;
    r.check(std::abs(ratio - 0.01) < 1e-12, "reshaping_ratio " + num(ratio, 6) + " = 0.0100");
    const double tail = pump_tail_fraction(run.fields.tau(), run.fields.pump_slice(n), run.fields.stokes_slice(n));
    r.check(tail > 0.05, "exit pump tail fraction " + num(tail) + " > 0.05");
    return r;
}

Report loss_study() {
    Report r;
    auto exit_p3 = [](double gamma) {
        const auto run = propagate(long_medium(gamma));
        return final_p3(run, run.fields.n_eta() - 1);
    };
    const double lossless = exit_p3(0.0);
    const double drop_small = 100.0 * (lossless - exit_p3(0.1));
    const double drop_large = 100.0 * (lossless - exit_p3(0.5));
    r.check(drop_small < 0.5, "Gamma 0.1 drop " + num(drop_small) + " pp < 0.5");
    r.check(drop_large < 3.0, "Gamma 0.5 drop " + num(drop_large) + " pp < 3");
    return r;
}

Report reshaping() {
    Report r;
    const auto run = propagate(weak_fields(50.0));
    const double p3_ten = final_p3(run, slice_at(run.fields, 10.0));
    r.check(p3_ten < 0.99, "P3(z=10) " + num(p3_ten) + " < 0.99");
    const auto rep = detect_reshaping(run.fields);
    r.check(rep.max_pump_peaks() >= 2, "max pump peaks " + std::to_string(rep.max_pump_peaks()) + " >= 2");
    const bool entrance_ok = !rep.slices.front().order_broken;
    const bool broken_late = rep.slices.back().order_broken;
    r.check(entrance_ok && broken_late, "pulse order intuitive at z=0 and broken at z=50");
    return r;
}

Report property_suites() {
    Report r;

    // Norm conservation on the longest lossless runs of the other criteria.
    const double drift = std::max({max_norm_drift(propagate(experiment(5.0))), max_norm_drift(propagate(long_medium())),
                                   max_norm_drift(propagate(weak_fields(50.0)))});
    r.check(drift <= 1e-8, "norm drift " + num(drift) + " <= 1e-8");

    // Eigen-identities.
    {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> amp(0.0, 200.0), ph(-std::numbers::pi, std::numbers::pi),
            det(-2000.0, 2000.0);
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const cplx p = std::polar(amp(rng), ph(rng)), s = std::polar(amp(rng), ph(rng));
            const double delta = det(rng);
            const auto h = hamiltonian(p, s, delta);
            const auto sys = eigensystem(p, s, delta);
            const double scale = h.norm();
            const double omega_sq = std::norm(p) + std::norm(s);
            worst = std::max(worst, std::abs(sys.values[0] + sys.values[1] - delta) / scale);
            worst = std::max(worst, std::abs(sys.values[0] * sys.values[1] + omega_sq) / (scale * scale));
            worst = std::max(worst, (h * sys.vectors.col(2)).norm() / scale);
        }
        r.check(worst <= 1e-12, "eigen-identities " + num(worst) + " <= 1e-12");
    }

    // Second-order convergence of the local conservation laws.
    {
        SimulationConfig c = experiment(2.0);
        std::vector<double> res;
        for (int refine : {1, 2, 4}) {
            c.n_tau = (kDefaultTauPoints - 1) * refine + 1;
            c.n_eta = 20 * refine;
            const auto run = propagate(c);
            res.push_back(conservation_residuals(run.fields, run.states).max_abs);
        }
        const double q1 = res[0] / res[1], q2 = res[1] / res[2];
        r.check(q1 > 3.0 && q1 < 5.0 && q2 > 3.0 && q2 < 5.0,
                "conservation residual halving ratios " + num(q1, 3) + ", " + num(q2, 3));
    }

    // ξ ≥ ζ and ζ ≤ τ wherever the analytic solution exists.
    {
        long violations = 0, solved = 0;
        for (SimulationConfig c : {horizon_case(), long_medium(), experiment(5.0)}) {
            c.n_eta = 10;
            for (const auto& row : analytic_table(c, EntranceProfile::from_config(c))) {
                if (!row.point) continue;
                ++solved;
                if (row.point->xi < row.point->zeta || row.point->zeta > row.tau) ++violations;
            }
        }
        r.check(violations == 0 && solved > 0,
                "xi >= zeta, zeta <= tau on " + std::to_string(solved) + " points (" + std::to_string(violations) +
                    " violations)");
    }

    // General characteristic construction against the closed-form ξ.
    {
        const auto config = entrance_case();
        const auto profile = EntranceProfile::from_config(config);
        const auto speeds = lambda_medium_speeds(config.delta);
        std::mt19937 rng(1);
        std::uniform_real_distribution<double> ue(0.0, 100.0), ut(-3.0, 3.0);
        int compared = 0;
        double worst = 0.0;
        while (compared < 100) {
            const double eta = ue(rng), tau = ut(rng);
            double xi = 0.0;
            try {
                xi = solve_xi(eta, solve_zeta(eta, tau, profile).zeta, profile);
            } catch (const Error&) {
                continue;
            }
            const auto g = general_characteristics(speeds, profile, eta, tau);
            worst = std::max(worst, std::abs(g.xi - xi) / std::max(1.0, std::abs(xi)));
            ++compared;
        }
        r.check(worst <= 1e-6, "general vs closed-form xi " + num(worst) + " <= 1e-6");
    }

    // Relative phase where both fields are noticeable (above the peak floor of their slice peak).
    {
        const auto run = propagate(long_medium());
        double worst = 0.0;
        for (std::size_t n = 0; n < run.fields.n_eta() && run.fields.eta()[n] <= 50.0 + 1e-9; ++n) {
            const auto pump = run.fields.pump_slice(n), stokes = run.fields.stokes_slice(n);
            double mp = 0.0, ms = 0.0;
            for (std::size_t j = 0; j < pump.size(); ++j) {
                mp = std::max(mp, std::abs(pump[j]));
                ms = std::max(ms, std::abs(stokes[j]));
            }
            for (std::size_t j = 0; j < pump.size(); ++j) {
                if (std::abs(pump[j]) < kPeakFloor * mp || std::abs(stokes[j]) < kPeakFloor * ms) continue;
                const double d = std::remainder(std::arg(pump[j]) - std::arg(stokes[j]), 2.0 * std::numbers::pi);
                worst = std::max(worst, std::abs(d));
            }
        }
        r.check(worst < 1e-2, "relative phase drift up to qTx 50 " + num(worst) + " < 1e-2");
    }

    // Final P3 under simultaneous halving of both steps.
    for (auto [name, config] : {std::pair{"experiment qTx 5", experiment(5.0)}, std::pair{"long medium", long_medium()}}) {
        const auto coarse = propagate(config);
        SimulationConfig fine = config;
        fine.n_tau = 2 * config.n_tau - 1;
        fine.n_eta = 2 * config.eta_steps();
        const auto refined = propagate(fine);
        const double diff = std::abs(final_p3(coarse, coarse.fields.n_eta() - 1) - final_p3(refined, refined.fields.n_eta() - 1));
        r.check(diff < 1e-4, std::string("P3 step-halving change (") + name + ") " + num(diff) + " < 1e-4");
    }
    return r;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Report (*run)();
    };
    const Criterion criteria[] = {
        {"1 entrance dynamics", entrance_dynamics}, {"2 experiment parameters", experiment_transfer},
        {"3 adiabaticity horizon", horizon},        {"4 long-distance transfer", long_distance},
        {"5 loss study", loss_study},               {"6 pulse reshaping", reshaping},
        {"7 property suites", property_suites},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Report r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << "threw: " << e.what();
        }
        if (!r.pass) ++failures;
        std::printf("%s criterion %s: %s\n", r.pass ? "PASS" : "FAIL", c.name, r.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
