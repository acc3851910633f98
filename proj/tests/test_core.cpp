#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lambdaprop/core.hpp"
#include "lambdaprop/error.hpp"

using namespace lambdaprop;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::io;
}

}  // namespace

TEST(Grid, ThreeTauNodes) {
    SimulationConfig c;
    c.n_tau = 3;
    c.tau_window = {-1.0, 1.0};
    const Grid g = build_grid(c);
    ASSERT_EQ(g.tau.size(), 3u);
    EXPECT_DOUBLE_EQ(g.tau[0], -1.0);
    EXPECT_DOUBLE_EQ(g.tau[1], 0.0);
    EXPECT_DOUBLE_EQ(g.tau[2], 1.0);
}

TEST(Grid, SingleEtaStep) {
    SimulationConfig c;
    c.n_eta = 1;
    c.length = 5.0;
    const Grid g = build_grid(c);
    ASSERT_EQ(g.eta.size(), 2u);
    EXPECT_DOUBLE_EQ(g.eta[0], 0.0);
    EXPECT_DOUBLE_EQ(g.eta[1], 5.0);
}

TEST(Grid, RejectsSingleTauNode) {
    SimulationConfig c;
    c.n_tau = 1;
    EXPECT_EQ(kind_of([&] { build_grid(c); }), ErrorKind::invalid_config);
}

TEST(Grid, DefaultEtaResolutionFollowsLength) {
    SimulationConfig c;
    c.length = 2.35;
    EXPECT_EQ(c.eta_steps(), 24);
    c.length = 0.0;
    EXPECT_EQ(c.eta_steps(), 1);
}

TEST(Grid, SpacingReconstructsWindow) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lo(-20.0, 0.0), width(0.1, 40.0);
    std::uniform_int_distribution<int> points(2, 5000);
    for (int i = 0; i < 200; ++i) {
        SimulationConfig c;
        c.tau_window.min = lo(rng);
        c.tau_window.max = c.tau_window.min + width(rng);
        c.n_tau = points(rng);
        const Grid g = build_grid(c);
        const double extent = g.d_tau() * (c.n_tau - 1);
        EXPECT_NEAR(extent, c.tau_window.max - c.tau_window.min, 1e-12 * (1.0 + extent));
        EXPECT_EQ(g.tau.front(), c.tau_window.min);
        EXPECT_EQ(g.tau.back(), c.tau_window.max);
    }
}

TEST(Config, InvariantsRejected) {
    auto bad = [](auto mutate) {
        SimulationConfig c;
        mutate(c);
        return kind_of([&] { c.validate(); });
    };
    EXPECT_EQ(bad([](SimulationConfig& c) { c.t_p = 0.0; }), ErrorKind::invalid_config);
    EXPECT_EQ(bad([](SimulationConfig& c) { c.t_s = -1.0; }), ErrorKind::invalid_config);
    EXPECT_EQ(bad([](SimulationConfig& c) { c.n_eta = 0; }), ErrorKind::invalid_config);
    EXPECT_EQ(bad([](SimulationConfig& c) { c.tau_window = {1.0, 1.0}; }), ErrorKind::invalid_config);
    EXPECT_EQ(bad([](SimulationConfig& c) { c.gamma = -0.1; }), ErrorKind::invalid_config);
    EXPECT_EQ(bad([](SimulationConfig& c) { c.delta = std::nan(""); }), ErrorKind::invalid_config);
    SimulationConfig ok;
    EXPECT_NO_THROW(ok.validate());
}

TEST(Envelope, GaussianPeakAtCenter) {
    const auto g = PulseEnvelope::gaussian(37.5, 0.4, 0.9);
    EXPECT_DOUBLE_EQ(g.value(0.4).real(), 37.5);
    EXPECT_DOUBLE_EQ(g.peak(), 37.5);
}

TEST(Envelope, GaussianForm) {
    const auto g = PulseEnvelope::gaussian(2.0, -1.0, 0.5, 0.3);
    const double t = 0.2;
    const cplx expected = 2.0 * std::exp(-std::pow((t + 1.0) / 0.5, 2)) * std::polar(1.0, 0.3);
    EXPECT_NEAR(std::abs(g.value(t) - expected), 0.0, 1e-15);
    const double h = 1e-6;
    const cplx fd = (g.value(t + h) - g.value(t - h)) / (2.0 * h);
    EXPECT_NEAR(std::abs(g.derivative(t) - fd), 0.0, 1e-7);
}

TEST(Envelope, GaussianSymmetric) {
    const auto g = PulseEnvelope::gaussian(108.6, -0.7, 0.8);
    for (double x = 0.0; x < 4.0; x += 0.0173) {
        // The two arguments are themselves rounded, so equality holds to a few ulps.
        const double a = std::abs(g.value(-0.7 + x));
        const double b = std::abs(g.value(-0.7 - x));
        EXPECT_NEAR(a, b, 1e-13 * 108.6) << x;
    }
}

TEST(Envelope, ExperimentPumpPeak) {
    SimulationConfig c;
    c.omega_p_max = 108.6;
    c.omega_s_max = 110.5;
    c.tau_delay = 1.4;
    c.t_p = 0.8;
    EXPECT_DOUBLE_EQ(pump_envelope(c).value(-0.7).real(), 108.6);
    EXPECT_DOUBLE_EQ(stokes_envelope(c).value(0.7).real(), 110.5);
}

TEST(Envelope, TabulatedInterpolatesAndVanishesOutside) {
    std::vector<std::pair<double, cplx>> s;
    for (int i = 0; i <= 200; ++i) {
        const double t = -2.0 + 0.02 * i;
        s.emplace_back(t, cplx(std::exp(-t * t), 0.0));
    }
    const auto env = PulseEnvelope::tabulated(s);
    EXPECT_NEAR(env.value(0.01).real(), 0.5 * (1.0 + std::exp(-0.0004)), 1e-15);
    EXPECT_EQ(env.value(-3.0), cplx(0.0));
    EXPECT_EQ(env.value(2.5), cplx(0.0));
    EXPECT_NEAR(env.peak(), 1.0, 1e-15);
}

TEST(Envelope, TabulatedKinkRejected) {
    std::vector<std::pair<double, cplx>> s;
    for (int i = 0; i <= 100; ++i) {
        const double t = -1.0 + 0.02 * i;
        s.emplace_back(t, cplx(1.0 - std::abs(t), 0.0));
    }
    EXPECT_EQ(kind_of([&] { PulseEnvelope::tabulated(s); }), ErrorKind::invalid_config);
}

TEST(Envelope, TabulatedNeedsIncreasingTimes) {
    std::vector<std::pair<double, cplx>> s{{0.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}};
    EXPECT_EQ(kind_of([&] { PulseEnvelope::tabulated(s); }), ErrorKind::invalid_config);
}

TEST(Entrance, RealForZeroPhases) {
    SimulationConfig c;
    const auto f = entrance_fields(c);
    ASSERT_EQ(f.pump.size(), static_cast<std::size_t>(c.n_tau));
    for (std::size_t i = 0; i < f.pump.size(); ++i) {
        EXPECT_EQ(f.pump[i].imag(), 0.0);
        EXPECT_EQ(f.stokes[i].imag(), 0.0);
        EXPECT_DOUBLE_EQ(f.omega_sq(i), std::norm(f.pump[i]) + std::norm(f.stokes[i]));
    }
}

TEST(Entrance, ConstantPhases) {
    SimulationConfig c;
    c.phase_p = 0.7;
    c.phase_s = -1.1;
    const auto f = entrance_fields(c);
    for (std::size_t i = 0; i < f.pump.size(); ++i) {
        if (std::abs(f.pump[i]) > 1e-200) {
            EXPECT_NEAR(std::arg(f.pump[i]), 0.7, 1e-14);
        }
        if (std::abs(f.stokes[i]) > 1e-200) {
            EXPECT_NEAR(std::arg(f.stokes[i]), -1.1, 1e-14);
        }
    }
}

TEST(Entrance, EdgeAmplitudeChecked) {
    SimulationConfig c;
    c.tau_window = {-2.0, 6.0};
    EXPECT_EQ(kind_of([&] { entrance_fields(c); }), ErrorKind::edge_amplitude_too_large);
    c.tau_window = {-5.0, 2.0};
    EXPECT_EQ(kind_of([&] { entrance_fields(c); }), ErrorKind::edge_amplitude_too_large);
}

TEST(Entrance, ZeroPulsesAllowed) {
    SimulationConfig c;
    c.omega_p_max = 0.0;
    c.omega_s_max = 0.0;
    const auto f = entrance_fields(c);
    for (std::size_t i = 0; i < f.pump.size(); ++i) EXPECT_EQ(f.omega_sq(i), 0.0);
}

TEST(Errors, MessageCarriesKindName) {
    const Error e(ErrorKind::shock_detected, "x");
    EXPECT_EQ(std::string(e.what()).rfind("ShockDetected", 0), 0u);
    EXPECT_EQ(to_string(ErrorKind::adiabaticity_horizon), "AdiabaticityHorizon");
}
