#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lambdaprop/analysis.hpp"
#include "lambdaprop/error.hpp"

using namespace lambdaprop;
using std::numbers::pi;

namespace {

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

SimulationConfig weak_fields(double length) {
    SimulationConfig c;
    c.omega_p_max = 20.0;
    c.omega_s_max = 20.0;
    c.tau_delay = 1.0;
    c.delta = 40.0;
    c.length = length;
    return c;
}

std::vector<double> gaussian_bumps(std::initializer_list<std::pair<double, double>> bumps) {
    std::vector<double> v(1201);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = -6.0 + 0.01 * i;
        for (auto [center, height] : bumps) v[i] += height * std::exp(-std::pow(t - center, 2));
    }
    return v;
}

}  // namespace

TEST(SupNorm, Basics) {
    const std::vector<double> a{0.1, 0.5, 0.9}, b{0.1, 0.2, 1.0};
    EXPECT_DOUBLE_EQ(sup_norm_difference(a, b), 0.3);
    EXPECT_EQ(sup_norm_difference(a, a), 0.0);
    const std::vector<double> shorter{0.1};
    try {
        sup_norm_difference(a, shorter);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_config);
    }
}

TEST(Compare, ExperimentAtEntranceFitsAnalytic) {
    const auto s = compare(experiment(0.0));
    ASSERT_TRUE(s.front().sup_p3_difference.has_value());
    EXPECT_LT(*s.front().sup_p3_difference, 0.02);
    EXPECT_FALSE(s.front().horizon_tau.has_value());
}

TEST(Compare, HorizonRecorded) {
    SimulationConfig c;
    c.delta = 50.0;
    c.length = 7.0;
    const auto s = compare(c);
    ASSERT_TRUE(s.back().horizon_tau.has_value());
    EXPECT_NEAR(*s.back().horizon_tau, 2.35, 0.1);
    EXPECT_EQ(s.back().analytic_error, "AdiabaticityHorizon");
}

TEST(Compare, LargeDetuningEntrance) {
    const auto s = compare(SimulationConfig{});
    ASSERT_TRUE(s.front().sup_p3_difference.has_value());
    EXPECT_LT(*s.front().sup_p3_difference, 0.01);
}

TEST(Compare, PopulationsSumToOne) {
    for (const auto& row : compare(experiment(2.0))) {
        EXPECT_NEAR(row.final_p1 + row.final_p2 + row.final_p3, 1.0, 1e-6);
        EXPECT_GE(row.final_p3, 0.0);
        EXPECT_LE(row.final_p3, 1.0);
    }
}

TEST(Compare, NonPositiveDetuningRecorded) {
    SimulationConfig c = experiment(0.5);
    c.delta = -50.0;
    const auto s = compare(c);
    EXPECT_FALSE(s.front().sup_p3_difference.has_value());
    EXPECT_EQ(s.front().analytic_error, "InvalidConfig");
}

TEST(Compare, TransferDegradesWithDistance) {
    const auto s = compare(experiment(5.0));
    double prev = 2.0;
    for (double x : {0.0, 2.0, 4.0, 5.0}) {
        const auto& row = s.at(static_cast<std::size_t>(std::lround(x * 10)));
        ASSERT_NEAR(row.eta, x, 1e-12);
        EXPECT_LE(row.final_p3, prev) << x;
        prev = row.final_p3;
    }
}

TEST(Dressed, NoDarkAdmixtureAtTwo) {
    const auto d = dressed_series(experiment(2.0)).back();
    EXPECT_LT(d.max_pd, 0.02);
    EXPECT_LT(d.max_pb2, 0.02);
}

TEST(Dressed, DarkAdmixtureAtFive) {
    EXPECT_GT(dressed_series(experiment(5.0)).back().max_pd, 0.05);
}

TEST(Dressed, StartsInLowerBright) {
    // Unequal widths leave θ slightly short of π/2 at the window start: cos²θ ≈ 2.5e-5 is dark.
    const auto d = dressed_series(experiment(0.0)).front();
    for (std::size_t j = 0; j < 200; ++j) EXPECT_NEAR(d.pb1[j], 1.0, 1e-4);
}

TEST(Dressed, SelfConsistentSums) {
    const auto run = propagate(experiment(1.0));
    const auto series = dressed_series(run);
    ASSERT_EQ(series.size(), run.fields.n_eta());
    for (const auto& d : series) {
        for (std::size_t j = 0; j < d.pd.size(); ++j) EXPECT_NEAR(d.pb1[j] + d.pb2[j] + d.pd[j], 1.0, 1e-8);
    }
}

TEST(Theta, FullRotationAtEntrance) {
    const auto t = theta_trajectory(experiment(0.0), 0.0);
    EXPECT_NEAR(t.final_theta, 0.0, 1e-6);
    // Unequal pulse widths: the field ratio at the window start gives θ just under π/2.
    EXPECT_NEAR(t.theta.front(), pi / 2, 1e-2);
}

TEST(Theta, IncompleteRotationAtFive) {
    EXPECT_GT(theta_trajectory(experiment(5.0), 5.0).final_theta, 1e-3);
}

TEST(Theta, PumpOnly) {
    std::vector<cplx> pump(50), stokes(50);
    for (std::size_t j = 0; j < pump.size(); ++j) pump[j] = std::exp(-std::pow((j - 25.0) / 8.0, 2));
    for (double th : frozen_theta_series(pump, stokes)) EXPECT_EQ(th, pi / 2);
}

TEST(Theta, AllZeroSlice) {
    std::vector<cplx> zero(10);
    for (double th : frozen_theta_series(zero, zero)) EXPECT_EQ(th, pi / 2);
}

TEST(Theta, FrozenBeyondSupport) {
    std::vector<cplx> pump(5), stokes(5);
    pump[1] = 3.0;
    stokes[1] = 3.0;
    pump[2] = 1.0;
    stokes[2] = 2.0;
    const auto th = frozen_theta_series(pump, stokes);
    EXPECT_DOUBLE_EQ(th[0], pi / 4);
    EXPECT_DOUBLE_EQ(th[1], pi / 4);
    EXPECT_DOUBLE_EQ(th[2], std::atan(0.5));
    EXPECT_DOUBLE_EQ(th[4], std::atan(0.5));
}

TEST(Peaks, Counting) {
    EXPECT_EQ(count_peaks(gaussian_bumps({{0.0, 1.0}})), 1);
    EXPECT_EQ(count_peaks(gaussian_bumps({{-2.5, 1.0}, {2.5, 0.4}})), 2);
    // A bump below the floor is a ripple.
    EXPECT_EQ(count_peaks(gaussian_bumps({{-2.5, 1.0}, {2.5, 0.03}})), 1);
    // Monotone data has no interior maximum.
    EXPECT_EQ(count_peaks(std::vector<double>{1.0, 2.0, 3.0}), 0);
    EXPECT_EQ(count_peaks(std::vector<double>(8, 0.0)), 0);
}

TEST(Peaks, ShoulderWithoutProminence) {
    EXPECT_EQ(count_peaks(gaussian_bumps({{-1.0, 1.0}, {1.0, 1.0}})), 2);
    // Bimodal, but the dip is only about 1% of the height.
    EXPECT_EQ(count_peaks(gaussian_bumps({{-0.75, 1.0}, {0.75, 1.0}})), 1);
}

TEST(Peaks, ScaleInvariant) {
    const auto base = gaussian_bumps({{-2.0, 1.0}, {1.0, 0.3}, {3.0, 0.06}});
    for (double k : {1e-6, 0.37, 1.0, 55.0, 1e8}) {
        std::vector<double> v(base);
        for (double& x : v) x *= k;
        EXPECT_EQ(count_peaks(v), count_peaks(base)) << k;
    }
}

TEST(Tail, GaussianOracle) {
    std::vector<double> tau(20001);
    std::vector<cplx> pump(tau.size()), stokes(tau.size());
    for (std::size_t j = 0; j < tau.size(); ++j) {
        tau[j] = -8.0 + 16.0 * j / (tau.size() - 1);
        pump[j] = std::exp(-tau[j] * tau[j]);
        stokes[j] = 2.0 * std::exp(-tau[j] * tau[j]);
    }
    // The Stokes trailing half maximum is at √ln2.
    const double expected = 0.5 * std::erfc(std::sqrt(2.0 * std::log(2.0)));
    EXPECT_NEAR(pump_tail_fraction(tau, pump, stokes), expected, 1e-3);
    std::vector<cplx> zero(tau.size());
    EXPECT_EQ(pump_tail_fraction(tau, zero, stokes), 0.0);
}

TEST(Reshaping, EntranceGaussians) {
    const auto r = detect_reshaping(propagate(experiment(0.0)).fields);
    for (const auto& s : r.slices) {
        EXPECT_EQ(s.pump_peaks, 1);
        EXPECT_EQ(s.stokes_peaks, 1);
        EXPECT_FALSE(s.order_broken);
    }
}

TEST(Reshaping, WeakFieldsSplitThePump) {
    const auto run = propagate(weak_fields(50.0));
    const auto r = detect_reshaping(run.fields);
    EXPECT_GE(r.slices.back().pump_peaks, 2);
    EXPECT_GE(r.max_pump_peaks(), 2);
    EXPECT_TRUE(r.any_order_broken());
    EXPECT_FALSE(r.slices.front().order_broken);
}

TEST(Reshaping, WeakFieldsIncompleteTransfer) {
    const auto s = compare(weak_fields(10.0));
    EXPECT_LT(s.back().final_p3, kCompleteTransfer);
}
