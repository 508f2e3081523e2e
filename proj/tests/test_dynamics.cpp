#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "phaselock/analytic.hpp"
#include "phaselock/dynamics.hpp"
#include "phaselock/families.hpp"
#include "test_support.hpp"

using namespace phaselock;
using std::numbers::pi;

namespace {

CubicGraph k4() { return CubicGraph(parse_graph6("C~")); }

Eigen::VectorXd sorted_eigs(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues();
}

}  // namespace

TEST(Field, SyncIsZero) {
    const auto g = double_ring(12);
    EXPECT_EQ(field(g, Phases::Zero(12)).norm(), 0.0);
    EXPECT_EQ(field(g, Phases::Constant(12, 2.5)).norm(), 0.0);
}

TEST(Field, K4FourTwistIsFixed) {
    Phases th(4);
    th << 0, pi / 2, pi, 3 * pi / 2;
    EXPECT_LT(field(k4(), th).norm(), 1e-15);
}

TEST(Field, DoubleRingPatternIsFixed) {
    EXPECT_LT(field(double_ring(10), double_ring_phases(10)).norm(), 1e-14);
}

TEST(Field, LengthMismatchThrows) {
    EXPECT_THROW(field(k4(), Phases::Zero(5)), DimensionMismatch);
    EXPECT_THROW(energy(k4(), Phases::Zero(3)), DimensionMismatch);
    EXPECT_THROW(jacobian(k4(), Phases::Zero(3)), DimensionMismatch);
}

TEST(Energy, Values) {
    EXPECT_EQ(energy(k4(), Phases::Zero(4)), 0.0);
    // isolated 5-cycle with the equidistant wave
    const double wave = 5.0 * (1.0 - std::cos(2 * pi / 5));
    EXPECT_NEAR(wave, 3.4549, 1e-4);
    EXPECT_NEAR(loop_energy(5), wave, 1e-15);
}

TEST(Energy, DoubleRingMatchesClosedForm) {
    for (int n : {10, 12, 16, 18}) {
        const double want = n * (1.0 - std::cos(4 * pi / n));
        EXPECT_NEAR(energy(double_ring(n), double_ring_phases(n)), want, 1e-12) << n;
    }
}

TEST(Jacobian, SyncIsMinusLaplacian) {
    const auto g = double_ring(10);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(10, 10);
    for (const auto& e : g.edges()) {
        lap(e.u, e.v) = lap(e.v, e.u) = -1;
        lap(e.u, e.u) += 1;
        lap(e.v, e.v) += 1;
    }
    EXPECT_LT((jacobian(g, Phases::Zero(10)) + lap).norm(), 1e-15);
}

TEST(Jacobian, K4SyncSpectrum) {
    const auto ev = sorted_eigs(jacobian(k4(), Phases::Zero(4)));
    EXPECT_NEAR(ev[0], -4, 1e-12);
    EXPECT_NEAR(ev[1], -4, 1e-12);
    EXPECT_NEAR(ev[2], -4, 1e-12);
    EXPECT_NEAR(ev[3], 0, 1e-12);
}

TEST(Flow, PerturbedSyncReturnsToSync) {
    const auto g = double_ring(10);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    Phases th(10);
    for (int i = 0; i < 10; ++i) th[i] = u(rng);
    FlowOptions o;
    o.residual_tol = 1e-10;
    auto r = flow_to_equilibrium(g, th, o);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(energy(g, r.theta), 1e-15);
}

TEST(Flow, FixedPointConvergesImmediately) {
    auto r = flow_to_equilibrium(double_ring(10), double_ring_phases(10));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.accepted, 0);
    EXPECT_EQ(r.time, 0.0);
}

TEST(Flow, TimeoutIsAnOutcome) {
    FlowOptions o;
    o.t_max = 0.05;
    o.residual_tol = 1e-14;
    Phases th(10);
    for (int i = 0; i < 10; ++i) th[i] = 0.3 * i * i;
    auto r = flow_to_equilibrium(double_ring(10), th, o);
    EXPECT_FALSE(r.converged);
    EXPECT_NEAR(r.time, 0.05, 1e-12);
}

TEST(Flow, DoubleRingOnlyReachesSyncOrTheTwist) {
    const auto g = double_ring(10);
    const double twist = energy(g, double_ring_phases(10));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 2 * pi);
    for (int t = 0; t < 200; ++t) {
        Phases th(10);
        for (int i = 0; i < 10; ++i) th[i] = u(rng);
        auto r = flow_to_equilibrium(g, th);
        ASSERT_TRUE(r.converged);
        auto rr = newton_refine(g, r.theta);
        ASSERT_TRUE(rr.usable());
        const auto rep = classify(g, rr.theta);
        if (!rep.stable()) continue;  // saddle capture, not a stable state
        const double e = rep.energy;
        EXPECT_TRUE(e < 1e-10 || std::abs(e - twist) < 1e-8) << e;
    }
}

TEST(Newton, QuadraticConvergenceFromNoise) {
    const auto g = double_ring(12);
    Phases th = double_ring_phases(12);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0, 2e-5);
    for (int i = 0; i < 12; ++i) th[i] += nd(rng);
    ASSERT_LT(field(g, th).norm(), NewtonOptions{}.capture_radius);
    auto r = newton_refine(g, th);
    ASSERT_EQ(r.status, RefineStatus::converged);
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_LE(r.iterations, 4);
    const Phases want = double_ring_phases(12);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(wrap_angle(r.theta[i] - want[i] - (r.theta[0] - want[0])), 0, 1e-6);
}

TEST(Newton, SyncUnchanged) {
    auto r = newton_refine(double_ring(10), Phases::Zero(10));
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.theta.norm(), 0.0);
}

TEST(Newton, OutsideCaptureRadius) {
    Phases th(10);
    for (int i = 0; i < 10; ++i) th[i] = i;
    auto r = newton_refine(double_ring(10), th);
    EXPECT_EQ(r.status, RefineStatus::outside_capture);
}

TEST(Newton, SaddleOfTwistedRingNeverStable) {
    // every fixed point reached from below-capture starts near saddles is
    // either refused by Newton or classified unstable/degenerate
    const auto g = twisted_ring(10);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 2 * pi);
    int saddles = 0;
    for (int t = 0; t < 400 && saddles < 3; ++t) {
        Phases th(10);
        for (int i = 0; i < 10; ++i) th[i] = u(rng);
        FlowOptions o;
        o.residual_tol = 1e-3;
        auto f = flow_to_equilibrium(g, th, o);
        if (!f.converged) continue;
        auto r = newton_refine(g, f.theta);
        if (!r.usable()) continue;
        const auto rep = classify(g, r.theta);
        if (rep.classification == Classification::unstable) {
            ++saddles;
            EXPECT_FALSE(rep.stable());
            EXPECT_GT(rep.eigenvalues.back(), 1e-6);
        }
    }
    // 4-twist K4 saddle as a deterministic fallback
    Phases th(4);
    th << 0, pi / 2, pi, 3 * pi / 2;
    EXPECT_EQ(classify(k4(), th).classification, Classification::unstable);
}

TEST(Classify, SyncOnK4) {
    const auto r = classify(k4(), Phases::Zero(4));
    EXPECT_EQ(r.classification, Classification::sync);
    EXPECT_NEAR(r.spectral_gap, 4.0, 1e-12);
    EXPECT_EQ(r.zero_eigs, 1);
    EXPECT_EQ(r.energy, 0.0);
}

TEST(Classify, DoubleRingPatternAllShort) {
    const auto r = classify(double_ring(10), double_ring_phases(10));
    EXPECT_EQ(r.classification, Classification::stable_pattern);
    EXPECT_EQ(r.links.size(), 15u);
    for (const auto& l : r.links) EXPECT_EQ(l.cls, LinkClass::short_link);
    EXPECT_EQ(r.max_abs_winding(), 1);
    EXPECT_GT(r.energy, 0.0);
}

TEST(Classify, ResidualTooLargeThrows) {
    Phases th(10);
    for (int i = 0; i < 10; ++i) th[i] = i;
    EXPECT_THROW(classify(double_ring(10), th), NumericalError);
}

TEST(Classify, SpectrumRules) {
    ClassifyOptions o;
    EXPECT_EQ(classify_spectrum({-2, -1, 0}, false, o), Classification::stable_pattern);
    EXPECT_EQ(classify_spectrum({-2, -1, 0}, true, o), Classification::sync);
    EXPECT_EQ(classify_spectrum({-2, 0, 1e-12}, false, o), Classification::degenerate);
    EXPECT_EQ(classify_spectrum({-2, -1e-7, 0}, false, o), Classification::degenerate);
    EXPECT_EQ(classify_spectrum({-2, 0, 0.5}, false, o), Classification::unstable);
    int zeros = 0;
    double gap = 0;
    classify_spectrum({-3, -0.25, 1e-10}, false, o, &zeros, &gap);
    EXPECT_EQ(zeros, 1);
    EXPECT_DOUBLE_EQ(gap, 0.25);
}

TEST(Links, CriticalBand) {
    EXPECT_EQ(classify_link(pi / 2, 1e-9), LinkClass::critical);
    EXPECT_EQ(classify_link(-pi / 2 + 1e-10, 1e-9), LinkClass::critical);
    EXPECT_EQ(classify_link(pi / 2 + 1e-6, 1e-9), LinkClass::long_link);
    EXPECT_EQ(classify_link(1.0, 1e-9), LinkClass::short_link);
}

TEST(Winding, Examples) {
    const auto g = double_ring(10);
    const Cycle outer{0, 1, 2, 3, 4};
    EXPECT_EQ(winding_number(g, Phases::Zero(10), outer), 0);
    EXPECT_EQ(std::abs(winding_number(g, double_ring_phases(10), outer)), 1);
    // 5-ring wave
    Phases wave(5);
    for (int i = 0; i < 5; ++i) wave[i] = 2 * pi * i / 5;
    EXPECT_EQ(winding_number(wave, {0, 1, 2, 3, 4}), 1);
    EXPECT_THROW(winding_number(g, double_ring_phases(10), Cycle{0, 2, 4}), InvalidGraph);
    EXPECT_THROW(winding_number(wave, Cycle{0, 1}), InvalidGraph);
}

TEST(Gauge, Normalize) {
    EXPECT_EQ(gauge_normalize(Phases::Constant(6, 1.3)).norm(), 0.0);
    Phases th(4);
    th << 0, 1, 2, 6;
    EXPECT_EQ(gauge_normalize(th), th);
    const Phases a = gauge_normalize(th), b = gauge_normalize((th.array() + 0.7).matrix());
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
    Phases neg(3);
    neg << 1, -1, 8;
    const Phases n = gauge_normalize(neg);
    EXPECT_EQ(n[0], 0.0);
    for (int i = 0; i < 3; ++i) {
        EXPECT_GE(n[i], 0.0);
        EXPECT_LT(n[i], 2 * pi);
    }
}

TEST(Gauge, WrapAngleRange) {
    EXPECT_DOUBLE_EQ(wrap_angle(pi), pi);
    EXPECT_DOUBLE_EQ(wrap_angle(-pi), pi);
    EXPECT_NEAR(wrap_angle(3 * pi / 2), -pi / 2, 1e-15);
}
