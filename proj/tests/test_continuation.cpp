#include <gtest/gtest.h>

#include "phaselock/continuation.hpp"
#include "phaselock/families.hpp"
#include "phaselock/g50.hpp"
#include "test_support.hpp"

using namespace phaselock;

namespace {

// the dataset graph carrying the long-link pattern, aligned to double_ring(12)
const AlignedG50& aligned() {
    static const AlignedG50 al = [] {
        const auto graphs = testkit::load_dataset("cubic12.g6");
        for (const auto& g : graphs) {
            if (auto a = align_g50(g)) return *a;
        }
        throw std::runtime_error("no aligned G50");
    }();
    return al;
}

}  // namespace

TEST(Homotopy, EndpointsMatchGraphs) {
    const auto a = double_ring(10), b = twisted_ring(10);
    const Homotopy h(a, b);
    EXPECT_EQ(h.shared().size() + h.a_only().size(), a.edges().size());
    EXPECT_EQ(h.shared().size() + h.b_only().size(), b.edges().size());
    Phases th(10);
    for (int i = 0; i < 10; ++i) th[i] = 0.37 * i * i;
    EXPECT_LT((homotopy_field(h, 1.0, th) - field(a, th)).norm(), 1e-14);
    EXPECT_LT((homotopy_field(h, 0.0, th) - field(b, th)).norm(), 1e-14);
    EXPECT_EQ(homotopy_field(h, 0.5, Phases::Zero(10)).norm(), 0.0);
    EXPECT_THROW(Homotopy(a, double_ring(12)), DimensionMismatch);
    EXPECT_THROW(homotopy_field(h, 0.5, Phases::Zero(9)), DimensionMismatch);
}

TEST(Homotopy, ParameterDerivative) {
    const Homotopy h(double_ring(12), twisted_ring(12));
    Phases th(12);
    for (int i = 0; i < 12; ++i) th[i] = std::sin(1.7 * i);
    const double p = 0.3, e = 1e-6;
    const Eigen::VectorXd fd = (homotopy_field(h, p + e, th) - homotopy_field(h, p - e, th)) / (2 * e);
    EXPECT_LT((fd - h.field_dp(th)).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(MinEig, SyncIsAlgebraicConnectivity) {
    const auto g = double_ring(10);
    const Network net = Network::from(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobian(net, Phases::Zero(10)));
    // second largest eigenvalue of -L
    EXPECT_NEAR(min_eig_transverse(net, Phases::Zero(10)), es.eigenvalues()[8], 1e-10);
}

TEST(Trace, IdenticalGraphsGiveConstantBranch) {
    const auto g = double_ring(12);
    const Homotopy h(g, g);
    const auto tr = trace_branch(h, double_ring_phases(12), -0.5);
    EXPECT_EQ(tr.status, TraceStatus::reached_target);
    ASSERT_GT(tr.points.size(), 2u);
    const Phases first = tr.points.front().theta;
    for (const auto& bp : tr.points) {
        EXPECT_LT((bp.theta - first).lpNorm<Eigen::Infinity>(), 1e-10);
        EXPECT_FALSE(bp.is_fold);
    }
    ASSERT_TRUE(tr.at(0.0).has_value());
    ASSERT_TRUE(tr.at(-0.5).has_value());
}

TEST(Trace, StartMustBeStableFixedPoint) {
    const Homotopy h(double_ring(12), twisted_ring(12));
    Phases bad = double_ring_phases(12);
    bad[3] += 0.2;
    EXPECT_THROW(trace_branch(h, bad, 0.0), DomainError);
    EXPECT_THROW(trace_branch(h, Phases::Zero(11), 0.0), DimensionMismatch);
    // the K4-like saddle: a fixed point that is not stable
    Phases saddle = Phases::Zero(12);
    for (int i = 0; i < 12; ++i) saddle[i] = (i % 2) * std::numbers::pi;
    if (field(double_ring(12), saddle).norm() < 1e-12) {
        EXPECT_THROW(trace_branch(h, saddle, 0.0), DomainError);
    }
}

TEST(Trace, G50BranchFoldsJustBelowZero) {
    const auto& al = aligned();
    const auto& tr = al.trace;
    EXPECT_EQ(al.removed.size(), 3u);
    EXPECT_EQ(tr.status, TraceStatus::fold);
    ASSERT_EQ(tr.fold_ps.size(), 1u);
    EXPECT_LT(tr.fold_ps[0], 0.0);
    EXPECT_GT(tr.fold_ps[0], -0.1);
    const auto end = tr.at(0.0);
    ASSERT_TRUE(end.has_value());
    EXPECT_LT(std::abs(end->min_eig), 0.05);
    EXPECT_TRUE(has_g50_signature(end->theta, al.graph));
}

TEST(Trace, BranchInvariants) {
    const auto& tr = aligned().trace;
    const TraceOptions o;
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
        EXPECT_LT(tr.points[i].residual, 1e-10) << i;
        if (i > 0) {
            EXPECT_LE((tr.points[i].theta - tr.points[i - 1].theta).lpNorm<Eigen::Infinity>(), o.max_theta_step + 1e-12);
        }
    }
    // min_eig negative on the branch before the fold and ~0 at it
    for (const auto& bp : tr.points)
        if (!bp.is_fold) {
            EXPECT_LT(bp.min_eig, 0.0);
        }
    const auto& fold = tr.points.back();
    ASSERT_TRUE(fold.is_fold);
    EXPECT_LT(std::abs(fold.min_eig), 1e-6);
}

TEST(Rewiring, VisitsOnlyCubicNeighbours) {
    const auto ring = double_ring(10);
    int count = 0;
    for_each_rewiring(ring, 2, [&](const CubicGraph& h, const std::vector<Edge>& rem, const std::vector<Edge>& add) {
        ++count;
        EXPECT_EQ(rem.size(), 2u);
        EXPECT_EQ(add.size(), 2u);
        const Homotopy hom(ring, h);
        EXPECT_EQ(hom.a_only().size(), 2u);
        EXPECT_EQ(hom.b_only().size(), 2u);
        return false;
    });
    EXPECT_GT(count, 0);
}
