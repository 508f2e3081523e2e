#pragma once

// Edge-weight homotopy between two cubic graphs on the same vertex labels and
// pseudo-arclength tracing of a fixed-point branch with fold detection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phaselock/dynamics.hpp"

namespace phaselock {

/// Weighted flow that equals graph A at p = 1 and graph B at p = 0.
/// Shared edges keep weight 1, A-only edges get p, B-only edges 1 - p.
class Homotopy {
public:
    Homotopy(const CubicGraph& a, const CubicGraph& b) : n_(a.n()) {
        if (a.n() != b.n()) throw DimensionMismatch("homotopy endpoints have different vertex counts");
        std::set_intersection(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(),
                              std::back_inserter(shared_));
        std::set_difference(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(),
                            std::back_inserter(a_only_));
        std::set_difference(b.edges().begin(), b.edges().end(), a.edges().begin(), a.edges().end(),
                            std::back_inserter(b_only_));
    }

    int n() const { return n_; }
    const std::vector<Edge>& shared() const { return shared_; }
    const std::vector<Edge>& a_only() const { return a_only_; }
    const std::vector<Edge>& b_only() const { return b_only_; }

    Network at(double p) const {
        Network net;
        net.n = n_;
        for (const auto& e : shared_) {
            net.edges.push_back(e);
            net.weights.push_back(1.0);
        }
        for (const auto& e : a_only_) {
            net.edges.push_back(e);
            net.weights.push_back(p);
        }
        for (const auto& e : b_only_) {
            net.edges.push_back(e);
            net.weights.push_back(1.0 - p);
        }
        return net;
    }

    /// d(field)/dp: the A-only coupling minus the B-only coupling.
    Eigen::VectorXd field_dp(const Phases& theta) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
        for (const auto& e : a_only_) {
            const double s = std::sin(theta[e.v] - theta[e.u]);
            out[e.u] += s;
            out[e.v] -= s;
        }
        for (const auto& e : b_only_) {
            const double s = std::sin(theta[e.v] - theta[e.u]);
            out[e.u] -= s;
            out[e.v] += s;
        }
        return out;
    }

private:
    int n_ = 0;
    std::vector<Edge> shared_, a_only_, b_only_;
};

inline Eigen::VectorXd homotopy_field(const Homotopy& h, double p, const Phases& theta) {
    return field(h.at(p), theta);
}

/// Least-negative eigenvalue of the Jacobian restricted to the complement of
/// the rotation mode 1. Negative on a stable branch, zero at a fold.
inline double min_eig_transverse(const Network& net, const Phases& theta) {
    Eigen::MatrixXd j = jacobian(net, theta);
    const double shift = 1e3;
    j.array() -= shift / net.n;  // sends the 1-mode eigenvalue to -shift
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[net.n - 1];
}

struct BranchPoint {
    double p = 1.0;
    Phases theta;  // theta[0] = 0
    double energy = 0.0;
    double min_eig = 0.0;
    double residual = 0.0;
    bool stable = false;
    bool is_fold = false;
    bool is_landmark = false;  // solved at an exact requested p
};

struct TraceOptions {
    double ds0 = 0.02;
    double ds_min = 1e-5;
    double ds_max = 0.05;
    double max_theta_step = 0.2;  // max-norm bound between consecutive points
    double corrector_tol = 1e-12;
    double accept_residual = 1e-10;
    int corrector_max_iter = 10;
    int max_steps = 20000;
    double fold_bracket = 1e-8;
    double eig_tol = 1e-6;
    bool stop_at_fold = true;
    std::vector<double> landmarks{0.0};
};

enum class TraceStatus { reached_target, fold, aborted, max_steps };

inline const char* to_string(TraceStatus s) {
    switch (s) {
        case TraceStatus::reached_target: return "reached_target";
        case TraceStatus::fold: return "fold";
        case TraceStatus::aborted: return "aborted";
        case TraceStatus::max_steps: return "max_steps";
    }
    return "?";
}

struct BranchTrace {
    TraceStatus status = TraceStatus::aborted;
    std::vector<BranchPoint> points;
    std::vector<double> fold_ps;
    std::string message;

    /// The landmark point solved at exactly p, if the trace crossed it.
    std::optional<BranchPoint> at(double p) const {
        for (const auto& bp : points)
            if (bp.is_landmark && bp.p == p) return bp;
        return std::nullopt;
    }
};

namespace detail {

struct ArcState {
    Eigen::VectorXd x;  // theta_1..theta_{n-1}
    double p = 1.0;
    Eigen::VectorXd tangent;  // in (x, p), unit length
};

inline Phases full_theta(const Eigen::VectorXd& x) {
    Phases th(x.size() + 1);
    th[0] = 0.0;
    th.tail(x.size()) = x;
    return th;
}

class ArcSolver {
public:
    ArcSolver(const Homotopy& h, const TraceOptions& o) : h_(h), o_(o) {}

    double residual(const Eigen::VectorXd& x, double p) const {
        return field(h_.at(p), full_theta(x)).norm();
    }

    // Augmented Jacobian rows [G_x G_p] at (x, p).
    Eigen::MatrixXd gx_gp(const Eigen::VectorXd& x, double p) const {
        const int m = static_cast<int>(x.size());
        const Phases th = full_theta(x);
        Eigen::MatrixXd a(m, m + 1);
        a.leftCols(m) = jacobian(h_.at(p), th).bottomRightCorner(m, m);
        a.col(m) = h_.field_dp(th).tail(m);
        return a;
    }

    /// Unit tangent oriented along `prev`.
    Eigen::VectorXd tangent(const Eigen::VectorXd& x, double p, const Eigen::VectorXd& prev) const {
        const int m = static_cast<int>(x.size());
        Eigen::MatrixXd a(m + 1, m + 1);
        a.topRows(m) = gx_gp(x, p);
        a.row(m) = prev.transpose();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        rhs[m] = 1.0;
        Eigen::VectorXd t = a.fullPivLu().solve(rhs);
        t.normalize();
        if (t.dot(prev) < 0) t = -t;
        return t;
    }

    /// Keller corrector from the predicted point on the hyperplane
    /// orthogonal to `dir` through `pred`.
    std::optional<std::pair<Eigen::VectorXd, double>> correct(Eigen::VectorXd x, double p,
                                                              const Eigen::VectorXd& dir) const {
        const int m = static_cast<int>(x.size());
        const Eigen::VectorXd x0 = x;
        const double p0 = p;
        for (int it = 0; it < o_.corrector_max_iter; ++it) {
            const Phases th = full_theta(x);
            Eigen::VectorXd g(m + 1);
            g.head(m) = field(h_.at(p), th).tail(m);
            g[m] = dir.head(m).dot(x - x0) + dir[m] * (p - p0);
            if (g.head(m).norm() < o_.corrector_tol && std::abs(g[m]) < 1e-13) return std::make_pair(x, p);
            Eigen::MatrixXd a(m + 1, m + 1);
            a.topRows(m) = gx_gp(x, p);
            a.row(m) = dir.transpose();
            const Eigen::VectorXd d = a.fullPivLu().solve(-g);
            if (!d.allFinite()) return std::nullopt;
            x += d.head(m);
            p += d[m];
        }
        if (residual(x, p) < o_.accept_residual) return std::make_pair(x, p);
        return std::nullopt;
    }

    /// Newton at fixed p.
    std::optional<Eigen::VectorXd> solve_at(Eigen::VectorXd x, double p) const {
        const int m = static_cast<int>(x.size());
        for (int it = 0; it < 30; ++it) {
            const Phases th = full_theta(x);
            const Network net = h_.at(p);
            const Eigen::VectorXd g = field(net, th).tail(m);
            if (g.norm() < o_.corrector_tol) return x;
            const Eigen::MatrixXd jr = jacobian(net, th).bottomRightCorner(m, m);
            x += jr.fullPivLu().solve(-g);
            if (!x.allFinite()) return std::nullopt;
        }
        if (residual(x, p) < o_.accept_residual) return x;
        return std::nullopt;
    }

    BranchPoint make_point(const Eigen::VectorXd& x, double p) const {
        BranchPoint bp;
        bp.p = p;
        bp.theta = full_theta(x);
        const Network net = h_.at(p);
        bp.energy = energy(net, bp.theta);
        bp.residual = field(net, bp.theta).norm();
        bp.min_eig = min_eig_transverse(net, bp.theta);
        bp.stable = bp.min_eig < -o_.eig_tol;
        return bp;
    }

    /// One arclength step of size ds from `s`; nullopt if the corrector fails
    /// or the step jumps too far.
    std::optional<ArcState> step(const ArcState& s, double ds) const {
        const int m = static_cast<int>(s.x.size());
        const Eigen::VectorXd xp = s.x + ds * s.tangent.head(m);
        const double pp = s.p + ds * s.tangent[m];
        auto c = correct(xp, pp, s.tangent);
        if (!c) return std::nullopt;
        if ((c->first - s.x).lpNorm<Eigen::Infinity>() > o_.max_theta_step) return std::nullopt;
        ArcState out;
        out.x = c->first;
        out.p = c->second;
        out.tangent = tangent(out.x, out.p, s.tangent);
        return out;
    }

private:
    const Homotopy& h_;
    const TraceOptions& o_;
};

}  // namespace detail

/// Traces the fixed-point branch through `start` (a stable fixed point of
/// graph A, i.e. p = 1) toward p_target. Exact points are inserted at every
/// crossed landmark p; folds (sign change of dp/ds) are located by bisection
/// in arclength. Throws DomainError if `start` is not a stable fixed point.
inline BranchTrace trace_branch(const Homotopy& h, const Phases& start, double p_target,
                                const TraceOptions& o = {}) {
    const int n = h.n();
    if (start.size() != n) throw DimensionMismatch("start phases do not match the homotopy size");
    const double p_start = 1.0;
    {
        const Network net = h.at(p_start);
        const double res = field(net, start).norm();
        if (res > 1e-6)
            throw DomainError("start is not a fixed point at p = 1 (residual " + std::to_string(res) + ")");
    }
    detail::ArcSolver solver(h, o);
    BranchTrace out;
    const int m = n - 1;

    Phases th0 = start.array() - start[0];
    auto x0 = solver.solve_at(th0.tail(m), p_start);
    if (!x0) throw DomainError("start does not refine to a fixed point at p = 1");

    detail::ArcState s;
    s.x = *x0;
    s.p = p_start;
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(m + 1);
    guess[m] = p_target < p_start ? -1.0 : 1.0;
    s.tangent = solver.tangent(s.x, s.p, guess);

    BranchPoint first = solver.make_point(s.x, s.p);
    if (!first.stable) throw DomainError("start is not a stable fixed point at p = 1");
    out.points.push_back(first);

    const double dir = p_target < p_start ? -1.0 : 1.0;
    std::vector<double> landmarks = o.landmarks;
    landmarks.push_back(p_target);
    double ds = o.ds0;
    for (int step = 0; step < o.max_steps; ++step) {
        auto next = solver.step(s, ds);
        if (!next) {
            ds *= 0.5;
            if (ds < o.ds_min) {
                out.status = TraceStatus::aborted;
                out.message = "corrector failed at p = " + std::to_string(s.p);
                return out;
            }
            continue;
        }
        // landmarks crossed by this step, in travel order
        std::vector<double> crossed;
        for (double lm : landmarks)
            if ((s.p - lm) * (next->p - lm) < 0 || next->p == lm) crossed.push_back(lm);
        std::sort(crossed.begin(), crossed.end(), [&](double a, double b) { return dir * a < dir * b; });
        crossed.erase(std::unique(crossed.begin(), crossed.end()), crossed.end());
        for (double lm : crossed) {
            const double w = (lm - s.p) / (next->p - s.p);
            const Eigen::VectorXd xg = s.x + w * (next->x - s.x);
            if (auto xl = solver.solve_at(xg, lm)) {
                BranchPoint bp = solver.make_point(*xl, lm);
                bp.is_landmark = true;
                out.points.push_back(bp);
            }
            if (lm == p_target && dir * (next->p - p_target) >= 0 && dir * s.tangent[m] > 0) {
                out.status = TraceStatus::reached_target;
                return out;
            }
        }

        // fold: dp/ds changes sign
        if ((s.tangent[m] > 0) != (next->tangent[m] > 0)) {
            double lo = 0.0, hi = ds;
            detail::ArcState best = *next;
            while (hi - lo > o.fold_bracket) {
                const double mid = 0.5 * (lo + hi);
                auto probe = solver.step(s, mid);
                if (!probe) break;
                if ((probe->tangent[m] > 0) == (s.tangent[m] > 0)) {
                    lo = mid;
                } else {
                    hi = mid;
                    best = *probe;
                }
            }
            BranchPoint fp = solver.make_point(best.x, best.p);
            fp.is_fold = true;
            out.points.push_back(fp);
            out.fold_ps.push_back(best.p);
            if (o.stop_at_fold) {
                out.status = TraceStatus::fold;
                return out;
            }
        }

        out.points.push_back(solver.make_point(next->x, next->p));
        s = std::move(*next);
        ds = std::min(ds * 1.5, o.ds_max);
    }
    out.status = TraceStatus::max_steps;
    return out;
}

}  // namespace phaselock
