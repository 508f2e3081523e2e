#pragma once

// Kuramoto flow theta_v' = sum_{w ~ v} w_e sin(theta_w - theta_v) on a
// (weighted) graph: field, energy, Jacobian, gradient-flow integration,
// Newton refinement and fixed-point classification.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "phaselock/analytic.hpp"
#include "phaselock/graph.hpp"

namespace phaselock {

/// Edge list with per-edge coupling weights. Unit weights give the plain
/// Kuramoto flow of a graph.
struct Network {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<double> weights;

    static Network from(const CubicGraph& g) {
        return Network{g.n(), g.edges(), std::vector<double>(g.edges().size(), 1.0)};
    }
};

namespace detail {
inline void check_length(int n, const Phases& theta) {
    if (theta.size() != n)
        throw DimensionMismatch("phase vector has length " + std::to_string(theta.size()) + ", graph has " +
                                std::to_string(n) + " vertices");
}

/// sin/cos of every phase; pair differences then cost two multiplies.
struct Trig {
    Eigen::VectorXd s, c;
    void load(const Phases& th) {
        s.resize(th.size());
        c.resize(th.size());
        for (Eigen::Index v = 0; v < th.size(); ++v) {
            s[v] = std::sin(th[v]);
            c[v] = std::cos(th[v]);
        }
    }
};

inline void field_into(const Network& net, const Trig& t, Eigen::VectorXd& out) {
    out.setZero(net.n);
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto [u, v] = net.edges[k];
        // sin(theta_v - theta_u)
        const double s = t.s[v] * t.c[u] - t.c[v] * t.s[u];
        const double ws = net.weights[k] * s;
        out[u] += ws;
        out[v] -= ws;
    }
}

inline double energy_of(const Network& net, const Trig& t) {
    double e = 0.0;
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto [u, v] = net.edges[k];
        e += net.weights[k] * (1.0 - (t.c[u] * t.c[v] + t.s[u] * t.s[v]));
    }
    return e;
}
}  // namespace detail

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
    constexpr double pi = std::numbers::pi;
    double r = std::remainder(x, kTwoPi);
    if (r <= -pi) r += kTwoPi;
    return r;
}

inline Eigen::VectorXd field(const Network& net, const Phases& theta) {
    detail::check_length(net.n, theta);
    detail::Trig t;
    t.load(theta);
    Eigen::VectorXd out;
    detail::field_into(net, t, out);
    return out;
}

inline Eigen::VectorXd field(const CubicGraph& g, const Phases& theta) { return field(Network::from(g), theta); }

/// sum_e w_e (1 - cos(theta_u - theta_v)); the flow is minus its gradient.
inline double energy(const Network& net, const Phases& theta) {
    detail::check_length(net.n, theta);
    double e = 0.0;
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto [u, v] = net.edges[k];
        e += net.weights[k] * (1.0 - std::cos(theta[u] - theta[v]));
    }
    return e;
}

inline double energy(const CubicGraph& g, const Phases& theta) { return energy(Network::from(g), theta); }

/// Symmetric Jacobian of the field; every row sums to zero.
inline Eigen::MatrixXd jacobian(const Network& net, const Phases& theta) {
    detail::check_length(net.n, theta);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(net.n, net.n);
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto [u, v] = net.edges[k];
        const double c = net.weights[k] * std::cos(theta[u] - theta[v]);
        jac(u, v) += c;
        jac(v, u) += c;
        jac(u, u) -= c;
        jac(v, v) -= c;
    }
    return jac;
}

inline Eigen::MatrixXd jacobian(const CubicGraph& g, const Phases& theta) {
    return jacobian(Network::from(g), theta);
}

/// Shifts phases so vertex 0 sits at 0 and all entries lie in [0, 2 pi).
inline Phases gauge_normalize(const Phases& theta) {
    Phases out(theta.size());
    if (theta.size() == 0) return out;
    const double ref = theta[0];
    for (Eigen::Index v = 0; v < theta.size(); ++v) {
        double r = std::fmod(theta[v] - ref, kTwoPi);
        if (r < 0) r += kTwoPi;
        if (r >= kTwoPi) r -= kTwoPi;
        out[v] = r;
    }
    out[0] = 0.0;
    return out;
}

/// Number of 2 pi wraps of the phases around a closed vertex sequence.
inline int winding_number(const Phases& theta, const Cycle& cycle) {
    if (cycle.size() < 3) throw InvalidGraph("winding_number needs a cycle of length >= 3");
    double total = 0.0;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const int a = cycle[i], b = cycle[(i + 1) % cycle.size()];
        if (a < 0 || b < 0 || a >= theta.size() || b >= theta.size())
            throw DimensionMismatch("cycle vertex outside the phase vector");
        total += wrap_angle(theta[b] - theta[a]);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

inline int winding_number(const CubicGraph& g, const Phases& theta, const Cycle& cycle) {
    if (!is_cycle_in(g, cycle)) throw InvalidGraph("winding_number: vertex sequence is not a cycle of the graph");
    return winding_number(theta, cycle);
}

// ---------------------------------------------------------------------------
// gradient flow

struct FlowOptions {
    double dt0 = 0.1;
    double dt_max = 0.4;  // inside the RK4 stability region for |lambda| <= 6
    double dt_min = 1e-8;
    double t_max = 2000.0;
    double residual_tol = 1e-3;
    double energy_slack = 1e-9;  // allowed energy increase per accepted step
    /// Called after every accepted step with (t, energy).
    std::function<void(double, double)> observer;
};

struct FlowOutcome {
    bool converged = false;
    Phases theta;
    double residual = 0.0;
    double time = 0.0;
    int accepted = 0;
    int rejected = 0;
};

/// Reusable RK4 workspace for one network.
class FlowIntegrator {
public:
    explicit FlowIntegrator(Network net) : net_(std::move(net)) {}

    const Network& network() const { return net_; }

    /// Integrates from theta until the field norm drops below
    /// opts.residual_tol or t_max elapses. Steps that raise the energy by
    /// more than opts.energy_slack are rejected and retried at half size.
    FlowOutcome run(Phases theta, const FlowOptions& opts, double t0 = 0.0) {
        detail::check_length(net_.n, theta);
        FlowOutcome out;
        double t = t0;
        double dt = opts.dt0;
        trig_.load(theta);
        detail::field_into(net_, trig_, k1_);
        double e = detail::energy_of(net_, trig_);
        double res = k1_.norm();
        while (res >= opts.residual_tol) {
            if (t - t0 >= opts.t_max) break;
            const double h = std::min(dt, opts.t_max - (t - t0));
            step(theta, h);
            trig_.load(trial_);
            detail::field_into(net_, trig_, k_next_);
            const double e_new = detail::energy_of(net_, trig_);
            if (e_new > e + opts.energy_slack && h > opts.dt_min) {
                ++out.rejected;
                dt = std::max(0.5 * h, opts.dt_min);
                continue;
            }
            ++out.accepted;
            theta.swap(trial_);
            k1_.swap(k_next_);
            t += h;
            e = e_new;
            res = k1_.norm();
            if (opts.observer) opts.observer(t, e);
            dt = std::min(2.0 * h, opts.dt_max);
        }
        out.converged = res < opts.residual_tol;
        out.theta = std::move(theta);
        out.residual = res;
        out.time = t;
        return out;
    }

private:
    void eval(const Phases& th, Eigen::VectorXd& k) {
        scratch_trig_.load(th);
        detail::field_into(net_, scratch_trig_, k);
    }

    // classical RK4 from theta with k1_ already holding field(theta)
    void step(const Phases& theta, double h) {
        tmp_ = theta + 0.5 * h * k1_;
        eval(tmp_, k2_);
        tmp_ = theta + 0.5 * h * k2_;
        eval(tmp_, k3_);
        tmp_ = theta + h * k3_;
        eval(tmp_, k4_);
        trial_ = theta + (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

    Network net_;
    detail::Trig trig_, scratch_trig_;
    Eigen::VectorXd k1_, k2_, k3_, k4_, k_next_, tmp_, trial_;
};

inline FlowOutcome flow_to_equilibrium(const Network& net, const Phases& theta0, const FlowOptions& opts = {}) {
    FlowIntegrator integ(net);
    return integ.run(theta0, opts);
}

inline FlowOutcome flow_to_equilibrium(const CubicGraph& g, const Phases& theta0, const FlowOptions& opts = {}) {
    return flow_to_equilibrium(Network::from(g), theta0, opts);
}

// ---------------------------------------------------------------------------
// Newton refinement on the reduced system (theta_0 pinned to 0)

struct NewtonOptions {
    double capture_radius = 1e-3;
    double tol = 1e-12;
    /// Residual below which a non-improving iteration counts as stalled
    /// rather than failed (degenerate roots lose half the digits).
    double stall_tol = 1e-9;
    int max_iter = 80;
};

enum class RefineStatus { converged, stalled, outside_capture, singular, diverged, max_iter };

inline const char* to_string(RefineStatus s) {
    switch (s) {
        case RefineStatus::converged: return "converged";
        case RefineStatus::stalled: return "stalled";
        case RefineStatus::outside_capture: return "outside_capture";
        case RefineStatus::singular: return "singular";
        case RefineStatus::diverged: return "diverged";
        case RefineStatus::max_iter: return "max_iter";
    }
    return "?";
}

struct RefineResult {
    RefineStatus status = RefineStatus::max_iter;
    Phases theta;
    double residual = 0.0;
    int iterations = 0;

    bool ok() const { return status == RefineStatus::converged; }
    /// Converged, or stuck at the rounding floor of a degenerate root.
    bool usable() const { return status == RefineStatus::converged || status == RefineStatus::stalled; }
};

inline RefineResult newton_refine(const Network& net, const Phases& theta, const NewtonOptions& opts = {}) {
    detail::check_length(net.n, theta);
    const int n = net.n;
    RefineResult r;
    r.theta = theta.array() - theta[0];
    Eigen::VectorXd f = field(net, r.theta);
    r.residual = f.norm();
    if (r.residual >= opts.capture_radius) {
        r.status = RefineStatus::outside_capture;
        return r;
    }
    while (r.residual >= opts.tol) {
        if (r.iterations >= opts.max_iter) {
            r.status = RefineStatus::max_iter;
            return r;
        }
        ++r.iterations;
        const Eigen::MatrixXd jr = jacobian(net, r.theta).bottomRightCorner(n - 1, n - 1);
        // Minimum-norm step: at a degenerate root the step stays bounded and
        // the iteration falls back to linear convergence.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jr);
        cod.setThreshold(1e-13);
        if (cod.rank() == 0) {
            r.status = RefineStatus::singular;
            return r;
        }
        const Eigen::VectorXd delta = cod.solve(-f.tail(n - 1));
        r.theta.tail(n - 1) += delta;
        f = field(net, r.theta);
        const double prev = r.residual;
        r.residual = f.norm();
        if (r.residual > 10.0 * opts.capture_radius || !std::isfinite(r.residual)) {
            r.status = RefineStatus::diverged;
            return r;
        }
        if (r.iterations > 5 && r.residual >= prev && r.residual < opts.stall_tol) {
            r.status = RefineStatus::stalled;
            return r;
        }
    }
    if (r.residual < opts.tol) {
        r.status = RefineStatus::converged;
    } else {
        r.status = r.residual < opts.stall_tol ? RefineStatus::stalled : RefineStatus::max_iter;
    }
    return r;
}

inline RefineResult newton_refine(const CubicGraph& g, const Phases& theta, const NewtonOptions& opts = {}) {
    return newton_refine(Network::from(g), theta, opts);
}

// ---------------------------------------------------------------------------
// classification

enum class Classification { sync, stable_pattern, degenerate, unstable };
enum class LinkClass { short_link, critical, long_link };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::sync: return "sync";
        case Classification::stable_pattern: return "stable-pattern";
        case Classification::degenerate: return "degenerate";
        case Classification::unstable: return "unstable";
    }
    return "?";
}

inline const char* to_string(LinkClass c) {
    switch (c) {
        case LinkClass::short_link: return "short";
        case LinkClass::critical: return "critical";
        case LinkClass::long_link: return "long";
    }
    return "?";
}

struct ClassifyOptions {
    double residual_tol = 1e-5;
    double eig_zero = 1e-8;
    double eig_tol = 1e-6;
    double critical_band = 1e-9;
    /// Band used once the spectrum is degenerate; angles at such roots are
    /// only accurate to about the cube root of the residual.
    double degenerate_critical_band = 1e-4;
    double sync_tol = 1e-4;  // max |angle difference| of a sync state
};

struct Link {
    int u = 0;
    int v = 0;
    double delta = 0.0;  // theta_u - theta_v wrapped into (-pi, pi]
    LinkClass cls = LinkClass::short_link;
};

struct Winding {
    Cycle cycle;
    int w = 0;
};

struct FixedPointReport {
    Phases theta;  // gauge-normalized
    double residual = 0.0;
    double energy = 0.0;
    Classification classification = Classification::unstable;
    double spectral_gap = 0.0;
    int zero_eigs = 0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<Link> links;
    std::vector<Winding> windings;

    bool stable() const {
        return classification == Classification::sync || classification == Classification::stable_pattern;
    }
    // degenerate only through extra exact zero modes; slow directions with
    // eigenvalues between eig_zero and eig_tol do not qualify
    bool marginal() const { return classification == Classification::degenerate && marginal_spectrum; }
    bool marginal_spectrum = false;
    int long_links() const {
        return static_cast<int>(
            std::count_if(links.begin(), links.end(), [](const Link& l) { return l.cls == LinkClass::long_link; }));
    }
    int max_abs_winding() const {
        int m = 0;
        for (const auto& w : windings) m = std::max(m, std::abs(w.w));
        return m;
    }
};

inline LinkClass classify_link(double delta, double band) {
    const double d = std::abs(delta) - std::numbers::pi / 2.0;
    if (std::abs(d) <= band) return LinkClass::critical;
    return d > 0 ? LinkClass::long_link : LinkClass::short_link;
}

inline std::vector<Link> link_report(const CubicGraph& g, const Phases& theta, double band = 1e-9) {
    std::vector<Link> links;
    links.reserve(g.edges().size());
    for (const auto& e : g.edges()) {
        const double d = wrap_angle(theta[e.u] - theta[e.v]);
        links.push_back({e.u, e.v, d, classify_link(d, band)});
    }
    return links;
}

inline bool is_marginal_spectrum(const std::vector<double>& eig, const ClassifyOptions& o) {
    int zeros = 0;
    for (double l : eig) {
        if (std::abs(l) < o.eig_zero)
            ++zeros;
        else if (l >= -o.eig_tol)
            return false;
    }
    return zeros > 1;
}

/// Classification from the spectrum alone (eigenvalues ascending).
inline Classification classify_spectrum(const std::vector<double>& eig, bool is_sync, const ClassifyOptions& o,
                                        int* zero_count = nullptr, double* gap = nullptr) {
    int zeros = 0, grey = 0, positive = 0;
    double least_negative = -std::numeric_limits<double>::infinity();
    for (double l : eig) {
        const double a = std::abs(l);
        if (a < o.eig_zero)
            ++zeros;
        else if (a <= o.eig_tol)
            ++grey;
        else if (l > 0)
            ++positive;
        if (l < -o.eig_zero) least_negative = std::max(least_negative, l);
    }
    if (zero_count) *zero_count = zeros;
    if (gap) *gap = std::isfinite(least_negative) ? -least_negative : 0.0;
    if (positive > 0) return Classification::unstable;
    if (zeros != 1 || grey > 0) return Classification::degenerate;
    return is_sync ? Classification::sync : Classification::stable_pattern;
}

inline FixedPointReport classify(const CubicGraph& g, const Phases& theta, const ClassifyOptions& o = {}) {
    detail::check_length(g.n(), theta);
    const Network net = Network::from(g);
    FixedPointReport r;
    r.residual = field(net, theta).norm();
    if (!(r.residual < o.residual_tol))
        throw NumericalError("classify: residual " + std::to_string(r.residual) + " exceeds tolerance " +
                             std::to_string(o.residual_tol));
    r.theta = gauge_normalize(theta);
    r.energy = energy(net, theta);
    r.links = link_report(g, theta, o.critical_band);
    bool is_sync = true;
    for (const auto& l : r.links)
        if (std::abs(l.delta) >= o.sync_tol) is_sync = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobian(net, theta), Eigen::EigenvaluesOnly);
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    r.classification = classify_spectrum(r.eigenvalues, is_sync, o, &r.zero_eigs, &r.spectral_gap);
    r.marginal_spectrum = is_marginal_spectrum(r.eigenvalues, o);
    if (r.classification == Classification::degenerate)
        for (auto& l : r.links) l.cls = classify_link(l.delta, std::max(o.critical_band, o.degenerate_critical_band));
    for (auto& c : fundamental_cycles(g)) {
        const int w = winding_number(theta, c);
        r.windings.push_back({std::move(c), w});
    }
    return r;
}

}  // namespace phaselock
