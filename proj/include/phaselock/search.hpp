#pragma once

// Monte Carlo pattern discovery: uniform initial phases, gradient flow,
// Newton refinement, Jacobian verification, energy-based deduplication and
// basin-fraction statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "phaselock/dynamics.hpp"

namespace phaselock {

// ---------------------------------------------------------------------------
// counter-based seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, used to key trial streams by graph id.
inline std::uint64_t hash_id(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t trial_key(std::uint64_t master_seed, std::uint64_t graph_key, std::uint64_t trial) {
    return splitmix64(splitmix64(master_seed ^ splitmix64(graph_key)) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

/// i.i.d. uniform angles in [0, 2 pi); coordinate v is a pure function of
/// (key, v).
inline Phases sample_initial(int n, std::uint64_t key) {
    Phases th(n);
    for (int v = 0; v < n; ++v) {
        const std::uint64_t bits = splitmix64(key + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(v + 1));
        th[v] = static_cast<double>(bits >> 11) * 0x1.0p-53 * kTwoPi;
    }
    return th;
}

inline Phases sample_initial(int n, std::uint64_t master_seed, std::string_view graph_id, std::uint64_t trial) {
    return sample_initial(n, trial_key(master_seed, hash_id(graph_id), trial));
}

// ---------------------------------------------------------------------------
// per-trial pipeline

struct SearchConfig {
    int k_samp = 5000;
    std::uint64_t master_seed = 1;
    double residual_tol = 1e-5;
    bool refine = true;
    double t_max = 2000.0;
    double dedup_energy_tol = 1e-6;
    double capture_residual = 1e-3;  // flow target before Newton
    int threads = 1;
    int max_saddle_escapes = 5;
    /// Count negative-semidefinite degenerate fixed points (links pinned at
    /// +-pi/2 with an extra zero mode) as patterns.
    bool count_marginal = true;
    ClassifyOptions classify;

    /// 5000 trials for n <= 12, 10000 above.
    static int default_k_samp(int n) { return n <= 12 ? 5000 : 10000; }
};

enum class TrialKind { sync, pattern, degenerate, unstable, timeout };

struct TrialOutcome {
    TrialKind kind = TrialKind::timeout;
    double energy = 0.0;
    double residual = 0.0;
    Phases theta;  // kept for pattern hits only
};

namespace detail {

inline bool near_sync(const Network& net, const Phases& th, double tol) {
    for (const auto& e : net.edges)
        if (std::abs(wrap_angle(th[e.u] - th[e.v])) >= tol) return false;
    return true;
}

/// Flow, refine and classify one initial condition. Saddle captures are
/// kicked off along the unstable eigenvector and re-flowed.
inline TrialOutcome run_trial(FlowIntegrator& integ, Phases theta, const SearchConfig& cfg) {
    const Network& net = integ.network();
    TrialOutcome out;
    FlowOptions fo;
    fo.t_max = cfg.t_max;
    fo.residual_tol = cfg.refine ? cfg.capture_residual : cfg.residual_tol;
    double t_used = 0.0;
    for (int attempt = 0; attempt <= cfg.max_saddle_escapes; ++attempt) {
        fo.t_max = cfg.t_max - t_used;
        if (fo.t_max <= 0) break;
        FlowOutcome fl = integ.run(std::move(theta), fo);
        t_used += fl.time;
        theta = std::move(fl.theta);
        if (!fl.converged) {
            out.kind = TrialKind::timeout;
            out.residual = fl.residual;
            return out;
        }
        Phases point = theta;
        double residual = fl.residual;
        if (cfg.refine) {
            NewtonOptions no;
            no.capture_radius = std::max(cfg.capture_residual * 1.0001, 1e-12);
            RefineResult rr = newton_refine(net, theta, no);
            if (!rr.usable()) {
                // try again closer in before giving up
                FlowOptions tight = fo;
                tight.residual_tol = cfg.residual_tol;
                tight.t_max = std::max(cfg.t_max - t_used, 0.0);
                FlowOutcome f2 = integ.run(theta, tight);
                t_used += f2.time;
                if (!f2.converged) {
                    out.kind = TrialKind::timeout;
                    out.residual = f2.residual;
                    return out;
                }
                theta = f2.theta;
                rr = newton_refine(net, theta, no);
                if (!rr.usable()) {
                    out.kind = TrialKind::degenerate;
                    out.residual = f2.residual;
                    return out;
                }
            }
            point = rr.theta;
            residual = rr.residual;
        }
        out.residual = residual;
        if (near_sync(net, point, cfg.classify.sync_tol)) {
            out.kind = TrialKind::sync;
            return out;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobian(net, point));
        const auto& ev = es.eigenvalues();
        std::vector<double> eig(ev.data(), ev.data() + ev.size());
        const Classification c = classify_spectrum(eig, false, cfg.classify);
        if (c == Classification::stable_pattern) {
            out.kind = TrialKind::pattern;
            out.energy = energy(net, point);
            out.theta = std::move(point);
            return out;
        }
        if (c == Classification::degenerate) {
            if (cfg.count_marginal && is_marginal_spectrum(eig, cfg.classify)) {
                out.kind = TrialKind::pattern;
                out.energy = energy(net, point);
                out.theta = std::move(point);
            } else {
                out.kind = TrialKind::degenerate;
            }
            return out;
        }
        // saddle: step off along the most unstable direction, on the side
        // the trajectory was approaching from
        const Eigen::VectorXd dir = es.eigenvectors().col(ev.size() - 1);
        const double side = (theta - point).dot(dir) >= 0 ? 1.0 : -1.0;
        theta = point + 1e-2 * side * dir;
        out.kind = TrialKind::unstable;
    }
    out.kind = TrialKind::unstable;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// reports

struct PatternStats {
    FixedPointReport report;
    int hits = 0;
    double fraction = 0.0;
    double std_error = 0.0;  // sqrt(f (1 - f) / k_samp)
    int first_trial = 0;
};

struct GraphReport {
    std::string graph_id;
    int n = 0;
    int k_samp = 0;
    std::uint64_t master_seed = 0;
    std::vector<PatternStats> patterns;  // ascending energy
    int sync_hits = 0;
    int degenerate = 0;
    int unstable = 0;
    int timeouts = 0;

    double sync_fraction() const { return k_samp ? static_cast<double>(sync_hits) / k_samp : 0.0; }
};

inline double binomial_stderr(int hits, int trials) {
    if (trials <= 0) return 0.0;
    const double f = static_cast<double>(hits) / trials;
    return std::sqrt(f * (1.0 - f) / trials);
}

/// Groups sorted energies into chains whose consecutive gaps are <= tol.
/// Returns index groups into the input.
inline std::vector<std::vector<std::size_t>> energy_clusters(const std::vector<double>& energies, double tol) {
    std::vector<std::size_t> order(energies.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || energies[order[k]] - energies[order[k - 1]] > tol) groups.emplace_back();
        groups.back().push_back(order[k]);
    }
    return groups;
}

/// One representative (lowest residual, earliest on ties) per energy chain.
template <class T>
std::vector<T> dedup_by_energy(const std::vector<T>& items, double tol) {
    std::vector<double> e;
    e.reserve(items.size());
    for (const auto& it : items) e.push_back(it.energy);
    std::vector<T> out;
    for (const auto& group : energy_clusters(e, tol)) {
        std::size_t best = group.front();
        for (std::size_t i : group)
            if (items[i].residual < items[best].residual || (items[i].residual == items[best].residual && i < best))
                best = i;
        out.push_back(items[best]);
    }
    return out;
}

/// Runs trials [first, last) of the search into `slots`.
inline void run_trial_range(const CubicGraph& g, const SearchConfig& cfg, std::uint64_t graph_key, int first,
                            int last, std::vector<TrialOutcome>& slots) {
    FlowIntegrator integ(Network::from(g));
    for (int t = first; t < last; ++t) {
        Phases th0 = sample_initial(g.n(), trial_key(cfg.master_seed, graph_key, static_cast<std::uint64_t>(t)));
        slots[t] = detail::run_trial(integ, std::move(th0), cfg);
    }
}

/// Reduces per-trial outcomes (indexed by trial) into a report.
inline GraphReport reduce_trials(const CubicGraph& g, const SearchConfig& cfg, std::vector<TrialOutcome> trials) {
    GraphReport rep;
    rep.graph_id = g.id();
    rep.n = g.n();
    rep.k_samp = static_cast<int>(trials.size());
    rep.master_seed = cfg.master_seed;
    std::vector<double> energies;
    std::vector<int> hit_trials;
    for (int t = 0; t < rep.k_samp; ++t) {
        switch (trials[t].kind) {
            case TrialKind::sync: ++rep.sync_hits; break;
            case TrialKind::degenerate: ++rep.degenerate; break;
            case TrialKind::unstable: ++rep.unstable; break;
            case TrialKind::timeout: ++rep.timeouts; break;
            case TrialKind::pattern:
                energies.push_back(trials[t].energy);
                hit_trials.push_back(t);
                break;
        }
    }
    ClassifyOptions strict = cfg.classify;
    for (const auto& group : energy_clusters(energies, cfg.dedup_energy_tol)) {
        std::size_t best = group.front();
        for (std::size_t i : group) {
            const auto& a = trials[hit_trials[i]];
            const auto& b = trials[hit_trials[best]];
            if (a.residual < b.residual || (a.residual == b.residual && hit_trials[i] < hit_trials[best])) best = i;
        }
        PatternStats ps;
        const auto& rep_trial = trials[hit_trials[best]];
        ps.report = classify(g, rep_trial.theta, strict);
        ps.hits = static_cast<int>(group.size());
        ps.fraction = static_cast<double>(ps.hits) / rep.k_samp;
        ps.std_error = binomial_stderr(ps.hits, rep.k_samp);
        ps.first_trial = hit_trials[*std::min_element(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
            return hit_trials[a] < hit_trials[b];
        })];
        rep.patterns.push_back(std::move(ps));
    }
    return rep;
}

inline GraphReport search_graph(const CubicGraph& g, const SearchConfig& cfg) {
    if (cfg.k_samp < 1) throw DomainError("k_samp must be >= 1");
    if (!is_connected(g)) throw InvalidGraph("search_graph requires a connected graph");
    const std::uint64_t key = hash_id(g.id());
    std::vector<TrialOutcome> trials(static_cast<std::size_t>(cfg.k_samp));
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, cfg.k_samp);
    if (threads <= 1) {
        run_trial_range(g, cfg, key, 0, cfg.k_samp, trials);
    } else {
        std::vector<std::jthread> pool;
        const int chunk = (cfg.k_samp + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int first = w * chunk, last = std::min(cfg.k_samp, first + chunk);
            if (first >= last) break;
            pool.emplace_back([&, first, last] { run_trial_range(g, cfg, key, first, last, trials); });
        }
    }
    return reduce_trials(g, cfg, std::move(trials));
}

// ---------------------------------------------------------------------------
// dataset-level statistics

struct TableRow {
    int n = 0;
    int total = 0;
    std::vector<int> counts;  // counts[k] = graphs with exactly k patterns

    int count(std::size_t k) const { return k < counts.size() ? counts[k] : 0; }
    double fraction(std::size_t k) const { return total ? static_cast<double>(count(k)) / total : 0.0; }
    /// Fraction of graphs with at least one pattern.
    double supporting_fraction() const { return total ? 1.0 - fraction(0) : 0.0; }
};

/// Histogram of pattern counts, one row per vertex count (ascending n).
/// Throws DomainError on duplicate graph ids.
inline std::vector<TableRow> aggregate(const std::vector<GraphReport>& reports) {
    std::set<std::string> ids;
    std::map<int, TableRow> rows;
    for (const auto& r : reports) {
        if (!ids.insert(r.graph_id).second) throw DomainError("duplicate graph id in aggregate: " + r.graph_id);
        auto& row = rows[r.n];
        row.n = r.n;
        ++row.total;
        const std::size_t k = r.patterns.size();
        if (row.counts.size() <= k) row.counts.resize(k + 1, 0);
        ++row.counts[k];
    }
    std::vector<TableRow> out;
    for (auto& [n, row] : rows) out.push_back(std::move(row));
    return out;
}

struct ScatterPoint {
    std::string graph_id;
    int pattern_idx = 0;
    double energy = 0.0;
    double basin_fraction = 0.0;
    double basin_stderr = 0.0;
    double spectral_gap = 0.0;
    int long_links = 0;
    int max_winding = 0;
    int cluster_id = 0;
    double fit = 0.0;  // exp(-1.5 energy)
};

inline double basin_fit(double energy) { return std::exp(-1.5 * energy); }

/// Flattens reports into scatter points and labels energy clusters: sorted
/// energies are split wherever the gap exceeds gap_threshold.
inline std::vector<ScatterPoint> cluster_and_fit(const std::vector<GraphReport>& reports, double gap_threshold = 2.5) {
    std::vector<ScatterPoint> pts;
    for (const auto& r : reports)
        for (std::size_t i = 0; i < r.patterns.size(); ++i) {
            const auto& p = r.patterns[i];
            ScatterPoint s;
            s.graph_id = r.graph_id;
            s.pattern_idx = static_cast<int>(i);
            s.energy = p.report.energy;
            s.basin_fraction = p.fraction;
            s.basin_stderr = p.std_error;
            s.spectral_gap = p.report.spectral_gap;
            s.long_links = p.report.long_links();
            s.max_winding = p.report.max_abs_winding();
            s.fit = basin_fit(s.energy);
            pts.push_back(std::move(s));
        }
    std::vector<double> e;
    for (const auto& p : pts) e.push_back(p.energy);
    const auto groups = energy_clusters(e, gap_threshold);
    for (std::size_t c = 0; c < groups.size(); ++c)
        for (std::size_t i : groups[c]) pts[i].cluster_id = static_cast<int>(c);
    return pts;
}

inline int cluster_count(const std::vector<ScatterPoint>& pts) {
    int m = -1;
    for (const auto& p : pts) m = std::max(m, p.cluster_id);
    return m + 1;
}

}  // namespace phaselock
