#pragma once

// Locating the 12-vertex long-link graph in a dataset and relabeling it so it
// differs from double_ring(12) by a few edges, which makes the homotopy from
// the double-ring 2-twist well defined.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "phaselock/continuation.hpp"
#include "phaselock/families.hpp"
#include "phaselock/search.hpp"

namespace phaselock {

/// True if the pattern has a long link at angle b and a link at angle a
/// (both from g50_angles) within tol.
inline bool has_g50_signature(const FixedPointReport& r, double tol = 1e-4) {
    const auto [a, b] = g50_angles();
    bool has_a = false, has_b = false;
    for (const auto& l : r.links) {
        const double d = std::abs(l.delta);
        if (std::abs(d - a) < tol) has_a = true;
        if (std::abs(d - b) < tol && l.cls == LinkClass::long_link) has_b = true;
    }
    return has_a && has_b && r.stable();
}

inline bool has_g50_signature(const Phases& theta, const CubicGraph& g, double tol = 1e-4) {
    const auto [a, b] = g50_angles();
    bool has_a = false, has_b = false;
    for (const auto& l : link_report(g, theta)) {
        const double d = std::abs(l.delta);
        if (std::abs(d - a) < tol) has_a = true;
        if (std::abs(d - b) < tol) has_b = true;
    }
    return has_a && has_b;
}

struct G50Location {
    std::size_t index = 0;  // 0-based record index
    bool by_fallback = false;  // false: found at the nominal record
    GraphReport report;
    std::size_t pattern = 0;  // index into report.patterns
};

/// Checks record `nominal` (0-based) first, then every record in order, for a
/// pattern with the (a, b) signature.
inline std::optional<G50Location> locate_g50(const std::vector<CubicGraph>& graphs, const SearchConfig& cfg,
                                             std::size_t nominal = 49) {
    auto check = [&](std::size_t i) -> std::optional<G50Location> {
        GraphReport rep = search_graph(graphs[i], cfg);
        for (std::size_t k = 0; k < rep.patterns.size(); ++k)
            if (has_g50_signature(rep.patterns[k].report)) return G50Location{i, i != nominal, std::move(rep), k};
        return std::nullopt;
    };
    if (nominal < graphs.size())
        if (auto hit = check(nominal)) return hit;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (i == nominal) continue;
        if (auto hit = check(i)) return hit;
    }
    return std::nullopt;
}

/// Visits every cubic graph obtained from g by deleting k edges and adding k
/// new ones (none of them an edge of g), in a fixed order. The visitor
/// returns true to stop.
inline void for_each_rewiring(const CubicGraph& g, int k,
                              const std::function<bool(const CubicGraph&, const std::vector<Edge>&,
                                                       const std::vector<Edge>&)>& visit) {
    const auto& edges = g.edges();
    const int m = static_cast<int>(edges.size());
    std::vector<int> pick(k);
    bool stop = false;
    auto with_removed = [&](const std::vector<Edge>& removed) {
        std::vector<int> deficit(g.n(), 0);
        for (const auto& e : removed) {
            ++deficit[e.u];
            ++deficit[e.v];
        }
        std::vector<int> verts;
        for (int v = 0; v < g.n(); ++v)
            if (deficit[v]) verts.push_back(v);
        std::vector<Edge> cand;
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                if (!g.has_edge(verts[i], verts[j])) cand.push_back(make_edge(verts[i], verts[j]));
        std::vector<Edge> added;
        auto choose = [&](auto&& self, std::size_t from) -> void {
            if (stop) return;
            if (static_cast<int>(added.size()) == k) {
                for (int d : deficit)
                    if (d) return;
                std::vector<Edge> es;
                for (const auto& e : edges)
                    if (std::find(removed.begin(), removed.end(), e) == removed.end()) es.push_back(e);
                es.insert(es.end(), added.begin(), added.end());
                CubicGraph h(g.n(), std::move(es));
                if (is_connected(h) && visit(h, removed, added)) stop = true;
                return;
            }
            for (std::size_t c = from; c < cand.size() && !stop; ++c) {
                const auto e = cand[c];
                if (!deficit[e.u] || !deficit[e.v]) continue;
                --deficit[e.u];
                --deficit[e.v];
                added.push_back(e);
                self(self, c + 1);
                added.pop_back();
                ++deficit[e.u];
                ++deficit[e.v];
            }
        };
        choose(choose, 0);
    };
    auto rec = [&](auto&& self, int depth, int from) -> void {
        if (stop) return;
        if (depth == k) {
            std::vector<Edge> removed;
            for (int i : pick) removed.push_back(edges[i]);
            with_removed(removed);
            return;
        }
        for (int i = from; i < m && !stop; ++i) {
            pick[depth] = i;
            self(self, depth + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
}

struct AlignedG50 {
    CubicGraph graph;  // relabeled to share all but `k` edges with double_ring(12)
    std::vector<Edge> removed, added;
    BranchTrace trace;
};

/// Finds a relabeling of `target` reachable from double_ring(12) by a k-edge
/// rewiring such that the 2-twist continues to a pattern with the (a, b)
/// signature at p = 0. Candidates are filtered by chordless-cycle spectrum.
inline std::optional<AlignedG50> align_g50(const CubicGraph& target, int k = 3, const TraceOptions& topts = {}) {
    const CubicGraph ring = double_ring(12);
    const Phases start = double_ring_phases(12);
    const auto want = chordless_cycle_lengths(target);
    std::optional<AlignedG50> found;
    for_each_rewiring(ring, k, [&](const CubicGraph& h, const std::vector<Edge>& rem, const std::vector<Edge>& add) {
        if (chordless_cycle_lengths(h) != want) return false;
        BranchTrace tr;
        try {
            tr = trace_branch(Homotopy(ring, h), start, -1.0, topts);
        } catch (const Error&) {
            return false;
        }
        const auto end = tr.at(0.0);
        if (!end || end->min_eig > topts.eig_tol) return false;
        if (!has_g50_signature(end->theta, h)) return false;
        found = AlignedG50{h.with_id(target.id()), rem, add, std::move(tr)};
        return true;
    });
    return found;
}

}  // namespace phaselock
