#pragma once

// Simple undirected graphs, the cubic-graph invariant checks, graph6 I/O and
// cycle bases.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phaselock/errors.hpp"

namespace phaselock {

struct Edge {
    int u = 0;
    int v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Orders the endpoints so that u < v.
inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// A general simple undirected graph as decoded from a file. May violate the
/// cubic invariants; see validate_cubic.
struct Graph {
    int n = 0;
    std::vector<Edge> edges;  // sorted, u < v
    std::string id;

    std::vector<int> degrees() const {
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        for (const auto& e : edges) {
            ++deg[e.u];
            ++deg[e.v];
        }
        return deg;
    }
};

struct CubicViolation {
    std::vector<int> bad_degree_vertices;
    std::vector<Edge> self_loops;
    std::vector<Edge> duplicate_edges;
    std::vector<Edge> out_of_range;
    bool odd_order = false;

    bool ok() const {
        return bad_degree_vertices.empty() && self_loops.empty() && duplicate_edges.empty() &&
               out_of_range.empty() && !odd_order;
    }
    std::string describe() const;
};

inline CubicViolation validate_cubic(const Graph& g) {
    CubicViolation r;
    r.odd_order = g.n <= 0 || (g.n % 2) != 0;
    std::vector<int> deg(static_cast<std::size_t>(std::max(g.n, 0)), 0);
    std::vector<Edge> seen;
    seen.reserve(g.edges.size());
    for (const auto& raw : g.edges) {
        if (raw.u < 0 || raw.v < 0 || raw.u >= g.n || raw.v >= g.n) {
            r.out_of_range.push_back(raw);
            continue;
        }
        if (raw.u == raw.v) {
            r.self_loops.push_back(raw);
            ++deg[raw.u];
            continue;
        }
        Edge e = make_edge(raw.u, raw.v);
        ++deg[e.u];
        ++deg[e.v];
        seen.push_back(e);
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i)
        if (seen[i] == seen[i - 1]) r.duplicate_edges.push_back(seen[i]);
    for (int v = 0; v < g.n; ++v)
        if (deg[v] != 3) r.bad_degree_vertices.push_back(v);
    return r;
}

inline std::string CubicViolation::describe() const {
    std::string s;
    auto append_list = [&s](const char* what, const auto& items, auto fmt) {
        if (items.empty()) return;
        if (!s.empty()) s += "; ";
        s += what;
        s += ":";
        for (const auto& it : items) s += " " + fmt(it);
    };
    auto edge_str = [](const Edge& e) { return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")"; };
    if (odd_order) s += "vertex count is not a positive even number";
    append_list("degree != 3 at", bad_degree_vertices, [](int v) { return std::to_string(v); });
    append_list("self-loops", self_loops, edge_str);
    append_list("duplicate edges", duplicate_edges, edge_str);
    append_list("out-of-range edges", out_of_range, edge_str);
    return s.empty() ? "ok" : s;
}

/// Immutable simple 3-regular graph with a fixed neighbour table.
class CubicGraph {
public:
    /// Validates `g`; throws InvalidGraph listing every violation.
    explicit CubicGraph(Graph g) {
        auto report = validate_cubic(g);
        if (!report.ok()) throw InvalidGraph("not a cubic graph: " + report.describe());
        for (auto& e : g.edges) e = make_edge(e.u, e.v);
        std::sort(g.edges.begin(), g.edges.end());
        n_ = g.n;
        edges_ = std::move(g.edges);
        id_ = std::move(g.id);
        nbrs_.assign(static_cast<std::size_t>(n_), {});
        std::vector<int> fill(static_cast<std::size_t>(n_), 0);
        for (const auto& e : edges_) {
            nbrs_[e.u][fill[e.u]++] = e.v;
            nbrs_[e.v][fill[e.v]++] = e.u;
        }
        for (auto& row : nbrs_) std::sort(row.begin(), row.end());
    }

    CubicGraph(int n, std::vector<Edge> edges, std::string id = {})
        : CubicGraph(Graph{n, std::move(edges), std::move(id)}) {}

    int n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::array<int, 3>& neighbors(int v) const { return nbrs_[v]; }
    const std::string& id() const { return id_; }
    CubicGraph with_id(std::string id) const {
        CubicGraph c = *this;
        c.id_ = std::move(id);
        return c;
    }

    bool has_edge(int a, int b) const {
        const auto& row = nbrs_[a];
        return std::find(row.begin(), row.end(), b) != row.end();
    }

    Graph as_graph() const { return Graph{n_, edges_, id_}; }

    friend bool operator==(const CubicGraph& a, const CubicGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::string id_;
    std::vector<std::array<int, 3>> nbrs_;
};

// ---------------------------------------------------------------------------
// graph6 (short header form only, n <= 62)

namespace detail {
inline std::size_t graph6_body_bytes(int n) {
    const std::size_t bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    return (bits + 5) / 6;
}
}  // namespace detail

inline Graph parse_graph6(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    if (line.starts_with(">>graph6<<")) line.remove_prefix(10);
    if (line.empty()) throw Graph6Error("empty graph6 record");
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto c = static_cast<unsigned char>(line[i]);
        if (c < 63 || c > 126)
            throw Graph6Error("byte " + std::to_string(c) + " at offset " + std::to_string(i) +
                              " outside 63..126");
    }
    const int n = static_cast<unsigned char>(line[0]) - 63;
    if (n == 63) throw Graph6Error("long-form graph6 header (n > 62) is not supported");
    const std::size_t need = detail::graph6_body_bytes(n);
    if (line.size() - 1 < need)
        throw Graph6Error("truncated record: expected " + std::to_string(need) + " body bytes, got " +
                          std::to_string(line.size() - 1));
    if (line.size() - 1 > need)
        throw Graph6Error("trailing bytes after record: expected " + std::to_string(need) + " body bytes, got " +
                          std::to_string(line.size() - 1));

    Graph g;
    g.n = n;
    std::size_t bit = 0;
    auto get_bit = [&](std::size_t k) {
        const int byte = static_cast<unsigned char>(line[1 + k / 6]) - 63;
        return (byte >> (5 - static_cast<int>(k % 6))) & 1;
    };
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u, ++bit)
            if (get_bit(bit)) g.edges.push_back(Edge{u, v});
    for (std::size_t k = bit; k < need * 6; ++k)
        if (get_bit(k)) throw Graph6Error("nonzero padding bits");
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

inline std::string encode_graph6(const Graph& g) {
    if (g.n < 0 || g.n > 62) throw Graph6Error("graph6 short form supports 0..62 vertices");
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n), 0);
    for (const auto& e : g.edges) {
        adj[static_cast<std::size_t>(e.u) * g.n + e.v] = 1;
        adj[static_cast<std::size_t>(e.v) * g.n + e.u] = 1;
    }
    const std::size_t nbytes = detail::graph6_body_bytes(g.n);
    std::vector<int> body(nbytes, 0);
    std::size_t bit = 0;
    for (int v = 1; v < g.n; ++v)
        for (int u = 0; u < v; ++u, ++bit)
            if (adj[static_cast<std::size_t>(u) * g.n + v]) body[bit / 6] |= 1 << (5 - bit % 6);
    std::string out(1, static_cast<char>(63 + g.n));
    for (int b : body) out.push_back(static_cast<char>(63 + b));
    return out;
}

inline std::string encode_graph6(const CubicGraph& g) { return encode_graph6(g.as_graph()); }

struct Graph6Record {
    std::size_t line_no = 0;  // 1-based
    Graph graph;
};

/// Reads every non-empty line of a graph6 stream. Records get ids
/// "<label>#<line_no>". Malformed lines throw Graph6Error naming the line.
inline std::vector<Graph6Record> read_graph6_stream(std::istream& in, const std::string& label) {
    std::vector<Graph6Record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            Graph g = parse_graph6(line);
            g.id = label + "#" + std::to_string(line_no);
            out.push_back({line_no, std::move(g)});
        } catch (const Graph6Error& e) {
            throw Graph6Error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// structure

inline bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
    for (const auto& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                q.push(w);
            }
    }
    return count == g.n;
}

inline bool is_connected(const CubicGraph& g) { return is_connected(g.as_graph()); }

/// A closed walk v0 -> v1 -> ... -> v_{k-1} -> v0; the start is not repeated.
using Cycle = std::vector<int>;
using CycleList = std::vector<Cycle>;

/// Fundamental cycle basis of a BFS spanning tree rooted at vertex 0. One
/// cycle per non-tree edge, |E| - n + 1 in total.
inline CycleList fundamental_cycles(const CubicGraph& g) {
    const int n = g.n();
    std::vector<int> parent(static_cast<std::size_t>(n), -1), depth(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    depth[0] = 0;
    q.push(0);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : g.neighbors(v))
            if (depth[w] < 0) {
                depth[w] = depth[v] + 1;
                parent[w] = v;
                q.push(w);
            }
    }
    for (int v = 0; v < n; ++v)
        if (depth[v] < 0) throw InvalidGraph("fundamental_cycles requires a connected graph");

    CycleList cycles;
    for (const auto& e : g.edges()) {
        if (parent[e.u] == e.v || parent[e.v] == e.u) continue;
        std::vector<int> up, down;  // u -> lca, v -> lca
        int a = e.u, b = e.v;
        while (depth[a] > depth[b]) {
            up.push_back(a);
            a = parent[a];
        }
        while (depth[b] > depth[a]) {
            down.push_back(b);
            b = parent[b];
        }
        while (a != b) {
            up.push_back(a);
            down.push_back(b);
            a = parent[a];
            b = parent[b];
        }
        Cycle c = up;
        c.push_back(a);
        c.insert(c.end(), down.rbegin(), down.rend());
        cycles.push_back(std::move(c));
    }
    return cycles;
}

inline bool is_cycle_in(const CubicGraph& g, const Cycle& c) {
    if (c.size() < 3) return false;
    std::vector<int> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const int a = c[i], b = c[(i + 1) % c.size()];
        if (a < 0 || a >= g.n() || b < 0 || b >= g.n() || !g.has_edge(a, b)) return false;
    }
    return true;
}

/// Lengths of all chordless (induced) cycles, each cycle counted once.
/// Exponential in general; intended for the small graphs handled here.
inline std::vector<int> chordless_cycle_lengths(const CubicGraph& g, int max_len = 64) {
    const int n = g.n();
    std::vector<int> lengths;
    std::vector<int> path;
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);

    // Enumerate induced paths starting at the smallest vertex s of the cycle,
    // with the second vertex smaller than the last to count each cycle once.
    auto extend = [&](auto&& self, int s) -> void {
        const int last = path.back();
        if (static_cast<int>(path.size()) >= max_len) return;
        for (int w : g.neighbors(last)) {
            if (w <= s || on_path[w]) continue;
            // w must not be adjacent to any path vertex other than `last`,
            // except s which closes the cycle.
            bool touches_s = g.has_edge(w, s);
            bool chord = false;
            for (std::size_t i = 1; i + 1 < path.size(); ++i)
                if (g.has_edge(w, path[i])) {
                    chord = true;
                    break;
                }
            if (chord) continue;
            if (touches_s && path.size() >= 2) {
                if (path[1] < w) lengths.push_back(static_cast<int>(path.size()) + 1);
                continue;
            }
            path.push_back(w);
            on_path[w] = 1;
            self(self, s);
            on_path[w] = 0;
            path.pop_back();
        }
    };
    for (int s = 0; s < n; ++s) {
        path = {s};
        on_path[s] = 1;
        extend(extend, s);
        on_path[s] = 0;
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

}  // namespace phaselock
