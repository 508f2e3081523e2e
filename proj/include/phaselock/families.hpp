#pragma once

// Constructors for the cubic-graph families with known patterns (and one
// family with none).

#include <string>
#include <utility>
#include <vector>

#include "phaselock/analytic.hpp"
#include "phaselock/graph.hpp"

namespace phaselock {

struct GraphWithPattern {
    CubicGraph graph;
    Phases theta;
};

namespace detail {
inline void require_ladder_size(int n, const char* name) {
    if (n % 2 != 0 || n < 10) throw DomainError(std::string(name) + " requires an even n >= 10");
}

inline void add_ring(std::vector<Edge>& edges, int offset, int len) {
    for (int j = 0; j < len; ++j) edges.push_back(make_edge(offset + j, offset + (j + 1) % len));
}
}  // namespace detail

/// Two n/2-cycles {0..n/2-1} and {n/2..n-1} joined by rungs (j, n/2 + j).
inline CubicGraph double_ring(int n) {
    detail::require_ladder_size(n, "double_ring");
    const int half = n / 2;
    std::vector<Edge> edges;
    detail::add_ring(edges, 0, half);
    detail::add_ring(edges, half, half);
    for (int j = 0; j < half; ++j) edges.push_back(make_edge(j, half + j));
    return CubicGraph(n, std::move(edges), "double_ring(" + std::to_string(n) + ")");
}

/// n-cycle with the diameters (i, i + n/2) as chords.
inline CubicGraph moebius_ladder(int n) {
    detail::require_ladder_size(n, "moebius_ladder");
    std::vector<Edge> edges;
    detail::add_ring(edges, 0, n);
    for (int i = 0; i < n / 2; ++i) edges.push_back(make_edge(i, i + n / 2));
    return CubicGraph(n, std::move(edges), "moebius_ladder(" + std::to_string(n) + ")");
}

/// Double ring on n = 2m vertices with the rungs at ring positions s and s+1
/// crossed (s = twisted_swap_position(m)).
inline CubicGraph twisted_ring(int n) {
    if (n % 2 != 0 || n < 10) throw DomainError("twisted_ring requires n = 2m with m >= 5");
    const int m = n / 2;
    const int s = twisted_swap_position(m);
    std::vector<Edge> edges;
    detail::add_ring(edges, 0, m);
    detail::add_ring(edges, m, m);
    for (int j = 0; j < m; ++j) {
        int partner = j == s ? s + 1 : (j == s + 1 ? s : j);
        edges.push_back(make_edge(j, m + partner));
    }
    return CubicGraph(n, std::move(edges), "twisted_ring(" + std::to_string(n) + ")");
}

/// Rings of five carrying the 5-wave, glued by same-angle pairings so the
/// wave stays an exact fixed point. Needs even n >= 20.
///
/// With m = n / 10 there are 2m rings 1..m and 1'..m'. Letter l (A..E) pairs
/// ring i with ring (i + l)' mod m. For n = 10m + k the k extra vertices are
/// spliced, two per letter, into two existing pairings of that letter.
inline GraphWithPattern high_energy_e(int n) {
    if (n % 2 != 0 || n < 20) throw DomainError("high_energy_e requires an even n >= 20");
    const int m = n / 10;
    const int extra_pairs = (n - 10 * m) / 2;
    auto vertex = [](int ring, int letter) { return 5 * ring + letter; };  // ring in [0, 2m)
    std::vector<Edge> edges;
    Phases th(n);
    for (int r = 0; r < 2 * m; ++r) {
        detail::add_ring(edges, 5 * r, 5);
        for (int l = 0; l < 5; ++l) th[vertex(r, l)] = kTwoPi * l / 5.0;
    }
    // pairing edges, stored per letter so splices can replace them
    std::vector<std::vector<Edge>> pairing(5);
    for (int l = 0; l < 5; ++l)
        for (int i = 0; i < m; ++i) pairing[l].push_back(make_edge(vertex(i, l), vertex(m + (i + l) % m, l)));
    int next = 10 * m;
    for (int l = 0; l < extra_pairs; ++l) {
        const Edge first = pairing[l][0], second = pairing[l][1];
        pairing[l].erase(pairing[l].begin(), pairing[l].begin() + 2);
        const int x1 = next++, x2 = next++;
        th[x1] = th[x2] = kTwoPi * l / 5.0;
        edges.push_back(make_edge(x1, first.u));
        edges.push_back(make_edge(x1, second.u));
        edges.push_back(make_edge(x2, first.v));
        edges.push_back(make_edge(x2, second.v));
        edges.push_back(make_edge(x1, x2));
    }
    for (const auto& p : pairing) edges.insert(edges.end(), p.begin(), p.end());
    return {CubicGraph(n, std::move(edges), "high_energy_e(" + std::to_string(n) + ")"), std::move(th)};
}

/// m copies of twisted_ring(10) carrying the crossed 5-ring pattern. Copies
/// j and j+1 exchange their rungs at outer position j mod 5.
inline GraphWithPattern high_energy_f(int m) {
    if (m < 1) throw DomainError("high_energy_f requires m >= 1");
    const CubicGraph block = twisted_ring(10);
    const Phases block_th = twisted_phases(5);
    const int n = 10 * m;
    std::vector<Edge> edges;
    Phases th(n);
    for (int c = 0; c < m; ++c) {
        for (const auto& e : block.edges()) edges.push_back(make_edge(10 * c + e.u, 10 * c + e.v));
        th.segment(10 * c, 10) = block_th;
    }
    auto inner_partner = [&block](int outer) {
        for (int w : block.neighbors(outer))
            if (w >= 5) return w;
        throw InvalidGraph("block without rung");
    };
    for (int c = 0; c + 1 < m; ++c) {
        const int q = c % 5;
        const int in = inner_partner(q);
        const Edge a = make_edge(10 * c + q, 10 * c + in);
        const Edge b = make_edge(10 * (c + 1) + q, 10 * (c + 1) + in);
        std::erase(edges, a);
        std::erase(edges, b);
        edges.push_back(make_edge(10 * c + q, 10 * (c + 1) + in));
        edges.push_back(make_edge(10 * (c + 1) + q, 10 * c + in));
    }
    return {CubicGraph(n, std::move(edges), "high_energy_f(" + std::to_string(m) + ")"), std::move(th)};
}

/// Path 1..n closed off with short chords so every chordless cycle has at
/// most four vertices. Supported for n = 10 and even n >= 14.
inline CubicGraph patternless_chain(int n) {
    if (n % 2 != 0 || n < 10 || n == 12) throw DomainError("patternless_chain supports n = 10 and even n >= 14");
    std::vector<Edge> edges;
    auto add = [&edges](int a, int b) { edges.push_back(make_edge(a - 1, b - 1)); };  // 1-based
    for (int i = 1; i < n; ++i) add(i, i + 1);
    add(1, 3);
    add(1, 4);
    add(2, 5);
    add(n, n - 2);
    add(n, n - 3);
    add(n - 1, n - 4);
    int a = 6;
    int interior = n - 10;
    const bool six_block = interior % 4 == 2;
    int fours = (interior - (six_block ? 6 : 0)) / 4;
    for (int k = 0; k < fours; ++k, a += 4) {
        add(a, a + 2);
        add(a + 1, a + 3);
    }
    if (six_block) {
        add(a, a + 2);
        add(a + 1, a + 4);
        add(a + 3, a + 5);
    }
    return CubicGraph(n, std::move(edges), "patternless_chain(" + std::to_string(n) + ")");
}

}  // namespace phaselock
