#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <sstream>
#include <map>
#include <random>
#include <set>

#include "phaselock/families.hpp"
#include "phaselock/graph.hpp"
#include "test_support.hpp"

using namespace phaselock;

namespace {

std::set<Edge> edge_set(const Graph& g) {
    std::set<Edge> s;
    for (auto e : g.edges) s.insert(make_edge(e.u, e.v));
    return s;
}

// every vertex subset whose induced subgraph is a single cycle
std::vector<int> brute_chordless_lengths(const CubicGraph& g) {
    const int n = g.n();
    std::vector<int> lengths;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const int k = std::popcount(mask);
        if (k < 3) continue;
        bool ok = true;
        int first = -1;
        for (int v = 0; v < n && ok; ++v) {
            if (!(mask >> v & 1)) continue;
            if (first < 0) first = v;
            int deg = 0;
            for (int w : g.neighbors(v))
                if (mask >> w & 1) ++deg;
            ok = deg == 2;
        }
        if (!ok) continue;
        // connected?
        std::uint32_t seen = 1u << first, frontier = seen;
        while (frontier) {
            std::uint32_t next = 0;
            for (int v = 0; v < n; ++v)
                if (frontier >> v & 1)
                    for (int w : g.neighbors(v))
                        if ((mask >> w & 1) && !(seen >> w & 1)) next |= 1u << w;
            seen |= next;
            frontier = next;
        }
        if (seen == mask) lengths.push_back(k);
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

}  // namespace

TEST(Graph6, DecodesK4) {
    // 'C' = 63 + 4; '~' = 63 + 0b111111, all six upper-triangle bits set
    Graph g = parse_graph6("C~");
    EXPECT_EQ(g.n, 4);
    std::set<Edge> want;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) want.insert({i, j});
    EXPECT_EQ(edge_set(g), want);
    EXPECT_TRUE(validate_cubic(g).ok());
}

TEST(Graph6, TwoVerticesNoEdges) {
    Graph g = parse_graph6("A?");
    EXPECT_EQ(g.n, 2);
    EXPECT_TRUE(g.edges.empty());
    auto v = validate_cubic(g);
    EXPECT_FALSE(v.ok());
    EXPECT_EQ(v.bad_degree_vertices.size(), 2u);
}

TEST(Graph6, DecodesK33) {
    // column order x(0,1) x(0,2) x(1,2) x(0,3) ... ; K(3,3) bits:
    // 000111 111011 100(000) -> 7, 59, 32 -> 'F' 'z' '_'
    Graph g = parse_graph6("EFz_");
    EXPECT_EQ(g.n, 6);
    std::set<Edge> want;
    for (int a = 0; a < 3; ++a)
        for (int b = 3; b < 6; ++b) want.insert({a, b});
    EXPECT_EQ(edge_set(g), want);
    EXPECT_TRUE(validate_cubic(g).ok());
}

TEST(Graph6, EncodeRoundTripsHandExamples) {
    for (const char* s : {"C~", "A?", "EFz_"}) EXPECT_EQ(encode_graph6(parse_graph6(s)), s);
}

TEST(Graph6, RejectsByteOutOfRange) {
    EXPECT_THROW(parse_graph6("C\x7f"), Graph6Error);
    EXPECT_THROW(parse_graph6("C>"), Graph6Error);
}

TEST(Graph6, RejectsTruncatedAndTrailing) {
    EXPECT_THROW(parse_graph6("EFz"), Graph6Error);
    EXPECT_THROW(parse_graph6("E"), Graph6Error);
    EXPECT_THROW(parse_graph6("EFz__"), Graph6Error);
    EXPECT_THROW(parse_graph6(""), Graph6Error);
}

TEST(Graph6, RejectsNonzeroPadding) {
    // last byte of K(3,3) with a padding bit set
    EXPECT_THROW(parse_graph6("EFz`"), Graph6Error);
}

TEST(Graph6, RejectsLongForm) {
    EXPECT_THROW(parse_graph6("~??~"), Graph6Error);
}

TEST(Graph6, StreamReportsLineNumber) {
    std::istringstream in("C~\n\nC\x7f\n");
    try {
        read_graph6_stream(in, "x");
        FAIL() << "expected Graph6Error";
    } catch (const Graph6Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Graph6, DatasetFilesRoundTrip) {
    for (const char* name : {"cubic10.g6", "cubic12.g6", "cubic14.g6"}) {
        std::ifstream in(std::string(PHASELOCK_DATA_DIR) + "/" + name);
        std::string line;
        int count = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ASSERT_EQ(encode_graph6(parse_graph6(line)), line) << name;
            ++count;
        }
        EXPECT_GT(count, 0);
    }
}

TEST(Validate, FiveCycle) {
    Graph c5{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}, "c5"};
    auto v = validate_cubic(c5);
    EXPECT_FALSE(v.ok());
    EXPECT_TRUE(v.odd_order);
    EXPECT_EQ(v.bad_degree_vertices.size(), 5u);
}

TEST(Validate, SelfLoopAndDuplicate) {
    Graph g{4, {{0, 0}, {0, 1}, {0, 1}}, ""};
    auto v = validate_cubic(g);
    EXPECT_FALSE(v.ok());
    EXPECT_FALSE(v.self_loops.empty());
    EXPECT_FALSE(v.duplicate_edges.empty());
    EXPECT_THROW(CubicGraph{g}, InvalidGraph);
}

TEST(Connectivity, Basics) {
    EXPECT_TRUE(is_connected(CubicGraph(parse_graph6("C~"))));
    std::vector<Edge> two;
    for (int off : {0, 4})
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) two.push_back({off + i, off + j});
    CubicGraph twice(8, two);
    EXPECT_FALSE(is_connected(twice));
    EXPECT_TRUE(is_connected(double_ring(10)));
    EXPECT_THROW(fundamental_cycles(twice), InvalidGraph);
}

TEST(Families, DoubleRing) {
    EXPECT_EQ(double_ring(10).edges().size(), 15u);
    const auto g12 = double_ring(12);
    EXPECT_EQ(g12.edges().size(), 18u);
    EXPECT_EQ(chordless_cycle_lengths(g12).front(), 4);  // girth
    EXPECT_THROW(double_ring(8), DomainError);
    EXPECT_THROW(double_ring(11), DomainError);
}

TEST(Families, Moebius) {
    EXPECT_EQ(moebius_ladder(10).edges().size(), 15u);
    EXPECT_TRUE(is_connected(moebius_ladder(10)));
    EXPECT_THROW(moebius_ladder(9), DomainError);
}

TEST(Families, TwistedRingDiffersFromDoubleRing) {
    const auto t = twisted_ring(10), d = double_ring(10);
    EXPECT_NE(t.edges(), d.edges());
    EXPECT_NE(chordless_cycle_lengths(t), chordless_cycle_lengths(d));
    EXPECT_EQ(t.as_graph().degrees(), d.as_graph().degrees());
    // m = 5, k = 2: outer 2 <-> inner 3 and outer 3 <-> inner 2
    EXPECT_TRUE(t.has_edge(2, 8));
    EXPECT_TRUE(t.has_edge(3, 7));
    EXPECT_FALSE(t.has_edge(2, 7));
    EXPECT_THROW(twisted_ring(8), DomainError);
    for (int m = 5; m <= 12; ++m) EXPECT_TRUE(is_connected(twisted_ring(2 * m)));
}

TEST(Families, HighEnergyE) {
    for (int n : {20, 22, 24, 26, 28, 30, 32}) {
        const auto gp = high_energy_e(n);
        EXPECT_EQ(gp.graph.n(), n);
        EXPECT_EQ(gp.graph.edges().size(), 3u * n / 2);
        EXPECT_TRUE(is_connected(gp.graph)) << n;
    }
    EXPECT_THROW(high_energy_e(18), DomainError);
    EXPECT_THROW(high_energy_e(21), DomainError);
}

TEST(Families, HighEnergyF) {
    EXPECT_EQ(high_energy_f(1).graph, twisted_ring(10));
    EXPECT_EQ(high_energy_f(2).graph.n(), 20);
    for (int m = 2; m <= 7; ++m) EXPECT_TRUE(is_connected(high_energy_f(m).graph)) << m;
    EXPECT_THROW(high_energy_f(0), DomainError);
}

TEST(Families, PatternlessChain) {
    const auto g = patternless_chain(16);
    EXPECT_EQ(g.edges().size(), 24u);
    EXPECT_TRUE(is_connected(g));
    for (int n : {10, 14, 16, 18, 20}) {
        const auto c = patternless_chain(n);
        const auto brute = brute_chordless_lengths(c);
        ASSERT_FALSE(brute.empty());
        EXPECT_LE(brute.back(), 4) << n;
        EXPECT_EQ(chordless_cycle_lengths(c), brute) << n;
    }
    EXPECT_THROW(patternless_chain(12), DomainError);
    EXPECT_THROW(patternless_chain(15), DomainError);
    EXPECT_THROW(patternless_chain(8), DomainError);
}

TEST(Cycles, FundamentalBasisSize) {
    EXPECT_EQ(fundamental_cycles(CubicGraph(parse_graph6("C~"))).size(), 3u);
    EXPECT_EQ(fundamental_cycles(double_ring(10)).size(), 6u);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = testkit::random_cubic(14, rng);
        const auto cycles = fundamental_cycles(g);
        EXPECT_EQ(cycles.size(), static_cast<std::size_t>(g.n() / 2 + 1));
        for (const auto& c : cycles) EXPECT_TRUE(is_cycle_in(g, c));
    }
}

TEST(Cycles, ChordlessMatchesBruteForce) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = testkit::random_cubic(12, rng);
        EXPECT_EQ(chordless_cycle_lengths(g), brute_chordless_lengths(g));
    }
}

TEST(Datasets, RecordCountsAndCubic) {
    const std::map<std::string, std::size_t> want{{"cubic10.g6", 19}, {"cubic12.g6", 85}, {"cubic14.g6", 509}};
    for (const auto& [name, count] : want) {
        const auto gs = testkit::load_dataset(name);
        EXPECT_EQ(gs.size(), count) << name;
        for (const auto& g : gs) EXPECT_TRUE(is_connected(g));
    }
}
