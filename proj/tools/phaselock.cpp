// phaselock: search, construct, verify and continue phase-locked patterns of
// the Kuramoto flow on cubic graphs.
//
// Exit codes: 0 ok, 1 usage, 2 input format, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "phaselock/phaselock.hpp"

namespace fs = std::filesystem;
using namespace phaselock;

namespace {

enum Exit { kOk = 0, kUsage = 1, kFormat = 2, kNumerical = 3 };

struct UsageError : Error {
    using Error::Error;
};

struct Globals {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
    std::string format;  // per-command default when empty
};

int resolve_threads(int t) {
    if (t > 0) return t;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Optional tolerance overrides, e.g. PHASELOCK_EIG_TOL=1e-7.
void apply_env(SearchConfig& cfg) {
    auto get = [](const char* name, double& slot) {
        if (const char* v = std::getenv(name)) {
            char* end = nullptr;
            const double x = std::strtod(v, &end);
            if (end == v || *end != '\0' || !(x > 0)) throw UsageError(std::string("bad value for ") + name);
            slot = x;
        }
    };
    get("PHASELOCK_RESIDUAL_TOL", cfg.residual_tol);
    get("PHASELOCK_DEDUP_TOL", cfg.dedup_energy_tol);
    get("PHASELOCK_EIG_ZERO", cfg.classify.eig_zero);
    get("PHASELOCK_EIG_TOL", cfg.classify.eig_tol);
    get("PHASELOCK_CRITICAL_BAND", cfg.classify.critical_band);
    get("PHASELOCK_T_MAX", cfg.t_max);
    cfg.classify.residual_tol = cfg.residual_tol;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Graph6Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Graph6Error(path + ": " + e.what());
    }
}

// First record of a graph6 file as a cubic graph.
CubicGraph read_single_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Graph6Error("cannot open " + path);
    auto recs = read_graph6_stream(in, fs::path(path).stem().string());
    if (recs.empty()) throw Graph6Error(path + ": no graph6 record");
    return CubicGraph(recs.front().graph);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

void write_meta(const std::string& path, json meta) {
    if (path.empty() || path == "-") return;
    std::ofstream out(path, std::ios::binary);
    out << meta.dump(2) << '\n';
}

std::string meta_path_for(const std::string& out) { return out.empty() || out == "-" ? "" : out + ".meta.json"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<GraphReport> load_reports(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Graph6Error(dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json" && e.path().filename().string().rfind("report_", 0) == 0)
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<GraphReport> reps;
    for (const auto& f : files) {
        try {
            reps.push_back(report_from_json(read_json(f.string())));
        } catch (const json::exception& e) {
            throw Graph6Error(f.string() + ": " + e.what());
        }
    }
    return reps;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
    std::string input;
    int ksamp = 0;  // 0: default for n
    int limit = -1;
};

int cmd_search(const Globals& gl, const SearchArgs& a) {
    if (gl.out.empty()) throw UsageError("search needs --out DIR");
    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(a.input);
    if (!in) throw Graph6Error("cannot open " + a.input);
    const auto records = read_graph6_stream(in, fs::path(a.input).stem().string());
    fs::create_directories(gl.out);

    SearchConfig base;
    base.master_seed = gl.seed;
    base.threads = resolve_threads(gl.threads);
    apply_env(base);

    std::vector<GraphReport> reports;
    int skipped = 0;
    for (const auto& rec : records) {
        if (a.limit >= 0 && static_cast<int>(reports.size()) >= a.limit) break;
        if (auto v = validate_cubic(rec.graph); !v.ok()) {
            std::cerr << "warning: " << rec.graph.id << " skipped, not cubic: " << v.describe() << '\n';
            ++skipped;
            continue;
        }
        CubicGraph g(rec.graph);
        if (!is_connected(g)) {
            std::cerr << "warning: " << rec.graph.id << " skipped, disconnected\n";
            ++skipped;
            continue;
        }
        SearchConfig cfg = base;
        cfg.k_samp = a.ksamp > 0 ? a.ksamp : SearchConfig::default_k_samp(g.n());
        GraphReport rep = search_graph(g, cfg);
        char name[64];
        std::snprintf(name, sizeof name, "report_%06zu.json", rec.line_no);
        write_text((fs::path(gl.out) / name).string(), report_json(rep, encode_graph6(g)).dump(2) + "\n");
        reports.push_back(std::move(rep));
    }
    std::ostringstream csv;
    write_aggregate_csv(csv, cluster_and_fit(reports));
    write_text((fs::path(gl.out) / "aggregate.csv").string(), csv.str());
    std::ostringstream table;
    write_table_csv(table, aggregate(reports));
    write_text((fs::path(gl.out) / "table.csv").string(), table.str());
    write_meta((fs::path(gl.out) / "metadata.json").string(),
               {{"input", a.input},
                {"records", records.size()},
                {"searched", reports.size()},
                {"skipped", skipped},
                {"threads", base.threads},
                {"seconds", seconds_since(t0)}});
    return kOk;
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
    std::string family;
    int n = 0;
    std::string pattern;
};

GraphWithPattern build_family(const std::string& family, int n) {
    if (family == "double-ring") return {double_ring(n), double_ring_phases(n)};
    if (family == "moebius") return {moebius_ladder(n), double_ring_phases(n)};
    if (family == "twisted") {
        if (n % 2 != 0) throw DomainError("twisted requires even n");
        return {twisted_ring(n), twisted_phases(n / 2)};
    }
    if (family == "high-e") return high_energy_e(n);
    if (family == "high-f") {
        if (n % 10 != 0 || n < 10) throw DomainError("high-f requires n = 10 m");
        return high_energy_f(n / 10);
    }
    if (family == "chain") return {patternless_chain(n), Phases()};
    throw UsageError("unknown family '" + family + "'");
}

int cmd_construct(const Globals& gl, const ConstructArgs& a) {
    GraphWithPattern gp = build_family(a.family, a.n);
    write_text(gl.out, encode_graph6(gp.graph) + "\n");
    if (!a.pattern.empty()) {
        if (gp.theta.size() == 0) throw DomainError("family '" + a.family + "' has no analytic pattern");
        const FixedPointReport r = classify(gp.graph, gp.theta);
        if (r.residual >= 1e-12) throw NumericalError("constructed pattern residual " + std::to_string(r.residual));
        write_text(a.pattern, pattern_json(r).dump(2) + "\n");
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string graph;
    std::string pattern;
    double energy_tol = 1e-9;
};

int cmd_verify(const Globals& gl, const VerifyArgs& a) {
    const CubicGraph g = read_single_graph(a.graph);
    const json pj = read_json(a.pattern);
    FixedPointReport claim;
    try {
        claim = pattern_from_json(pj);
    } catch (const json::exception& e) {
        throw Graph6Error(a.pattern + ": " + e.what());
    }
    if (claim.theta.size() != g.n())
        throw DimensionMismatch("pattern has " + std::to_string(claim.theta.size()) + " phases, graph has " +
                                std::to_string(g.n()) + " vertices");
    ClassifyOptions co;
    json verdict;
    std::vector<std::string> failures;
    const double residual = field(g, claim.theta).norm();
    verdict["residual"] = residual;
    if (residual >= co.residual_tol) {
        failures.push_back("residual " + fmt17(residual) + " is not a fixed point");
    } else {
        const FixedPointReport r = classify(g, claim.theta, co);
        verdict["recomputed"] = pattern_json(r);
        if (pj.contains("energy") && std::abs(r.energy - claim.energy) > a.energy_tol)
            failures.push_back("energy " + fmt17(r.energy) + " differs from claimed " + fmt17(claim.energy));
        if (pj.contains("classification") && r.classification != claim.classification)
            failures.push_back(std::string("classification ") + to_string(r.classification) + " differs from claimed " +
                               to_string(claim.classification));
        if (pj.contains("links")) {
            for (const auto& l : claim.links) {
                auto it = std::find_if(r.links.begin(), r.links.end(),
                                       [&](const Link& x) { return x.u == l.u && x.v == l.v; });
                if (it == r.links.end()) {
                    failures.push_back("claimed link " + std::to_string(l.u) + "-" + std::to_string(l.v) +
                                       " is not an edge");
                } else if (it->cls != l.cls) {
                    failures.push_back("link " + std::to_string(l.u) + "-" + std::to_string(l.v) + " is " +
                                       to_string(it->cls));
                }
            }
        }
        if (pj.contains("windings"))
            for (const auto& w : claim.windings) {
                if (!is_cycle_in(g, w.cycle)) {
                    failures.push_back("claimed winding cycle is not a cycle of the graph");
                } else if (winding_number(claim.theta, w.cycle) != w.w) {
                    failures.push_back("winding number mismatch");
                }
            }
    }
    verdict["pass"] = failures.empty();
    verdict["failures"] = failures;
    write_text(gl.out, verdict.dump(2) + "\n");
    return failures.empty() ? kOk : kNumerical;
}

// ---------------------------------------------------------------------------

struct ReportsArgs {
    std::string reports;
    double gap = 2.5;
};

int cmd_stats(const Globals& gl, const ReportsArgs& a) {
    std::ostringstream os;
    write_table_csv(os, aggregate(load_reports(a.reports)));
    write_text(gl.out, os.str());
    return kOk;
}

int cmd_figure(const Globals& gl, const ReportsArgs& a) {
    std::ostringstream os;
    write_figure_csv(os, cluster_and_fit(load_reports(a.reports), a.gap));
    write_text(gl.out, os.str());
    return kOk;
}

// ---------------------------------------------------------------------------

struct ContinueArgs {
    std::string graph_a, graph_b, start;
    double p_to = -0.5;
    std::string path_json;
};

int cmd_continue(const Globals& gl, const ContinueArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const CubicGraph ga = read_single_graph(a.graph_a);
    const CubicGraph gb = read_single_graph(a.graph_b);
    const json sj = read_json(a.start);
    Phases start;
    try {
        start = to_phases(sj.at("theta").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw Graph6Error(a.start + ": " + e.what());
    }
    const Homotopy h(ga, gb);
    BranchTrace tr;
    try {
        tr = trace_branch(h, start, a.p_to);
    } catch (const DomainError& e) {
        throw NumericalError(e.what());
    }
    std::string text;
    if (gl.format == "json") {
        text = branch_json(tr).dump(2) + "\n";
    } else {
        std::ostringstream os;
        write_branch_csv(os, tr);
        text = os.str();
    }
    write_text(gl.out, text);
    if (!a.path_json.empty()) write_text(a.path_json, branch_json(tr).dump(2) + "\n");
    write_meta(meta_path_for(gl.out), {{"status", to_string(tr.status)},
                                      {"message", tr.message},
                                      {"points", tr.points.size()},
                                      {"seconds", seconds_since(t0)}});
    if (tr.status == TraceStatus::aborted) {
        std::cerr << "continuation aborted: " << tr.message << '\n';
        return kNumerical;
    }
    return kOk;
}

// ---------------------------------------------------------------------------

int cmd_verify_analytic(const Globals& gl) {
    json rows = json::array();
    auto row = [&](std::string name, double value, double residual) {
        rows.push_back({{"name", std::move(name)}, {"value", value}, {"residual", residual}});
    };
    for (int m = 5; m <= 20; ++m) {
        const auto r = twisted_root(m);
        row("twisted_root(" + std::to_string(m) + ")", r.value, r.residual);
    }
    const auto bs = beta_star();
    row("beta_star", bs.value, bs.residual);
    row("f_block_energy", f_block_energy(), 0.0);
    for (int m = 3; m <= 8; ++m) row("loop_energy(" + std::to_string(m) + ")", loop_energy(m), 0.0);
    for (int n : {20, 30}) row("e_energy(" + std::to_string(n) + ")", e_energy(n), 0.0);
    row("e_energy_per_block", e_energy(10), 0.0);
    const auto [a, b] = g50_angles();
    row("g50_a", a, std::abs(std::sin(b - a) - 2.0 * std::sin(a)));
    row("g50_b", b, std::abs(std::sin(b - a) - std::sin(b)));
    row("two_pattern_low", std::acos(0.25), std::abs(2.0 * std::sin(2.0 * std::acos(0.25)) - std::sin(std::acos(0.25))));
    int k = 0;
    for (const auto& r : solve_two_pattern_system()) {
        row("two_pattern_alpha[" + std::to_string(k) + "]", r.alpha, r.residual);
        row("two_pattern_beta[" + std::to_string(k) + "]", r.beta, r.residual);
        ++k;
    }
    for (int n : {10, 12, 14, 18, 30, 50}) {
        const Phases th = double_ring_phases(n);
        row("double_ring_energy(" + std::to_string(n) + ")", energy(double_ring(n), th),
            field(double_ring(n), th).norm());
    }
    std::string text;
    if (gl.format == "csv") {
        std::ostringstream os;
        os << "name,value,residual\n";
        for (const auto& r : rows)
            os << r["name"].get<std::string>() << ',' << fmt17(r["value"].get<double>()) << ','
               << fmt17(r["residual"].get<double>()) << '\n';
        text = os.str();
    } else {
        text = rows.dump(2) + "\n";
    }
    write_text(gl.out, text);
    return kOk;
}

// ---------------------------------------------------------------------------

struct LocateArgs {
    std::string input;
    int ksamp = 5000;
    int index = 50;  // 1-based nominal record
};

int cmd_locate_g50(const Globals& gl, const LocateArgs& a) {
    if (gl.out.empty()) throw UsageError("locate-g50 needs --out DIR");
    std::ifstream in(a.input);
    if (!in) throw Graph6Error("cannot open " + a.input);
    std::vector<CubicGraph> graphs;
    for (const auto& rec : read_graph6_stream(in, fs::path(a.input).stem().string())) graphs.emplace_back(rec.graph);
    SearchConfig cfg;
    cfg.k_samp = a.ksamp;
    cfg.master_seed = gl.seed;
    cfg.threads = resolve_threads(gl.threads);
    apply_env(cfg);
    const auto loc = locate_g50(graphs, cfg, static_cast<std::size_t>(std::max(a.index, 1) - 1));
    if (!loc) throw NumericalError("no graph with the long-link (a, b) pattern found");
    const CubicGraph& target = graphs[loc->index];
    const auto aligned = align_g50(target);
    if (!aligned) throw NumericalError("no 3-edge rewiring of double_ring(12) reaches the located graph");
    fs::create_directories(gl.out);
    const fs::path dir(gl.out);
    const CubicGraph ring = double_ring(12);
    write_text((dir / "double_ring12.g6").string(), encode_graph6(ring) + "\n");
    write_text((dir / "g50.g6").string(), encode_graph6(aligned->graph) + "\n");
    write_text((dir / "start.json").string(), pattern_json(classify(ring, double_ring_phases(12))).dump(2) + "\n");
    json rem = json::array(), add = json::array();
    for (const auto& e : aligned->removed) rem.push_back({e.u, e.v});
    for (const auto& e : aligned->added) add.push_back({e.u, e.v});
    json info = {{"record", loc->index + 1},
                 {"nominal_record", a.index},
                 {"fallback_scan", loc->by_fallback},
                 {"dataset_graph6", encode_graph6(target)},
                 {"aligned_graph6", encode_graph6(aligned->graph)},
                 {"removed", rem},
                 {"added", add},
                 {"pattern", pattern_json(loc->report.patterns[loc->pattern].report)}};
    write_text((dir / "g50.json").string(), info.dump(2) + "\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-locked patterns of the Kuramoto flow on cubic graphs"};
    app.require_subcommand(1);
    Globals gl;
    app.add_option("--seed", gl.seed, "master seed")->capture_default_str();
    app.add_option("--threads", gl.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--out", gl.out, "output file or directory");
    app.add_option("--format", gl.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "Monte Carlo pattern search over a graph6 file");
    search->add_option("--input", sa.input, "graph6 file")->required();
    search->add_option("--ksamp", sa.ksamp, "trials per graph (default 5000 for n <= 12, else 10000)");
    search->add_option("--limit", sa.limit, "only the first M records");

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "write a family graph and its analytic pattern");
    construct->add_option("--family", ca.family)
        ->required()
        ->check(CLI::IsMember({"double-ring", "moebius", "twisted", "high-e", "high-f", "chain"}));
    construct->add_option("--n", ca.n, "vertex count")->required();
    construct->add_option("--pattern", ca.pattern, "pattern JSON output");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "recheck a pattern JSON against a graph");
    verify->add_option("--graph", va.graph)->required();
    verify->add_option("--pattern", va.pattern)->required();
    verify->add_option("--energy-tol", va.energy_tol)->capture_default_str();

    ReportsArgs ra;
    auto* stats = app.add_subcommand("stats", "pattern-count table from a search output directory");
    stats->add_option("--reports", ra.reports)->required();
    ReportsArgs fa;
    auto* figure = app.add_subcommand("figure", "energy/basin scatter with cluster ids and fit column");
    figure->add_option("--reports", fa.reports)->required();
    figure->add_option("--gap", fa.gap, "energy gap separating clusters")->capture_default_str();

    ContinueArgs co;
    auto* cont = app.add_subcommand("continue", "trace a pattern along the edge-weight homotopy A -> B");
    cont->add_option("--graph-a", co.graph_a)->required();
    cont->add_option("--graph-b", co.graph_b)->required();
    cont->add_option("--start", co.start, "pattern JSON at p = 1")->required();
    cont->add_option("--p-to", co.p_to)->capture_default_str();
    cont->add_option("--path-json", co.path_json, "also write every theta on the branch");

    auto* analytic = app.add_subcommand("verify-analytic", "closed-form roots and energies with residuals");

    LocateArgs la;
    auto* locate = app.add_subcommand("locate-g50", "find the long-link 12-vertex graph and align it for continue");
    locate->add_option("--input", la.input, "n = 12 graph6 file")->required();
    locate->add_option("--ksamp", la.ksamp)->capture_default_str();
    locate->add_option("--index", la.index, "record to try first (1-based)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (search->parsed()) return cmd_search(gl, sa);
        if (construct->parsed()) return cmd_construct(gl, ca);
        if (verify->parsed()) return cmd_verify(gl, va);
        if (stats->parsed()) return cmd_stats(gl, ra);
        if (figure->parsed()) return cmd_figure(gl, fa);
        if (cont->parsed()) return cmd_continue(gl, co);
        if (analytic->parsed()) return cmd_verify_analytic(gl);
        if (locate->parsed()) return cmd_locate_g50(gl, la);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Graph6Error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kFormat;
    } catch (const InvalidGraph& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kFormat;
    } catch (const DimensionMismatch& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kFormat;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
