#pragma once

// JSON and CSV forms of patterns, graph reports, aggregate tables and
// continuation branches.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "phaselock/continuation.hpp"
#include "phaselock/search.hpp"

namespace phaselock {

using json = nlohmann::json;

/// Shortest text that round-trips through strtod at 17 significant digits.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::vector<double> to_vector(const Phases& th) { return {th.data(), th.data() + th.size()}; }

inline Phases to_phases(const std::vector<double>& v) {
    Phases th(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) th[static_cast<Eigen::Index>(i)] = v[i];
    return th;
}

inline Classification classification_from(const std::string& s) {
    if (s == "sync") return Classification::sync;
    if (s == "stable-pattern") return Classification::stable_pattern;
    if (s == "degenerate") return Classification::degenerate;
    if (s == "unstable") return Classification::unstable;
    throw Error("unknown classification '" + s + "'");
}

inline LinkClass link_class_from(const std::string& s) {
    if (s == "short") return LinkClass::short_link;
    if (s == "critical") return LinkClass::critical;
    if (s == "long") return LinkClass::long_link;
    throw Error("unknown link class '" + s + "'");
}

inline json pattern_json(const FixedPointReport& r) {
    json links = json::array();
    for (const auto& l : r.links) links.push_back({{"u", l.u}, {"v", l.v}, {"delta", l.delta}, {"class", to_string(l.cls)}});
    json winds = json::array();
    for (const auto& w : r.windings) winds.push_back({{"cycle", w.cycle}, {"w", w.w}});
    return {{"n", r.theta.size()},
            {"theta", to_vector(r.theta)},
            {"residual", r.residual},
            {"energy", r.energy},
            {"spectral_gap", r.spectral_gap},
            {"classification", to_string(r.classification)},
            {"links", links},
            {"windings", winds}};
}

/// Inverse of pattern_json (eigenvalues are not stored).
inline FixedPointReport pattern_from_json(const json& j) {
    FixedPointReport r;
    r.theta = to_phases(j.at("theta").get<std::vector<double>>());
    if (j.contains("n") && j.at("n").get<int>() != r.theta.size())
        throw DimensionMismatch("pattern: n does not match the theta length");
    r.residual = j.value("residual", 0.0);
    r.energy = j.value("energy", 0.0);
    r.spectral_gap = j.value("spectral_gap", 0.0);
    r.classification = classification_from(j.value("classification", std::string("unstable")));
    if (j.contains("links"))
        for (const auto& l : j.at("links"))
            r.links.push_back({l.at("u").get<int>(), l.at("v").get<int>(), l.at("delta").get<double>(),
                               link_class_from(l.at("class").get<std::string>())});
    if (j.contains("windings"))
        for (const auto& w : j.at("windings")) r.windings.push_back({w.at("cycle").get<Cycle>(), w.at("w").get<int>()});
    return r;
}

inline json report_json(const GraphReport& rep, const std::string& graph6 = {}) {
    json pats = json::array();
    for (const auto& p : rep.patterns) {
        json pj = pattern_json(p.report);
        pj["hits"] = p.hits;
        pj["basin_fraction"] = p.fraction;
        pj["basin_stderr"] = p.std_error;
        pj["first_trial"] = p.first_trial;
        pats.push_back(std::move(pj));
    }
    json j = {{"graph_id", rep.graph_id},
              {"n", rep.n},
              {"k_samp", rep.k_samp},
              {"master_seed", rep.master_seed},
              {"sync_hits", rep.sync_hits},
              {"sync_fraction", rep.sync_fraction()},
              {"degenerate", rep.degenerate},
              {"unstable", rep.unstable},
              {"timeouts", rep.timeouts},
              {"patterns", pats}};
    if (!graph6.empty()) j["graph6"] = graph6;
    return j;
}

inline GraphReport report_from_json(const json& j) {
    GraphReport rep;
    rep.graph_id = j.at("graph_id").get<std::string>();
    rep.n = j.at("n").get<int>();
    rep.k_samp = j.at("k_samp").get<int>();
    rep.master_seed = j.value("master_seed", std::uint64_t{0});
    rep.sync_hits = j.value("sync_hits", 0);
    rep.degenerate = j.value("degenerate", 0);
    rep.unstable = j.value("unstable", 0);
    rep.timeouts = j.value("timeouts", 0);
    for (const auto& pj : j.at("patterns")) {
        PatternStats ps;
        ps.report = pattern_from_json(pj);
        ps.hits = pj.value("hits", 0);
        ps.fraction = pj.value("basin_fraction", 0.0);
        ps.std_error = pj.value("basin_stderr", 0.0);
        ps.first_trial = pj.value("first_trial", 0);
        rep.patterns.push_back(std::move(ps));
    }
    return rep;
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<ScatterPoint>& pts) {
    os << "graph_id,pattern_idx,energy,basin_fraction,basin_stderr,spectral_gap,n_long_links,max_winding,cluster_id\n";
    for (const auto& p : pts)
        os << p.graph_id << ',' << p.pattern_idx << ',' << fmt17(p.energy) << ',' << fmt17(p.basin_fraction) << ','
           << fmt17(p.basin_stderr) << ',' << fmt17(p.spectral_gap) << ',' << p.long_links << ',' << p.max_winding
           << ',' << p.cluster_id << '\n';
}

inline void write_figure_csv(std::ostream& os, const std::vector<ScatterPoint>& pts) {
    os << "graph_id,pattern_idx,energy,basin_fraction,basin_stderr,spectral_gap,long_link,cluster_id,fit\n";
    for (const auto& p : pts)
        os << p.graph_id << ',' << p.pattern_idx << ',' << fmt17(p.energy) << ',' << fmt17(p.basin_fraction) << ','
           << fmt17(p.basin_stderr) << ',' << fmt17(p.spectral_gap) << ',' << (p.long_links > 0 ? 1 : 0) << ','
           << p.cluster_id << ',' << fmt17(p.fit) << '\n';
}

inline void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    std::size_t kmax = 0;
    for (const auto& r : rows) kmax = std::max(kmax, r.counts.size());
    os << "n,total";
    for (std::size_t k = 0; k < kmax; ++k) os << ",k" << k;
    for (std::size_t k = 0; k < kmax; ++k) os << ",f" << k;
    os << ",f_supporting\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.total;
        for (std::size_t k = 0; k < kmax; ++k) os << ',' << r.count(k);
        for (std::size_t k = 0; k < kmax; ++k) os << ',' << fmt17(r.fraction(k));
        os << ',' << fmt17(r.supporting_fraction()) << '\n';
    }
}

inline void write_branch_csv(std::ostream& os, const BranchTrace& tr) {
    os << "p,energy,min_eig,stable,fold,landmark\n";
    for (const auto& b : tr.points)
        os << fmt17(b.p) << ',' << fmt17(b.energy) << ',' << fmt17(b.min_eig) << ',' << (b.stable ? 1 : 0) << ','
           << (b.is_fold ? 1 : 0) << ',' << (b.is_landmark ? 1 : 0) << '\n';
}

inline json branch_json(const BranchTrace& tr) {
    json pts = json::array();
    for (const auto& b : tr.points)
        pts.push_back({{"p", b.p},
                       {"theta", to_vector(b.theta)},
                       {"energy", b.energy},
                       {"min_eig", b.min_eig},
                       {"residual", b.residual},
                       {"stable", b.stable},
                       {"fold", b.is_fold},
                       {"landmark", b.is_landmark}});
    return {{"status", to_string(tr.status)}, {"folds", tr.fold_ps}, {"points", pts}};
}

}  // namespace phaselock
