#pragma once

// File formats: topology JSON, result JSON documents, CSV tables and SVG.
//
// Topology JSON:
//   { "area": {"w": 1000, "h": 1000},
//     "nodes": [{"id": 0, "x": 12.5, "y": 300.000001}, ...],
//     "links": [[0, 1], ...],
//     "meta": {...} }
// Coordinates are meters; values with more than six decimals are snapped to
// the micrometer grid on load.

#include "meshtopo/pipeline.hpp"
#include "meshtopo/voronoi.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace meshtopo {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        // Avoid "-0.000" for tiny negatives.
        if (s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    }
    return s;
}

inline std::string read_text_file(const std::string& path, const std::string& stage)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(stage + ": cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content, const std::string& stage)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(stage + ": cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error(stage + ": write to '" + path + "' failed");
}

inline Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(what + ": malformed JSON: " + e.what());
    }
}

// ---- topology ---------------------------------------------------------

inline Json topology_to_json(const Topology& topo, const Json& meta = Json::object())
{
    Json j;
    j["area"] = {{"w", topo.area().width}, {"h", topo.area().height}};
    Json nodes = Json::array();
    for (const Node& n : topo.nodes()) nodes.push_back({{"id", n.id}, {"x", to_meters(n.pos.x)}, {"y", to_meters(n.pos.y)}});
    j["nodes"] = std::move(nodes);
    Json links = Json::array();
    for (const Edge& e : topo.links()) links.push_back({e.a, e.b});
    j["links"] = std::move(links);
    j["meta"] = meta.is_null() ? Json::object() : meta;
    return j;
}

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw Error("schema: missing field '" + where + key + "'");
    return j.at(key);
}

inline double require_number(const Json& j, const std::string& key, const std::string& where)
{
    const Json& v = require(j, key, where);
    if (!v.is_number()) throw Error("schema: field '" + where + key + "' must be a number");
    return v.get<double>();
}

inline NodeId require_id(const Json& v, const std::string& field)
{
    if (!v.is_number_integer()) throw Error("schema: field '" + field + "' must be an integer node id");
    return v.get<NodeId>();
}

}  // namespace detail

inline Topology topology_from_json(const Json& j)
{
    if (!j.is_object()) throw Error("schema: topology document must be a JSON object");
    const Json& area = detail::require(j, "area", "");
    Area a{detail::require_number(area, "w", "area."), detail::require_number(area, "h", "area.")};
    if (!(a.width > 0) || !(a.height > 0)) throw Error("schema: field 'area' must have positive w and h");

    const Json& nodes = detail::require(j, "nodes", "");
    if (!nodes.is_array()) throw Error("schema: field 'nodes' must be an array");
    Topology topo({}, a);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string where = "nodes[" + std::to_string(i) + "].";
        const Json& n = nodes[i];
        if (!n.is_object()) throw Error("schema: field 'nodes[" + std::to_string(i) + "]' must be an object");
        const NodeId id = detail::require_id(detail::require(n, "id", where), where + "id");
        const double x = detail::require_number(n, "x", where);
        const double y = detail::require_number(n, "y", where);
        try {
            topo.add_node(Node{id, point_from_meters(x, y)});
        } catch (const Error& e) {
            throw Error("schema: " + where.substr(0, where.size() - 1) + ": " + e.what());
        }
    }

    const Json& links = detail::require(j, "links", "");
    if (!links.is_array()) throw Error("schema: field 'links' must be an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string where = "links[" + std::to_string(i) + "]";
        const Json& l = links[i];
        if (!l.is_array() || l.size() != 2) throw Error("schema: field '" + where + "' must be a pair of node ids");
        const NodeId u = detail::require_id(l[0], where + "[0]");
        const NodeId v = detail::require_id(l[1], where + "[1]");
        if (!topo.has_node(u) || !topo.has_node(v)) {
            throw Error("schema: field '" + where + "' references unknown node id " + std::to_string(topo.has_node(u) ? v : u));
        }
        try {
            topo.add_link(u, v);
        } catch (const Error& e) {
            throw Error("schema: field '" + where + "': " + e.what());
        }
    }
    return topo;
}

inline void save_topology(const std::string& path, const Topology& topo, const Json& meta = Json::object())
{
    write_text_file(path, topology_to_json(topo, meta).dump(2) + "\n", "save topology");
}

inline Topology load_topology(const std::string& path)
{
    try {
        return topology_from_json(parse_json(read_text_file(path, "load topology"), path));
    } catch (const Error& e) {
        const std::string msg = e.what();
        if (msg.find(path) != std::string::npos) throw;
        throw Error(path + ": " + msg);
    }
}

inline Json deployment_meta(const Deployment& d)
{
    return Json{{"kind", "deployment"}, {"seed", d.seed}, {"initial_range_m", d.initial_range_m}, {"rng", kRngContract}};
}

// ---- result documents -------------------------------------------------

inline Json point_json(const PointF& p) { return Json::array({p.x, p.y}); }

inline Json crossings_to_json(const Topology& topo)
{
    std::vector<Edge> edges(topo.links().begin(), topo.links().end());
    std::vector<Segment> segs;
    for (const Edge& e : edges) segs.push_back(topo.segment(e));
    const CrossingSet set = find_crossings(segs);
    Json list = Json::array();
    for (const Crossing& c : set.crossings) {
        list.push_back({{"a", {edges[c.first].a, edges[c.first].b}}, {"b", {edges[c.second].a, edges[c.second].b}}, {"at", point_json(c.point)}});
    }
    Json overlaps = Json::array();
    for (const SegmentPair& p : set.overlaps) {
        overlaps.push_back({{"a", {edges[p.first].a, edges[p.first].b}}, {"b", {edges[p.second].a, edges[p.second].b}}});
    }
    return Json{{"crossings", set.size()}, {"pairs", std::move(list)}, {"overlaps", std::move(overlaps)}};
}

inline Json voronoi_to_json(const VoronoiDiagram& v, const Rect& box)
{
    Json cells = Json::array();
    for (const VoronoiCell& c : v.cells) {
        Json poly = Json::array();
        for (const PointF& p : c.polygon) poly.push_back(point_json(p));
        cells.push_back({{"site", c.site}, {"at", point_json(c.site_pos)}, {"polygon", std::move(poly)}});
    }
    Json adj = Json::array();
    for (const Edge& e : v.adjacency) adj.push_back({e.a, e.b});
    return Json{{"bbox", {box.xmin, box.ymin, box.xmax, box.ymax}}, {"cells", std::move(cells)}, {"adjacency", std::move(adj)}};
}

inline VoronoiDiagram voronoi_from_json(const Json& j)
{
    VoronoiDiagram v;
    for (const Json& c : detail::require(j, "cells", "")) {
        VoronoiCell cell;
        cell.site = c.at("site").get<NodeId>();
        cell.site_pos = PointF{c.at("at")[0].get<double>(), c.at("at")[1].get<double>()};
        for (const Json& p : c.at("polygon")) cell.polygon.push_back(PointF{p[0].get<double>(), p[1].get<double>()});
        v.cells.push_back(std::move(cell));
    }
    for (const Json& e : detail::require(j, "adjacency", "")) v.adjacency.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    return v;
}

inline Json prune_log_to_json(const std::vector<LinkPruneKey>& log, const PruneConfig& cfg)
{
    Json entries = Json::array();
    for (std::size_t i = 0; i < log.size(); ++i) {
        const LinkPruneKey& k = log[i];
        entries.push_back({{"step", i + 1},
                           {"link", {k.link.a, k.link.b}},
                           {"level_a", to_string(k.level_a)},
                           {"level_b", to_string(k.level_b)},
                           {"priority", k.priority},
                           {"covered", k.covered}});
    }
    return Json{{"max_priority_pruned", cfg.max_priority_pruned},
                {"preserve_connectivity", cfg.preserve_connectivity},
                {"removed", std::move(entries)}};
}

inline Json report_to_json(const InterferenceReport& r)
{
    Json j{{"total_degree", r.total_degree},
           {"avg_degree", r.average_degree},
           {"avg_range_m", r.average_range_m},
           {"avg_interference_rate", r.average_interference_rate}};
    if (!r.nodes.empty()) {
        Json nodes = Json::array();
        for (const NodeInterference& n : r.nodes) {
            nodes.push_back({{"id", n.node},
                             {"range_m", n.range_m},
                             {"direct", n.sets.direct},
                             {"indirect", n.sets.indirect},
                             {"none", n.sets.none}});
        }
        j["nodes"] = std::move(nodes);
    }
    return j;
}

inline Json flows_to_json(const std::vector<Flow>& flows)
{
    Json j = Json::array();
    for (const Flow& f : flows) j.push_back({f.source, f.destination});
    return j;
}

inline std::vector<Flow> flows_from_json(const Json& j)
{
    if (!j.is_array()) throw Error("schema: flows must be an array of [source, destination] pairs");
    std::vector<Flow> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "flows[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2) throw Error("schema: field '" + where + "' must be a pair of node ids");
        out.push_back(Flow{detail::require_id(j[i][0], where + "[0]"), detail::require_id(j[i][1], where + "[1]")});
    }
    return out;
}

// ---- CSV --------------------------------------------------------------

inline const char* kMetricsHeader = "kind,n,seed,total_degree,avg_degree,avg_range_m,avg_interference_rate,crossings\n";
inline const char* kSimHeader = "scenario,seed,topology_kind,n_nodes,n_flows,throughput_bps,loss_rate,mean_delay_s\n";
inline const char* kSummaryHeader = "n,metric,dt_mean,dt_sd_mean,reduction_pct\n";

inline std::string metrics_csv_row(const MetricsRow& r)
{
    return std::string(to_string(r.kind)) + "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.total_degree) + "," + format_double(r.avg_degree) + "," + format_double(r.avg_range_m) + "," +
           format_double(r.avg_interference_rate) + "," + std::to_string(r.crossings) + "\n";
}

inline std::string sim_csv_row(const SimRow& r)
{
    return r.scenario + "," + std::to_string(r.seed) + "," + to_string(r.kind) + "," + std::to_string(r.n_nodes) + "," +
           std::to_string(r.n_flows) + "," + format_double(r.throughput_bps, 3) + "," + format_double(r.loss_rate) + "," +
           format_double(r.mean_delay_s) + "\n";
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows)
{
    std::string out = kMetricsHeader;
    for (const MetricsRow& r : rows) out += metrics_csv_row(r);
    return out;
}

inline std::string sim_csv(const std::vector<SimRow>& rows)
{
    std::string out = kSimHeader;
    for (const SimRow& r : rows) out += sim_csv_row(r);
    return out;
}

inline std::string summary_csv(const std::vector<ReductionRow>& rows)
{
    std::string out = kSummaryHeader;
    for (const ReductionRow& r : rows) {
        out += r.n + "," + r.metric + "," + format_double(r.dt_mean) + "," + format_double(r.dt_sd_mean) + "," +
               format_double(r.reduction_pct, 3) + "\n";
    }
    return out;
}

// ---- experiment config ------------------------------------------------

/// Every field is optional; missing ones keep their defaults. Unknown keys
/// are rejected so that typos do not silently fall back to defaults.
inline ExperimentConfig experiment_config_from_json(const Json& j)
{
    if (!j.is_object()) throw Error("config: document must be a JSON object");
    static const std::set<std::string> known{"node_counts", "topologies_per_count", "seed", "initial_range_m",
                                             "sim_seeds_per_topology", "run_simulations", "area", "scenarios",
                                             "prune", "sim"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw Error("config: unknown field '" + key + "'");
    }
    ExperimentConfig c;
    auto get = [&](const char* key, auto& into) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(into);
        } catch (const nlohmann::json::exception&) {
            throw Error(std::string("config: field '") + key + "' has the wrong type");
        }
    };
    get("node_counts", c.node_counts);
    get("topologies_per_count", c.topologies_per_count);
    get("seed", c.base_seed);
    get("initial_range_m", c.initial_range_m);
    get("sim_seeds_per_topology", c.sim_seeds_per_topology);
    get("run_simulations", c.run_simulations);
    if (j.contains("area")) {
        c.area = Area{detail::require_number(j["area"], "w", "area."), detail::require_number(j["area"], "h", "area.")};
    }
    try {
        if (j.contains("scenarios")) {
            c.scenarios.clear();
            for (const Json& s : j["scenarios"]) {
                c.scenarios.push_back(Scenario{s.at("nodes").get<std::size_t>(), s.at("flows").get<std::size_t>()});
            }
        }
        if (j.contains("prune")) {
            const Json& p = j["prune"];
            if (p.contains("max_priority")) c.prune.max_priority_pruned = p["max_priority"].get<int>();
            if (p.contains("preserve_connectivity")) c.prune.preserve_connectivity = p["preserve_connectivity"].get<bool>();
        }
        if (j.contains("sim")) {
            const Json& s = j["sim"];
            if (s.contains("slot_s")) c.sim.slot_s = s["slot_s"].get<double>();
            if (s.contains("duration_s")) c.sim.duration_s = s["duration_s"].get<double>();
            if (s.contains("queue_capacity")) c.sim.queue_capacity = s["queue_capacity"].get<std::size_t>();
            if (s.contains("transmit_prob")) c.sim.transmit_prob = s["transmit_prob"].get<double>();
            if (s.contains("packet_bits")) c.sim.packet_bits = s["packet_bits"].get<std::size_t>();
            c.sim.validate();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    if (c.prune.max_priority_pruned < 1 || c.prune.max_priority_pruned > 5) throw Error("config: prune.max_priority must be in 1..5");
    if (c.topologies_per_count == 0) throw Error("config: topologies_per_count must be positive");
    return c;
}

// ---- SVG --------------------------------------------------------------

struct SvgOptions {
    const VoronoiDiagram* voronoi = nullptr;
    bool labels = false;
};

/// Deterministic drawing; the viewBox is the deployment area plus a 2% margin,
/// with y pointing up.
inline std::string render_svg(const Topology& topo, const SvgOptions& opt = {})
{
    const double w = topo.area().width;
    const double h = topo.area().height;
    const double pad = 0.02 * std::max(w, h);
    const double r = 0.004 * std::max(w, h);
    auto X = [](double x) { return format_double(x, 3); };
    auto Y = [h](double y) { return format_double(h - y, 3); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + X(-pad) + " " + X(-pad) + " " + X(w + 2 * pad) + " " +
         X(h + 2 * pad) + "\">\n";
    s += "<rect x=\"0.000\" y=\"0.000\" width=\"" + X(w) + "\" height=\"" + X(h) +
         "\" fill=\"white\" stroke=\"black\" stroke-width=\"" + X(r / 2) + "\"/>\n";
    if (opt.voronoi != nullptr) {
        s += "<g fill=\"none\" stroke=\"#8fb8de\" stroke-width=\"" + X(r / 3) + "\">\n";
        for (const VoronoiCell& c : opt.voronoi->cells) {
            s += "<polygon points=\"";
            for (std::size_t i = 0; i < c.polygon.size(); ++i) {
                if (i > 0) s += " ";
                s += X(c.polygon[i].x) + "," + Y(c.polygon[i].y);
            }
            s += "\"/>\n";
        }
        s += "</g>\n";
    }
    s += "<g stroke=\"#333333\" stroke-width=\"" + X(r / 2) + "\">\n";
    for (const Edge& e : topo.links()) {
        const PointF a = to_meters(topo.position(e.a));
        const PointF b = to_meters(topo.position(e.b));
        s += "<line x1=\"" + X(a.x) + "\" y1=\"" + Y(a.y) + "\" x2=\"" + X(b.x) + "\" y2=\"" + Y(b.y) + "\"/>\n";
    }
    s += "</g>\n<g fill=\"#c0392b\">\n";
    for (const Node& n : topo.nodes()) {
        const PointF p = to_meters(n.pos);
        s += "<circle cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"" + X(r) + "\"/>\n";
    }
    s += "</g>\n";
    if (opt.labels) {
        s += "<g font-size=\"" + X(3 * r) + "\" fill=\"black\">\n";
        for (const Node& n : topo.nodes()) {
            const PointF p = to_meters(n.pos);
            s += "<text x=\"" + X(p.x + r) + "\" y=\"" + Y(p.y + r) + "\">" + std::to_string(n.id) + "</text>\n";
        }
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace meshtopo
