#pragma once

// Experiment pipeline: deploy -> original unit-disk mesh -> Delaunay
// triangulation -> pruning, with metrics for each topology kind and traffic
// simulations on the configured scenarios.

#include "meshtopo/deployment.hpp"
#include "meshtopo/interference.hpp"
#include "meshtopo/pruning.hpp"
#include "meshtopo/sweep.hpp"
#include "meshtopo/traffic_sim.hpp"
#include "meshtopo/triangulation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace meshtopo {

enum class TopologyKind { Original, Dt, DtSd };

inline const char* to_string(TopologyKind k)
{
    switch (k) {
    case TopologyKind::Original: return "original";
    case TopologyKind::Dt: return "dt";
    case TopologyKind::DtSd: return "dt_sd";
    }
    return "?";
}

inline TopologyKind parse_topology_kind(const std::string& s)
{
    if (s == "original") return TopologyKind::Original;
    if (s == "dt") return TopologyKind::Dt;
    if (s == "dt_sd") return TopologyKind::DtSd;
    throw Error("unknown topology kind '" + s + "' (expected original, dt or dt_sd)");
}

struct Scenario {
    std::size_t nodes = 0;
    std::size_t flows = 0;
};

struct ExperimentConfig {
    std::vector<std::size_t> node_counts{50, 75, 100, 125, 150, 175, 200};
    std::size_t topologies_per_count = 10;
    std::uint64_t base_seed = 1;
    Area area;
    double initial_range_m = 300.0;
    std::vector<Scenario> scenarios{{50, 30}, {100, 50}, {150, 100}, {200, 150}};
    std::size_t sim_seeds_per_topology = 1;
    PruneConfig prune;
    SimParams sim{.duration_s = 30.0};
    bool run_simulations = true;
};

struct MetricsRow {
    TopologyKind kind = TopologyKind::Original;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t total_degree = 0;
    double avg_degree = 0.0;
    double avg_range_m = 0.0;
    double avg_interference_rate = 0.0;
    std::size_t crossings = 0;
};

struct SimRow {
    std::string scenario;
    std::uint64_t seed = 0;
    TopologyKind kind = TopologyKind::Original;
    std::size_t n_nodes = 0;
    std::size_t n_flows = 0;
    double throughput_bps = 0.0;
    double loss_rate = 0.0;
    double mean_delay_s = 0.0;
};

/// Mean DT-only vs DT+SD values and the mean per-instance reduction (percent).
struct ReductionRow {
    std::string n;  // node count, or "all"
    std::string metric;
    double dt_mean = 0.0;
    double dt_sd_mean = 0.0;
    double reduction_pct = 0.0;
};

/// The three topologies built from one deployment.
struct TopologySet {
    Deployment deployment;
    Topology original;
    Topology dt;
    Topology dt_sd;
    std::vector<LinkPruneKey> prune_log;

    const Topology& get(TopologyKind k) const
    {
        switch (k) {
        case TopologyKind::Original: return original;
        case TopologyKind::Dt: return dt;
        case TopologyKind::DtSd: return dt_sd;
        }
        return original;
    }
};

inline TopologySet build_topologies(const Deployment& d, const PruneConfig& prune_cfg, std::uint64_t dt_seed)
{
    TopologySet s{d, original_topology(d), Topology{}, Topology{}, {}};
    s.dt = build_delaunay(d.nodes, dt_seed).link_graph(d.area);
    PruneResult pr = prune(s.dt, prune_cfg);
    s.dt_sd = std::move(pr.topology);
    s.prune_log = std::move(pr.log);
    return s;
}

inline MetricsRow measure(const Topology& topo, TopologyKind kind, std::uint64_t seed)
{
    const InterferenceReport r = interference_report(topo);
    return MetricsRow{kind,
                      topo.node_count(),
                      seed,
                      r.total_degree,
                      r.average_degree,
                      r.average_range_m,
                      r.average_interference_rate,
                      count_crossings(topo)};
}

inline std::uint64_t topology_seed(std::uint64_t base, std::size_t n, std::size_t index)
{
    return mix_seed(base, static_cast<std::uint64_t>(n) * 100000u + index);
}

struct ExperimentResult {
    std::vector<MetricsRow> metrics;
    std::vector<SimRow> sims;
    std::vector<ReductionRow> summary;
};

namespace detail {

inline double reduction_pct(double before, double after) { return before > 0 ? 100.0 * (before - after) / before : 0.0; }

inline std::vector<ReductionRow> summarize(const std::vector<MetricsRow>& metrics)
{
    struct Acc {
        double dt = 0, sd = 0, red = 0;
        std::size_t count = 0;
    };
    using Getter = double (*)(const MetricsRow&);
    const std::vector<std::pair<std::string, Getter>> fields{
        {"avg_degree", [](const MetricsRow& r) { return r.avg_degree; }},
        {"avg_range_m", [](const MetricsRow& r) { return r.avg_range_m; }},
        {"avg_interference_rate", [](const MetricsRow& r) { return r.avg_interference_rate; }},
    };
    std::map<std::pair<std::size_t, std::uint64_t>, std::pair<const MetricsRow*, const MetricsRow*>> pairs;
    for (const MetricsRow& r : metrics) {
        if (r.kind == TopologyKind::Dt) pairs[{r.n, r.seed}].first = &r;
        if (r.kind == TopologyKind::DtSd) pairs[{r.n, r.seed}].second = &r;
    }
    std::vector<ReductionRow> out;
    for (const auto& [name, get] : fields) {
        std::map<std::size_t, Acc> per_n;
        Acc all;
        for (const auto& [key, pr] : pairs) {
            if (pr.first == nullptr || pr.second == nullptr) continue;
            const double dt = get(*pr.first), sd = get(*pr.second);
            for (Acc* a : {&per_n[key.first], &all}) {
                a->dt += dt;
                a->sd += sd;
                a->red += reduction_pct(dt, sd);
                ++a->count;
            }
        }
        auto row = [&](std::string n, const Acc& a) {
            const double c = static_cast<double>(std::max<std::size_t>(a.count, 1));
            out.push_back(ReductionRow{std::move(n), name, a.dt / c, a.sd / c, a.red / c});
        };
        for (const auto& [n, a] : per_n) row(std::to_string(n), a);
        row("all", all);
    }
    return out;
}

}  // namespace detail

/// Progress callback: (stage, node count, topology index).
using PipelineProgress = std::function<void(const std::string&, std::size_t, std::size_t)>;

/// Runs every (node count, topology) cell in a fixed order; rows come out in
/// canonical order regardless of how the cells are scheduled.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const PipelineProgress& progress = {})
{
    std::vector<std::size_t> counts = cfg.node_counts;
    if (cfg.run_simulations) {
        for (const Scenario& s : cfg.scenarios) counts.push_back(s.nodes);
    }
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

    ExperimentResult res;
    for (std::size_t n : counts) {
        const bool want_metrics = std::find(cfg.node_counts.begin(), cfg.node_counts.end(), n) != cfg.node_counts.end();
        const Scenario* scenario = nullptr;
        if (cfg.run_simulations) {
            for (const Scenario& s : cfg.scenarios) {
                if (s.nodes == n) scenario = &s;
            }
        }
        for (std::size_t i = 0; i < cfg.topologies_per_count; ++i) {
            const std::uint64_t seed = topology_seed(cfg.base_seed, n, i);
            if (progress) progress("build", n, i);
            const Deployment d = generate_deployment(n, cfg.area, seed, cfg.initial_range_m);
            const TopologySet set = build_topologies(d, cfg.prune, seed);
            if (want_metrics) {
                if (progress) progress("metrics", n, i);
                for (TopologyKind k : {TopologyKind::Original, TopologyKind::Dt, TopologyKind::DtSd}) {
                    res.metrics.push_back(measure(set.get(k), k, seed));
                }
            }
            if (scenario == nullptr) continue;
            if (progress) progress("simulate", n, i);
            const std::vector<Flow> flows = generate_flows(set.original, scenario->flows, mix_seed(seed, 1));
            for (std::size_t s = 0; s < cfg.sim_seeds_per_topology; ++s) {
                SimParams p = cfg.sim;
                p.seed = mix_seed(seed, 2 + s);
                for (TopologyKind k : {TopologyKind::Original, TopologyKind::Dt, TopologyKind::DtSd}) {
                    const SimReport r = run_sim(set.get(k), flows, p);
                    res.sims.push_back(SimRow{std::to_string(scenario->nodes) + "n_" + std::to_string(scenario->flows) + "f",
                                              p.seed, k, n, flows.size(), r.throughput_bps, r.loss_rate, r.mean_delay_s});
                }
            }
        }
    }
    res.summary = detail::summarize(res.metrics);
    return res;
}

}  // namespace meshtopo
