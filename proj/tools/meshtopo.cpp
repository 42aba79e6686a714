// meshtopo: command-line front end for the topology-control toolkit.
//
//   meshtopo generate --n 100 --seed 7 -o deploy.json
//   meshtopo build -i deploy.json -o dt.json --voronoi-out vor.json
//   meshtopo prune -i dt.json -o dt_sd.json --log prune.json
//   meshtopo analyze -i dt_sd.json --kind dt_sd
//   meshtopo simulate -i dt_sd.json --flows-from deploy.json --flows 30
//   meshtopo render -i dt.json -o dt.svg --voronoi vor.json
//   meshtopo pipeline --config samples/pipeline.json --out results/

#include "meshtopo/meshtopo.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace meshtopo;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t seed_from(const std::optional<std::uint64_t>& flag)
{
    return flag ? resolve_seed(&*flag, kDefaultSeed) : resolve_seed(nullptr, kDefaultSeed);
}

void emit(const std::string& path, const std::string& content, const std::string& stage)
{
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    write_text_file(path, content, stage);
}

struct GenerateArgs {
    std::size_t n = 0;
    double width = 1000.0, height = 1000.0, range = 300.0;
    std::optional<std::uint64_t> seed;
    bool no_links = false;
    std::string out;
};

void run_generate(const GenerateArgs& a)
{
    const Deployment d = generate_deployment(a.n, Area{a.width, a.height}, seed_from(a.seed), a.range);
    const Topology t = a.no_links ? Topology(d.nodes, d.area) : original_topology(d);
    emit(a.out, topology_to_json(t, deployment_meta(d)).dump(2) + "\n", "generate");
}

struct BuildArgs {
    std::string in, out, voronoi_out;
    std::optional<std::uint64_t> seed;
    double margin = 0.1;
    bool resweep = false;
};

void run_build(const BuildArgs& a)
{
    const Topology input = load_topology(a.in);
    const std::uint64_t seed = seed_from(a.seed);
    const Triangulation tri = build_delaunay(input, seed);
    if (auto err = tri.validate()) throw Error("build: triangulation self-check failed: " + *err);
    const Topology dt = tri.link_graph(input.area());
    if (a.resweep) {
        if (const std::size_t x = count_crossings(dt)) throw Error("build: re-sweep found " + std::to_string(x) + " crossings");
    }
    emit(a.out, topology_to_json(dt, Json{{"kind", "dt"}, {"seed", seed}}).dump(2) + "\n", "build");
    if (!a.voronoi_out.empty()) {
        const Rect box = expanded_area(input.area(), a.margin);
        write_text_file(a.voronoi_out, voronoi_to_json(voronoi_dual(tri, box), box).dump(2) + "\n", "build --voronoi-out");
    }
}

struct PruneArgs {
    std::string in, out, log;
    int max_priority = 4;
    bool no_preserve = false;
};

void run_prune(const PruneArgs& a)
{
    const Topology input = load_topology(a.in);
    const PruneConfig cfg{a.max_priority, !a.no_preserve};
    const PruneResult r = prune(input, cfg);
    emit(a.out, topology_to_json(r.topology, Json{{"kind", "dt_sd"}, {"removed_links", r.log.size()}}).dump(2) + "\n", "prune");
    if (!a.log.empty()) write_text_file(a.log, prune_log_to_json(r.log, cfg).dump(2) + "\n", "prune --log");
}

struct AnalyzeArgs {
    std::string in, out, report;
    std::string kind = "dt";
    std::uint64_t seed_label = 0;
};

void run_analyze(const AnalyzeArgs& a)
{
    const Topology t = load_topology(a.in);
    const MetricsRow row = measure(t, parse_topology_kind(a.kind), a.seed_label);
    emit(a.out, metrics_csv({row}), "analyze");
    if (!a.report.empty()) {
        write_text_file(a.report, report_to_json(interference_report(t, true)).dump(2) + "\n", "analyze --report");
    }
}

struct SweepArgs {
    std::string in, out;
};

void run_sweep(const SweepArgs& a)
{
    emit(a.out, crossings_to_json(load_topology(a.in)).dump(2) + "\n", "sweep");
}

struct SimulateArgs {
    std::string in, out, flows_from, flows_file, flows_out;
    std::size_t flows = 0;
    std::optional<std::uint64_t> seed;
    SimParams params;
    std::string kind = "dt";
    std::string scenario = "custom";
};

void run_simulate(SimulateArgs a)
{
    const Topology t = load_topology(a.in);
    const std::uint64_t seed = seed_from(a.seed);
    std::vector<Flow> flows;
    if (!a.flows_file.empty()) {
        flows = flows_from_json(parse_json(read_text_file(a.flows_file, "simulate --flows-file"), a.flows_file));
    } else {
        const Topology source = a.flows_from.empty() ? t : load_topology(a.flows_from);
        flows = generate_flows(source, a.flows, mix_seed(seed, 1));
    }
    if (!a.flows_out.empty()) write_text_file(a.flows_out, flows_to_json(flows).dump(2) + "\n", "simulate --flows-out");
    a.params.seed = mix_seed(seed, 2);
    const SimReport r = run_sim(t, flows, a.params);
    const SimRow row{a.scenario, a.params.seed, parse_topology_kind(a.kind), t.node_count(), flows.size(),
                     r.throughput_bps, r.loss_rate, r.mean_delay_s};
    emit(a.out, sim_csv({row}), "simulate");
}

struct RenderArgs {
    std::string in, out, voronoi;
    bool labels = false;
};

void run_render(const RenderArgs& a)
{
    const Topology t = load_topology(a.in);
    std::optional<VoronoiDiagram> v;
    if (!a.voronoi.empty()) v = voronoi_from_json(parse_json(read_text_file(a.voronoi, "render --voronoi"), a.voronoi));
    emit(a.out, render_svg(t, SvgOptions{v ? &*v : nullptr, a.labels}), "render");
}

struct PipelineArgs {
    std::string config, out = "results";
    std::optional<std::uint64_t> seed;
    bool svg = false;
    bool quiet = false;
};

void run_pipeline(const PipelineArgs& a)
{
    ExperimentConfig cfg;
    if (!a.config.empty()) cfg = experiment_config_from_json(parse_json(read_text_file(a.config, "pipeline --config"), a.config));
    if (a.seed || std::getenv("MESH_TOPO_SEED") != nullptr) cfg.base_seed = seed_from(a.seed);

    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw Error("pipeline: cannot create output directory '" + a.out + "': " + ec.message());

    PipelineProgress progress;
    if (!a.quiet) {
        progress = [](const std::string& stage, std::size_t n, std::size_t i) {
            std::cerr << "[pipeline] " << stage << " n=" << n << " topology=" << i << "\n";
        };
    }
    const ExperimentResult res = run_experiment(cfg, progress);
    const fs::path dir(a.out);
    write_text_file((dir / "metrics.csv").string(), metrics_csv(res.metrics), "pipeline metrics");
    write_text_file((dir / "summary.csv").string(), summary_csv(res.summary), "pipeline summary");
    if (cfg.run_simulations) write_text_file((dir / "sim.csv").string(), sim_csv(res.sims), "pipeline simulation");

    if (a.svg) {
        fs::create_directories(dir / "svg", ec);
        if (ec) throw Error("pipeline: cannot create '" + (dir / "svg").string() + "': " + ec.message());
        for (std::size_t n : cfg.node_counts) {
            for (std::size_t i = 0; i < cfg.topologies_per_count; ++i) {
                const std::uint64_t seed = topology_seed(cfg.base_seed, n, i);
                const TopologySet set = build_topologies(generate_deployment(n, cfg.area, seed, cfg.initial_range_m), cfg.prune, seed);
                for (TopologyKind k : {TopologyKind::Original, TopologyKind::Dt, TopologyKind::DtSd}) {
                    const std::string name = "n" + std::to_string(n) + "_t" + std::to_string(i) + "_" + to_string(k) + ".svg";
                    write_text_file((dir / "svg" / name).string(), render_svg(set.get(k)), "pipeline render");
                }
            }
        }
    }
    for (const ReductionRow& r : res.summary) {
        if (r.n == "all") std::cout << r.metric << " reduction (dt_sd vs dt): " << format_double(r.reduction_pct, 2) << "%\n";
    }
}

void add_seed(CLI::App* cmd, std::optional<std::uint64_t>& seed)
{
    cmd->add_option("--seed", seed, "PRNG seed (overrides MESH_TOPO_SEED)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wireless mesh topology control: sweep, Delaunay/Voronoi, SD pruning, simulation"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Random deployment with its fixed-range mesh");
    g->add_option("--n", gen.n, "Number of nodes")->required()->check(CLI::PositiveNumber);
    g->add_option("--width", gen.width, "Area width in meters");
    g->add_option("--height", gen.height, "Area height in meters");
    g->add_option("--range", gen.range, "Initial transmission range in meters");
    g->add_flag("--no-links", gen.no_links, "Emit nodes only");
    g->add_option("-o,--out", gen.out, "Output topology JSON (stdout if omitted)");
    add_seed(g, gen.seed);

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Report link crossings");
    s->add_option("-i,--in", sw.in, "Topology JSON")->required();
    s->add_option("-o,--out", sw.out, "Output JSON (stdout if omitted)");

    BuildArgs bd;
    auto* b = app.add_subcommand("build", "Delaunay topology of the input nodes");
    b->add_option("-i,--in", bd.in, "Topology JSON (links ignored)")->required();
    b->add_option("-o,--out", bd.out, "Output topology JSON (stdout if omitted)");
    b->add_option("--voronoi-out", bd.voronoi_out, "Also write the Voronoi diagram as JSON");
    b->add_option("--margin", bd.margin, "Voronoi bounding box margin as a fraction of the area");
    b->add_flag("--resweep", bd.resweep, "Sweep the result for crossings and fail if any");
    add_seed(b, bd.seed);

    PruneArgs pr;
    auto* p = app.add_subcommand("prune", "Standard-deviation link pruning");
    p->add_option("-i,--in", pr.in, "Topology JSON")->required();
    p->add_option("-o,--out", pr.out, "Output topology JSON (stdout if omitted)");
    p->add_option("--log", pr.log, "Write the ordered removal log as JSON");
    p->add_option("--max-priority", pr.max_priority, "Prune links with priority <= this")->check(CLI::Range(1, 5));
    p->add_flag("--no-preserve-connectivity", pr.no_preserve, "Allow removing bridges");

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "Degree, range, interference and crossing metrics as CSV");
    a->add_option("-i,--in", an.in, "Topology JSON")->required();
    a->add_option("-o,--out", an.out, "Output CSV (stdout if omitted)");
    a->add_option("--kind", an.kind, "Row label: original, dt or dt_sd");
    a->add_option("--seed-label", an.seed_label, "Value for the seed column");
    a->add_option("--report", an.report, "Write per-node interference sets as JSON");

    SimulateArgs sm;
    auto* m = app.add_subcommand("simulate", "Slotted traffic simulation, one CSV row");
    m->add_option("-i,--in", sm.in, "Topology JSON")->required();
    m->add_option("-o,--out", sm.out, "Output CSV (stdout if omitted)");
    m->add_option("--flows", sm.flows, "Number of random flows");
    m->add_option("--flows-from", sm.flows_from, "Draw flows among pairs connected in this topology");
    m->add_option("--flows-file", sm.flows_file, "Read flows as JSON [[src, dst], ...]");
    m->add_option("--flows-out", sm.flows_out, "Write the flows used as JSON");
    m->add_option("--duration", sm.params.duration_s, "Simulated seconds");
    m->add_option("--slot", sm.params.slot_s, "Slot length in seconds");
    m->add_option("--queue", sm.params.queue_capacity, "Queue capacity in packets");
    m->add_option("--p", sm.params.transmit_prob, "Transmit probability per eligible slot");
    m->add_option("--kind", sm.kind, "Row label: original, dt or dt_sd");
    m->add_option("--scenario", sm.scenario, "Row label for the scenario column");
    add_seed(m, sm.seed);

    RenderArgs rd;
    auto* r = app.add_subcommand("render", "SVG drawing of a topology");
    r->add_option("-i,--in", rd.in, "Topology JSON")->required();
    r->add_option("-o,--out", rd.out, "Output SVG (stdout if omitted)");
    r->add_option("--voronoi", rd.voronoi, "Voronoi JSON from build --voronoi-out");
    r->add_flag("--labels", rd.labels, "Draw node ids");

    PipelineArgs pl;
    auto* pp = app.add_subcommand("pipeline", "Full experiment: metrics, summary and simulation CSVs");
    pp->add_option("--config", pl.config, "Experiment config JSON (defaults if omitted)");
    pp->add_option("--out", pl.out, "Output directory");
    pp->add_flag("--svg", pl.svg, "Render every topology as SVG");
    pp->add_flag("-q,--quiet", pl.quiet, "No progress output");
    add_seed(pp, pl.seed);

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (*g) run_generate(gen);
        else if (*s) run_sweep(sw);
        else if (*b) run_build(bd);
        else if (*p) run_prune(pr);
        else if (*a) run_analyze(an);
        else if (*m) run_simulate(sm);
        else if (*r) run_render(rd);
        else if (*pp) run_pipeline(pl);
    } catch (const std::exception& e) {
        std::cerr << "meshtopo " << name << ": error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
