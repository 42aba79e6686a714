#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace meshtopo;
namespace fs = std::filesystem;

namespace {

Point P(double x, double y) { return point_from_meters(x, y); }

class TempDir {
public:
    TempDir()
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("meshtopo_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

int run(const std::string& args, const std::string& stderr_file = "")
{
    std::string cmd = std::string(MESHTOPO_CLI) + " " + args + " > /dev/null";
    cmd += stderr_file.empty() ? " 2>/dev/null" : " 2>" + stderr_file;
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) { return read_text_file(path, "test"); }

Topology sample_topology()
{
    Topology t({Node{1, P(10, 20)}, Node{2, P(300.5, 40)}, Node{7, P(100, 900.25)}}, Area{1000, 1000});
    t.add_link(1, 2);
    t.add_link(7, 2);
    return t;
}

}  // namespace

TEST(Json, TopologyRoundTrip)
{
    const Topology t = sample_topology();
    const Json j = topology_to_json(t);
    EXPECT_EQ(topology_from_json(j), t);
    EXPECT_EQ(topology_from_json(parse_json(j.dump(), "x")), t);
}

TEST(Json, MissingLinksIsSchemaError)
{
    Json j = topology_to_json(sample_topology());
    j.erase("links");
    try {
        topology_from_json(j);
        FAIL() << "expected schema error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("links"), std::string::npos);
    }
}

TEST(Json, FieldErrorsNameTheField)
{
    Json j = topology_to_json(sample_topology());
    j["nodes"][1].erase("x");
    try {
        topology_from_json(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("nodes[1].x"), std::string::npos) << e.what();
    }
    j = topology_to_json(sample_topology());
    j["links"].push_back({1, 99});
    try {
        topology_from_json(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("99"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_json("{\"nodes\": [", "broken"), Error);
}

TEST(Json, CoordinatesSnapToMicrometers)
{
    Json j = topology_to_json(sample_topology());
    j["nodes"][0]["x"] = 10.00000049;
    const Topology t = topology_from_json(j);
    EXPECT_EQ(t.position(1).x, 10'000'000);
    j["nodes"][0]["x"] = 10.0000006;
    EXPECT_EQ(topology_from_json(j).position(1).x, 10'000'001);
}

TEST(Json, FlowsRoundTrip)
{
    const std::vector<Flow> flows{{1, 2}, {7, 1}};
    EXPECT_EQ(flows_from_json(flows_to_json(flows)), flows);
    EXPECT_THROW(flows_from_json(Json::parse("[[1]]")), Error);
}

TEST(Json, VoronoiRoundTrip)
{
    const Deployment d = generate_deployment(20, Area{}, 3);
    const Rect box = expanded_area(Area{});
    const VoronoiDiagram v = voronoi_dual(build_delaunay(d.nodes), box);
    const VoronoiDiagram w = voronoi_from_json(voronoi_to_json(v, box));
    EXPECT_EQ(w.adjacency, v.adjacency);
    ASSERT_EQ(w.cells.size(), v.cells.size());
    EXPECT_EQ(w.cells[4].polygon.size(), v.cells[4].polygon.size());
}

TEST(Svg, DeterministicWithOneElementPerItem)
{
    const Topology t = sample_topology();
    const std::string a = render_svg(t);
    EXPECT_EQ(a, render_svg(t));
    auto count = [](const std::string& s, const std::string& tag) {
        std::size_t c = 0;
        for (std::size_t p = s.find(tag); p != std::string::npos; p = s.find(tag, p + 1)) ++c;
        return c;
    };
    EXPECT_EQ(count(a, "<line "), t.link_count());
    EXPECT_EQ(count(a, "<circle "), t.node_count());
    EXPECT_EQ(count(a, "<text "), 0u);
    SvgOptions opt;
    opt.labels = true;
    EXPECT_EQ(count(render_svg(t, opt), "<text "), t.node_count());
}

TEST(Deployment, DeterministicAndInsideArea)
{
    const Deployment a = generate_deployment(200, Area{}, 42);
    const Deployment b = generate_deployment(200, Area{}, 42);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_NE(generate_deployment(200, Area{}, 43).nodes, a.nodes);
    std::set<Point> pts;
    for (const Node& n : a.nodes) {
        EXPECT_TRUE(detail::within_box(Point{0, 0}, P(1000, 1000), n.pos));
        pts.insert(n.pos);
    }
    EXPECT_EQ(pts.size(), a.nodes.size());
    // Uniform density: mean nearest-neighbour distance is 0.5 / sqrt(n / A).
    double sum = 0;
    for (const Node& u : a.nodes) {
        double best = 1e18;
        for (const Node& v : a.nodes)
            if (u.id != v.id) best = std::min(best, dist(u.pos, v.pos));
        sum += best;
    }
    const double mean = sum / static_cast<double>(a.nodes.size());
    const double expect = 0.5 / std::sqrt(200.0 / 1e6);
    EXPECT_NEAR(mean, expect, 0.2 * expect);
}

TEST(Deployment, OriginalMeshUsesInitialRange)
{
    const Deployment d = generate_deployment(60, Area{}, 5, 250.0);
    const Topology t = original_topology(d);
    for (const Node& u : t.nodes()) {
        for (const Node& v : t.nodes()) {
            if (u.id < v.id) {
                EXPECT_EQ(t.has_link(Edge(u.id, v.id)), dist(u.pos, v.pos) <= 250.0);
            }
        }
    }
}

TEST(Pipeline, SmallExperimentRows)
{
    ExperimentConfig cfg;
    cfg.node_counts = {50};
    cfg.topologies_per_count = 2;
    cfg.scenarios = {Scenario{50, 10}};
    cfg.sim.duration_s = 2;
    const ExperimentResult r = run_experiment(cfg);
    EXPECT_EQ(r.metrics.size(), 2u * 3);
    EXPECT_EQ(r.sims.size(), 2u * 3);
    for (const MetricsRow& m : r.metrics) {
        EXPECT_EQ(m.n, 50u);
        if (m.kind != TopologyKind::Original) {
            EXPECT_EQ(m.crossings, 0u);
        }
    }
    for (const SimRow& s : r.sims) EXPECT_EQ(s.scenario, "50n_10f");
    // Same config, same output.
    const ExperimentResult again = run_experiment(cfg);
    EXPECT_EQ(metrics_csv(again.metrics), metrics_csv(r.metrics));
    EXPECT_EQ(sim_csv(again.sims), sim_csv(r.sims));
    EXPECT_EQ(summary_csv(again.summary), summary_csv(r.summary));
    EXPECT_EQ(metrics_csv(r.metrics).substr(0, std::string(kMetricsHeader).size()), kMetricsHeader);
}

TEST(Pipeline, ConfigFromJson)
{
    const ExperimentConfig c = experiment_config_from_json(parse_json(slurp(std::string(MESHTOPO_SAMPLES) + "/pipeline.json"), "cfg"));
    EXPECT_FALSE(c.node_counts.empty());
    EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"node_counts": "many"})")), Error);
    EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"unknown_key": 1})")), Error);
}

TEST(Cli, EndToEndIsByteIdentical)
{
    TempDir tmp;
    for (int pass = 0; pass < 2; ++pass) {
        const std::string p = std::to_string(pass);
        ASSERT_EQ(run("generate --n 60 --seed 11 -o " + tmp / ("g" + p + ".json")), 0);
        ASSERT_EQ(run("build -i " + tmp / ("g" + p + ".json") + " -o " + tmp / ("dt" + p + ".json") + " --resweep --voronoi-out " +
                      tmp / ("v" + p + ".json")),
                  0);
        ASSERT_EQ(run("prune -i " + tmp / ("dt" + p + ".json") + " -o " + tmp / ("sd" + p + ".json") + " --log " +
                      tmp / ("log" + p + ".json")),
                  0);
        ASSERT_EQ(run("analyze -i " + tmp / ("sd" + p + ".json") + " -o " + tmp / ("m" + p + ".csv")), 0);
        ASSERT_EQ(run("sweep -i " + tmp / ("g" + p + ".json") + " -o " + tmp / ("x" + p + ".json")), 0);
        ASSERT_EQ(run("simulate -i " + tmp / ("sd" + p + ".json") + " --flows 10 --duration 2 --seed 3 -o " +
                      tmp / ("s" + p + ".csv")),
                  0);
        ASSERT_EQ(run("render -i " + tmp / ("dt" + p + ".json") + " --voronoi " + tmp / ("v" + p + ".json") + " -o " +
                      tmp / ("r" + p + ".svg")),
                  0);
    }
    for (const char* f : {"g", "dt", "v", "sd", "log", "x"}) EXPECT_EQ(slurp(tmp / (f + std::string("0.json"))), slurp(tmp / (f + std::string("1.json")))) << f;
    for (const char* f : {"m", "s"}) EXPECT_EQ(slurp(tmp / (f + std::string("0.csv"))), slurp(tmp / (f + std::string("1.csv")))) << f;
    EXPECT_EQ(slurp(tmp / "r0.svg"), slurp(tmp / "r1.svg"));

    // The built and pruned topologies are planar.
    EXPECT_EQ(count_crossings(load_topology(tmp / "dt0.json")), 0u);
    EXPECT_EQ(count_crossings(load_topology(tmp / "sd0.json")), 0u);
    EXPECT_EQ(slurp(tmp / "m0.csv").substr(0, std::string(kMetricsHeader).size()), kMetricsHeader);
}

TEST(Cli, SeedFromEnvironment)
{
    TempDir tmp;
    ASSERT_EQ(run("generate --n 20 --seed 5 -o " + tmp / "a.json"), 0);
    ASSERT_EQ(std::system(("MESH_TOPO_SEED=5 " + std::string(MESHTOPO_CLI) + " generate --n 20 -o " + tmp / "b.json").c_str()), 0);
    ASSERT_EQ(std::system(("MESH_TOPO_SEED=6 " + std::string(MESHTOPO_CLI) + " generate --n 20 -o " + tmp / "c.json").c_str()), 0);
    EXPECT_EQ(slurp(tmp / "a.json"), slurp(tmp / "b.json"));
    EXPECT_NE(slurp(tmp / "a.json"), slurp(tmp / "c.json"));
}

TEST(Cli, ErrorsExitNonZeroWithMessage)
{
    TempDir tmp;
    EXPECT_NE(run("build -i " + tmp / "missing.json", tmp / "err.txt"), 0);
    EXPECT_NE(slurp(tmp / "err.txt").find("missing.json"), std::string::npos);

    std::ofstream(tmp / "bad.json") << R"({"area": {"w": 10, "h": 10}, "nodes": []})";
    EXPECT_NE(run("analyze -i " + tmp / "bad.json", tmp / "err2.txt"), 0);
    EXPECT_NE(slurp(tmp / "err2.txt").find("links"), std::string::npos);

    EXPECT_NE(run("prune --max-priority 9 -i " + tmp / "bad.json"), 0);
}
