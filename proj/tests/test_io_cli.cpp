#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphlim/io.hpp"
#include "graphlim/models.hpp"
#include "test_helpers.hpp"

using namespace graphlim;
using namespace graphlim::testing;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("graphlim_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

#ifdef GRAPHLIM_CLI_PATH
std::string run_cli(const std::string& args, int* exit_code) {
  std::string cmd = std::string(GRAPHLIM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  *exit_code = WEXITSTATUS(status);
  return out;
}
#endif

}  // namespace

TEST_CASE("graph JSON round trip") {
  CounterRng rng(301);
  for (int t = 0; t < 20; ++t) {
    WeightedGraph g = random_graph(rng, rng.uniform_int(1, 8));
    WeightedGraph back = graph_from_json(graph_to_json(g));
    CHECK(back == g);
  }
  SUBCASE("symmetric closure and duplicate rejection") {
    json j = {{"vertex_weights", {1.0, 1.0}}, {"edges", {{0, 1, 2.5}}}};
    WeightedGraph g = graph_from_json(j);
    CHECK(g.beta(1, 0) == 2.5);
    json dup = {{"vertex_weights", {1.0, 1.0}}, {"edges", {{0, 1, 1.0}, {1, 0, 1.0}}}};
    CHECK_THROWS_AS(graph_from_json(dup), ValidationError);
  }
  SUBCASE("absent pairs mean zero") {
    json j = {{"vertex_weights", {1.0, 1.0, 1.0}}, {"edges", json::array()}};
    CHECK(graph_from_json(j).edge_count() == 0);
  }
}

TEST_CASE("graphon and model JSON round trips") {
  CounterRng rng(307);
  for (int t = 0; t < 20; ++t) {
    StepGraphon w = random_graphon(rng, rng.uniform_int(1, 6));
    CHECK(graphon_from_json(graphon_to_json(w)) == w);
  }
  CouplingModel m(testing::sym2(0.5, -1.0, 0.25), {0.1, -0.1}, {0.3, 0.7}, 0.25);
  CouplingModel back = model_from_json(model_to_json(m));
  CHECK(back.j == m.j);
  CHECK(back.h == m.h);
  CHECK(back.a == m.a);
  CHECK(back.eps == m.eps);
  SUBCASE("asymmetric graphon rejected on load") {
    json j = {{"step_lengths", {0.5, 0.5}}, {"values", {{0.0, 1.0}, {2.0, 0.0}}}};
    CHECK_THROWS_AS(graphon_from_json(j), ValidationError);
  }
}

TEST_CASE("quotient set JSON round trip") {
  CounterRng rng(311);
  StepGraphon w = random_graphon(rng, 2);
  QuotientSet s = sample_quotient_set(w, 2, 0.25, 0, 9);
  QuotientSet back = quotient_set_from_json(quotient_set_to_json(s));
  REQUIRE(back.points.size() == s.points.size());
  for (size_t i = 0; i < s.points.size(); ++i) CHECK(d1(back.points[i], s.points[i]) == 0.0);
  CHECK(back.meta.covering_radius == s.meta.covering_radius);
  CHECK(back.meta.seed == s.meta.seed);
}

TEST_CASE("csv writer format") {
  CsvWriter csv({"a", "b"});
  csv.add_row_values({1.0 / 3.0, 2.0});
  std::string out = csv.str();
  CHECK(out.find("# graphlim-report v1\n") == 0);
  CHECK(out.find("a,b\n") != std::string::npos);
  CHECK(out.find("0.333333333333") != std::string::npos);
}

#ifdef GRAPHLIM_CLI_PATH

TEST_CASE("cli end-to-end") {
  TempDir dir;
  save_json_file(dir.file("k2.json"), graph_to_json(k2()));
  save_json_file(dir.file("model.json"),
                 model_to_json(CouplingModel(testing::sym2(0, 1, 0), {}, {0.5, 0.5}, 0.5)));

  SUBCASE("energy reproduces the K2 values") {
    int code = 0;
    std::string out = run_cli("energy --input " + dir.file("k2.json") + " --model " +
                                  dir.file("model.json") + " --exact",
                              &code);
    CHECK(code == 0);
    json rep = json::parse(out);
    CHECK(rep["result"]["microcanonical_gse"]["value"].get<double>() ==
          doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(rep["result"]["microcanonical_free_energy"]["value"].get<double>() ==
          doctest::Approx(-1.40996).epsilon(1e-4));
  }

  SUBCASE("distance of identical inputs is exactly zero") {
    int code = 0;
    std::string out = run_cli(
        "distance --input " + dir.file("k2.json") + " --input2 " + dir.file("k2.json"), &code);
    CHECK(code == 0);
    json rep = json::parse(out);
    CHECK(rep["result"]["lower"].get<double>() == 0.0);
    CHECK(rep["result"]["upper"].get<double>() == 0.0);
    CHECK(rep["result"]["exact"].get<bool>());
  }

  SUBCASE("reports are deterministic given config and seed") {
    int code1 = 0, code2 = 0;
    std::string args = "generate --family er --n 40 --p 0.3 --seed 11";
    std::string a = run_cli(args, &code1);
    std::string b = run_cli(args, &code2);
    CHECK(code1 == 0);
    CHECK(a == b);
    std::string c = run_cli("generate --family er --n 40 --p 0.3 --seed 12", &code1);
    CHECK(a != c);
  }

  SUBCASE("generated graphs round trip through files") {
    int code = 0;
    run_cli("generate --family clique --n 10 --cn 4 --seed 1 --out " + dir.file("g.json"), &code);
    CHECK(code == 0);
    WeightedGraph g = graph_from_json(load_json_file(dir.file("g.json")));
    CHECK(g == clique_plus_isolated(10, 4));
  }

  SUBCASE("exit codes distinguish error classes") {
    int code = 0;
    run_cli("energy --input " + dir.file("k2.json") + " --model " + dir.file("model.json") +
                " --exact --budget 2",
            &code);
    CHECK(code == 3);  // budget
    save_json_file(dir.file("bad.json"),
                   json{{"J", {{0, 1}, {1, 0}}}, {"a", {0.9, 0.5}}, {"eps", 0.1}});
    run_cli("energy --input " + dir.file("k2.json") + " --model " + dir.file("bad.json"), &code);
    CHECK(code == 2);  // validation
    save_json_file(dir.file("k3.json"), graph_to_json(k3()));
    save_json_file(dir.file("pinned.json"),
                   model_to_json(CouplingModel(testing::sym2(0, 1, 0), {}, {0.5, 0.5}, 0.0)));
    run_cli("energy --input " + dir.file("k3.json") + " --model " + dir.file("pinned.json") +
                " --exact",
            &code);
    CHECK(code == 4);  // infeasible ensemble
  }

  SUBCASE("quotients and regularity subcommands emit valid reports") {
    int code = 0;
    std::string out = run_cli("quotients --input " + dir.file("k2.json") + " --q 2", &code);
    CHECK(code == 0);
    json rep = json::parse(out);
    CHECK(rep["result"]["set"]["points"].size() == 3);
    out = run_cli("regularity --input " + dir.file("k2.json") +
                      " --check lp --C 2 --eta 0.6 --p 2 --budget 1000",
                  &code);
    CHECK(code == 0);
    rep = json::parse(out);
    CHECK(rep["result"]["verdict"] == "pass");
  }

  SUBCASE("convergence report writes the versioned CSV set") {
    int code = 0;
    run_cli("convergence-report --family er --p 0.3 --sizes 30,60 --seeds 1 --seed 5 --eps 0.3 "
            "--k 4 --out " +
                dir.file("rep"),
            &code);
    CHECK(code == 0);
    std::ifstream in(dir.file("rep") + "/distance.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "# graphlim-report v1");
    std::getline(in, header);
    CHECK(header == "size,seed,dhat_upper,residual_lower,residual_target,k");
  }
}

#endif  // GRAPHLIM_CLI_PATH
