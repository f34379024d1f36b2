#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvkl/io.hpp"
#include "mvkl/trainer.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace mvkl;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

/// Runs the CLI binary with stdout+stderr captured.
RunResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : "env " + env + " ") +
                          std::string(MVKL_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Workspace {
  std::filesystem::path dir;
  Workspace() {
    dir = std::filesystem::temp_directory_path() /
          ("mvkl_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~Workspace() { std::filesystem::remove_all(dir); }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

double parse_reported_rmse(const std::string& output) {
  const std::string needle = "rmse mean ";
  const auto pos = output.find(needle);
  REQUIRE(pos != std::string::npos);
  return std::stod(output.substr(pos + needle.size()));
}

}  // namespace

TEST_CASE("cli usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("fit").exit_code == 2);           // missing required options
  CHECK(run_cli("frobnicate").exit_code == 2);    // unknown subcommand
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli fit/predict round trip") {
  Workspace ws;
  SyntheticVarSpec spec;
  spec.nodes = 3;
  spec.length = 40;
  spec.lag = 1;
  spec.seed = 11;
  const SyntheticVar v = generate_synthetic_var(spec);
  write_panel_csv(ws.file("panel.csv"), v.panel);
  write_file(ws.file("config.json"),
             R"({"train": {"lambda": 0.01, "outer_max": 6},
                 "dictionary": {"bandwidth_count": 3},
                 "granger": {"lag": 1}})");

  const RunResult fit_run =
      run_cli("fit --data " + ws.file("panel.csv") + " --config " +
              ws.file("config.json") + " --out " + ws.file("model.json"));
  CHECK(fit_run.exit_code == 0);
  REQUIRE(std::filesystem::exists(ws.file("model.json")));

  const RunResult predict_run =
      run_cli("predict --model " + ws.file("model.json") + " --data " +
              ws.file("panel.csv") + " --out " + ws.file("pred.csv"));
  CHECK(predict_run.exit_code == 0);
  REQUIRE(std::filesystem::exists(ws.file("pred.csv")));

  // The printed RMSE must match an in-process round trip of the same model.
  const PanelModel model = load_model(ws.file("model.json"));
  const LagDesign design = lag_embed(v.panel, -1, 1);
  const double expect =
      rmse(model.predict_features(design.features), design.response).mean;
  CHECK(parse_reported_rmse(predict_run.output) ==
        doctest::Approx(expect).epsilon(1e-6));

  // Predictions CSV has one row per design row plus the header.
  std::ifstream pred(ws.file("pred.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(pred, line))
    if (!line.empty()) ++lines;
  CHECK(lines == static_cast<int>(design.response.rows()) + 1);
}

TEST_CASE("cli granger writes a labeled square graph") {
  Workspace ws;
  SyntheticVarSpec spec;
  spec.nodes = 3;
  spec.length = 50;
  spec.lag = 1;
  spec.density = 0.4;
  spec.seed = 21;
  const SyntheticVar v = generate_synthetic_var(spec);
  write_panel_csv(ws.file("panel.csv"), v.panel);
  write_file(ws.file("config.json"),
             R"({"train": {"lambda": 0.001, "outer_max": 5},
                 "dictionary": {"type": "linear"},
                 "granger": {"lag": 1, "workers": 2}})");
  std::filesystem::create_directories(ws.file("models"));

  const RunResult run = run_cli(
      "granger --data " + ws.file("panel.csv") + " --config " +
      ws.file("config.json") + " --out " + ws.file("graph.csv") +
      " --models-dir " + ws.file("models"));
  CHECK(run.exit_code == 0);

  const CausalGraph g = read_graph_csv(ws.file("graph.csv"));
  CHECK(g.labels == v.panel.nodes);
  CHECK(g.weights.rows() == 3);
  CHECK(g.weights.cols() == 3);
  CHECK(g.weights.minCoeff() >= 0.0);
  for (const auto& node : v.panel.nodes) {
    CHECK(std::filesystem::exists(ws.file("graph.L." + node + ".csv")));
    CHECK(std::filesystem::exists(ws.file("models/" + node + ".model.json")));
  }

  // MVKL_WORKERS overrides the configured worker count; results agree.
  const RunResult serial = run_cli(
      "granger --data " + ws.file("panel.csv") + " --config " +
      ws.file("config.json") + " --out " + ws.file("graph1.csv"),
      "MVKL_WORKERS=1");
  CHECK(serial.exit_code == 0);
  const CausalGraph g1 = read_graph_csv(ws.file("graph1.csv"));
  CHECK((g1.weights - g.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cli bench emits both variant labels with monotone timestamps") {
  Workspace ws;
  SyntheticVarSpec spec;
  spec.nodes = 2;
  spec.length = 45;
  spec.lag = 1;
  spec.seed = 31;
  write_panel_csv(ws.file("panel.csv"), generate_synthetic_var(spec).panel);
  write_file(ws.file("config.json"),
             R"({"train": {"lambda": 0.01, "outer_max": 4},
                 "dictionary": {"bandwidth_count": 2},
                 "granger": {"lag": 1},
                 "bench": {"cg_eps": [0.01, 1e-6], "sdp_iter": [40],
                           "holdout": 0.25}})");

  const RunResult run =
      run_cli("bench --data " + ws.file("panel.csv") + " --config " +
              ws.file("config.json") + " --out " + ws.file("trace.csv"));
  CHECK(run.exit_code == 0);

  std::ifstream in(ws.file("trace.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "variant,outer_iter,seconds,objective,test_rmse");
  int variants_seen[2] = {0, 0};
  double last_seconds[2] = {-1.0, -1.0};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const int v = line.rfind("cg=0.01", 0) == 0 ? 0 : 1;
    ++variants_seen[v];
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    const double seconds = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
    CHECK(seconds >= last_seconds[v]);
    last_seconds[v] = seconds;
  }
  CHECK(variants_seen[0] >= 1);
  CHECK(variants_seen[1] >= 1);
}

TEST_CASE("cli bounds prints the bound table") {
  Workspace ws;
  SyntheticVarSpec spec;
  spec.nodes = 2;
  spec.length = 30;
  spec.lag = 1;
  spec.seed = 41;
  write_panel_csv(ws.file("panel.csv"), generate_synthetic_var(spec).panel);
  write_file(ws.file("config.json"),
             R"({"train": {"lambda": 0.01, "outer_max": 3},
                 "dictionary": {"bandwidth_count": 2},
                 "granger": {"lag": 1}})");
  REQUIRE(run_cli("fit --data " + ws.file("panel.csv") + " --config " +
                  ws.file("config.json") + " --out " + ws.file("model.json"))
              .exit_code == 0);
  const RunResult run = run_cli("bounds --model " + ws.file("model.json") +
                                " --lambda-norm 2.0");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("part") != std::string::npos);
  CHECK(run.output.find("separable") != std::string::npos);
}

TEST_CASE("cli maps data and config failures to exit code 3") {
  Workspace ws;
  write_file(ws.file("bad.csv"), "t,a:1\n1,2.0\n2,oops\n");
  write_file(ws.file("config.json"), R"({"train": {"lambda": 0.01}})");
  const RunResult bad_data =
      run_cli("fit --data " + ws.file("bad.csv") + " --config " +
              ws.file("config.json") + " --out " + ws.file("m.json"));
  CHECK(bad_data.exit_code == 3);
  CHECK(bad_data.output.find("line 3") != std::string::npos);

  SyntheticVarSpec spec;
  spec.nodes = 2;
  spec.length = 20;
  spec.seed = 51;
  write_panel_csv(ws.file("panel.csv"), generate_synthetic_var(spec).panel);
  write_file(ws.file("badcfg.json"), R"({"train": {"lamda": 0.01}})");
  const RunResult bad_cfg =
      run_cli("fit --data " + ws.file("panel.csv") + " --config " +
              ws.file("badcfg.json") + " --out " + ws.file("m.json"));
  CHECK(bad_cfg.exit_code == 3);
  CHECK(bad_cfg.output.find("train.lamda") != std::string::npos);

  const RunResult missing =
      run_cli("predict --model " + ws.file("absent.json") + " --data " +
              ws.file("panel.csv") + " --out " + ws.file("p.csv"));
  CHECK(missing.exit_code == 3);
}
