#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args) {
  const fs::path err = fs::temp_directory_path() / "edla_cli_stderr.txt";
  const std::string cmd = std::string(EDLA_CLI_PATH) + " " + args + " 2>" + err.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

const std::string kSolve =
    "solve --graph graph2 --problem sspp --source 1 --dest 15 --algorithm edla --learning-rate 0.05 "
    "--threshold variance --max-iters 10000 --prob-target 0.9 --seed 7";

}  // namespace

TEST_CASE("solve prints a path report") {
  const auto r = run(kSolve);
  CHECK(r.code == 0);
  CHECK(r.out.find("path:        1 4 12 14 15") != std::string::npos);
  CHECK(r.out.find("converged:   yes") != std::string::npos);
}

TEST_CASE("solve --json is parseable and stable") {
  const auto r = run(kSolve + " --json");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  for (const char* key : {"graph", "problem", "algorithm", "learning_rate", "threshold", "seed", "converged",
                          "at_optimum", "iterations", "edge_samples", "discarded_attempts", "discarded_samples",
                          "total_samples", "wall_seconds", "final_weight", "final_probability",
                          "optimal_probability", "final_edges", "source", "dest", "final_path"})
    CHECK(j.contains(key));
  CHECK(j["final_path"] == json::array({1, 4, 12, 14, 15}));
  CHECK(j["converged"] == true);
  CHECK(j["seed"] == 7);
  CHECK(j["threshold"] == "variance");
  CHECK(j["final_probability"].get<double>() > 0.9);
  auto again = json::parse(run(kSolve + " --json").out);
  j.erase("wall_seconds");
  again.erase("wall_seconds");
  CHECK(j == again);
}

TEST_CASE("solve flag coverage") {
  auto j = json::parse(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --algorithm dla "
                           "--learning-rate 0.07 --threshold dynamic --max-iters 5 --prob-target 0.99 --seed 3 --json")
                           .out);
  CHECK(j["algorithm"] == "dla");
  CHECK(j["threshold"] == "dynamic");
  CHECK(j["iterations"] == 5);
  CHECK(j["converged"] == false);

  j = json::parse(run("solve --graph alex1a --problem smstp --algorithm la-colony --learning-rate 0.05 --max-iters 10 "
                      "--json")
                      .out);
  CHECK(j["algorithm"] == "la-colony");
  CHECK(j["final_edges"].size() == 7);
  CHECK_FALSE(j.contains("final_path"));

  const auto tweak = [](const std::string& extra) {
    return json::parse(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --max-iters 50 --json " + extra).out);
  };
  const auto base = tweak("");
  CHECK(base["algorithm"] == "edla");
  CHECK(base["threshold"] == "variance");
  CHECK(tweak("--mean-step 0.5")["final_probability"] != base["final_probability"]);
  CHECK(tweak("--deviation-step 0.9")["final_probability"] != base["final_probability"]);
  CHECK(tweak("--bound-mean-scale 1.0")["final_probability"] != base["final_probability"]);

  const auto text = run("solve --graph alex1a --problem smstp --max-iters 3");
  CHECK(text.code == 0);
  CHECK(text.out.find("tree:") != std::string::npos);
}

TEST_CASE("solve usage errors exit 1") {
  auto r = run("solve --graph graph2 --problem sspp --source 1");
  CHECK(r.code == 1);
  CHECK(r.err.find("--dest") != std::string::npos);
  r = run("solve --graph graph2 --problem sspp --dest 15");
  CHECK(r.code == 1);
  CHECK(r.err.find("--source") != std::string::npos);
  CHECK(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --learning-rate 1.5").code == 1);
  CHECK(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --prob-target 2").code == 1);
  CHECK(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --mean-step 0").code == 1);
  CHECK(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --bogus").code == 1);
  CHECK(run("solve --graph graph2 --problem tsp").code == 1);
  CHECK(run("solve --graph graph2 --problem sspp --source 1 --dest 15 --algorithm aco").code == 1);
  CHECK(run("solve --graph graph2 --problem smstp").code == 1);
  CHECK(run("solve --graph alex1a --problem smstp --algorithm dla").code == 1);
  CHECK(run("solve --graph graph2 --problem sspp --source 15 --dest 1").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("runtime failures exit 2") {
  CHECK(run("solve --graph /nonexistent/file.graph --problem sspp --source 1 --dest 2").code == 2);
  CHECK(run("experiment --spec /nonexistent/file.spec").code == 2);
}

TEST_CASE("oracle output") {
  auto r = run("oracle --graph alex1a --problem smstp");
  CHECK(r.code == 0);
  CHECK(r.out.find("tree: (1,3) (2,3) (2,5) (3,4) (5,6) (6,7) (7,8)") != std::string::npos);
  CHECK(r.out.find("expected_weight: 176.9") != std::string::npos);
  r = run("oracle --graph graph2 --problem sspp --source 1 --dest 15");
  CHECK(r.out.find("path: 1 4 12 14 15") != std::string::npos);
  CHECK(r.out.find("expected_weight: 66") != std::string::npos);
  const auto j = json::parse(run("oracle --graph graph2 --problem sspp --source 1 --dest 15 --json").out);
  CHECK(j["path"] == json::array({1, 4, 12, 14, 15}));
  CHECK(j["expected_weight"].get<double>() == doctest::Approx(66.0));
  const auto t = json::parse(run("oracle --graph alex1a --problem smstp --json").out);
  CHECK(t["edges"].size() == 7);
  CHECK(run("oracle --graph graph2 --problem sspp --source 1").code == 1);
  CHECK(run("oracle --graph graph2 --problem smstp").code == 1);
}

TEST_CASE("validate") {
  CHECK(run("validate --graph graph2").code == 0);
  CHECK(run("validate --graph " + std::string(EDLA_DATA_DIR) + "/alex1a.graph").code == 0);
  const auto bad = write_temp("edla_bad.graph", "graph bad directed 2\nedge 1 2 3:0.6 4:0.3\n");
  const auto r = run("validate --graph " + bad.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("probability sum 0.9") != std::string::npos);
  const auto broken = write_temp("edla_broken.graph", "graph bad directed 2\nedge 1 two 3:1\n");
  CHECK(run("validate --graph " + broken.string()).code == 1);
  CHECK(run("validate").code == 1);
}

TEST_CASE("experiment writes identical CSVs on repeat") {
  const auto spec = write_temp("edla_cli.spec",
                               "dataset = graph2\nproblem = sspp\nsource = 1\ndest = 15\nalgorithms = dla, edla\n"
                               "learning_rates = 0.05\nrepetitions = 4\npop_repetitions = 2\npop_stride = 20\n");
  const fs::path a = fs::temp_directory_path() / "edla_cli_a", b = fs::temp_directory_path() / "edla_cli_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string common = "experiment --spec " + spec.string() + " --base-seed 1 --no-wall-time";
  REQUIRE(run(common + " --out " + a.string()).code == 0);
  REQUIRE(run(common + " --out " + b.string() + " --jobs 3").code == 0);
  for (const char* f : {"summary.csv", "summary_all_runs.csv", "pop_dla_0.05.csv", "pop_edla_0.05.csv"}) {
    CAPTURE(f);
    CHECK_FALSE(slurp(a / f).empty());
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const fs::path c = fs::temp_directory_path() / "edla_cli_c";
  REQUIRE(run("experiment --spec " + spec.string() + " --no-wall-time --pop-carry-last --base-seed 9 --out " + c.string())
              .code == 0);
  CHECK(slurp(a / "pop_edla_0.05.csv") != slurp(c / "pop_edla_0.05.csv"));
  const auto timed = run("experiment --spec " + spec.string() + " --out " + c.string());
  CHECK(timed.code == 0);
  CHECK(timed.out.find("algorithm,learning_rate,AS,AI,AT_seconds,PC_percent") != std::string::npos);
  CHECK(run(common + " --jobs 0").code == 1);
  const auto bad = write_temp("edla_bad.spec", "dataset = graph2\nflavour = x\n");
  CHECK(run("experiment --spec " + bad.string()).code == 1);
}

TEST_CASE("help exits cleanly") {
  CHECK(run("--help").code == 0);
  CHECK(run("solve --help").code == 0);
}
