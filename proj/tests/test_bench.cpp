#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edla/bench.hpp"

using namespace edla;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("edla_bench_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.dataset = "graph2";
  s.algorithms = {Algorithm::dla_baseline, Algorithm::edla};
  s.learning_rates = {0.05, 0.09};
  s.repetitions = 6;
  s.pop_repetitions = 3;
  s.pop_stride = 25;
  s.wall_time = false;
  return s;
}

RunRecord with_series(std::vector<double> q) {
  RunRecord r;
  r.optimal_probability = std::move(q);
  r.iterations = r.optimal_probability.size();
  return r;
}

bool same_row(const SummaryRow& a, const SummaryRow& b) {
  auto eq = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  return a.algorithm == b.algorithm && eq(a.learning_rate, b.learning_rate) && eq(a.avg_samples, b.avg_samples) &&
         eq(a.avg_iterations, b.avg_iterations) && eq(a.avg_seconds, b.avg_seconds) &&
         eq(a.percent_converged, b.percent_converged);
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto s = parse_experiment_spec(R"(
# comment
dataset = alex1a
problem = smstp
algorithms = la-colony, edla
learning_rates = 0.01,0.02
repetitions = 7
max_iterations = 123
prob_target = 0.8
threshold = dynamic
mean_step = 0.2
deviation_step = 0.3
bound_mean_scale = 1
base_seed = 40
output_dir = out
pop_repetitions = 2
pop_stride = 9
pop_carry_last = true
wall_time = false
jobs = 3
)");
  CHECK(s.dataset == "alex1a");
  CHECK(s.problem == Problem::smstp);
  CHECK(s.algorithms == std::vector<Algorithm>{Algorithm::la_colony_baseline, Algorithm::edla});
  CHECK(s.learning_rates == std::vector<double>{0.01, 0.02});
  CHECK(s.repetitions == 7);
  CHECK(s.max_iterations == 123);
  CHECK(s.probability_target == 0.8);
  CHECK(s.threshold == ThresholdKind::dynamic);
  CHECK(s.variance.mean_step == 0.2);
  CHECK(s.variance.deviation_step == 0.3);
  CHECK(s.variance.mean_scale == 1.0);
  CHECK(s.base_seed == 40);
  CHECK(s.output_dir == "out");
  CHECK(s.pop_repetitions == 2);
  CHECK(s.pop_stride == 9);
  CHECK(s.pop_carry_last);
  CHECK_FALSE(s.wall_time);
  CHECK(s.jobs == 3);

  const auto c = s.solver_config(Algorithm::edla, 0.02, 5);
  CHECK(c.seed == 45);
  CHECK(c.learning_rate == 0.02);
  CHECK(c.threshold.kind == ThresholdKind::dynamic);
  CHECK(c.max_iterations == 123);
}

TEST_CASE("spec parsing errors") {
  const std::string base = "dataset = graph2\nproblem = sspp\nsource = 1\ndest = 15\n";
  CHECK_THROWS_AS(parse_experiment_spec(base + "colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "repetitions = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "repetitions = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "learning_rates = 0.5, 1.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "algorithms = la-colony\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec(base + "wall_time = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec("dataset = graph2\nproblem = sspp\n"), ConfigError);
  CHECK_THROWS_AS(load_experiment_spec("/nonexistent/x.spec"), std::runtime_error);
}

TEST_CASE("shipped experiment specs") {
  const fs::path dir = fs::path(EDLA_DATA_DIR) / "experiments";
  const auto t4 = load_experiment_spec((dir / "table4.spec").string());
  CHECK(t4.algorithms.size() * t4.learning_rates.size() == 32);
  CHECK(t4.repetitions == 50);
  const auto t5 = load_experiment_spec((dir / "table5.spec").string());
  CHECK(t5.algorithms.size() * t5.learning_rates.size() == 20);
  CHECK(t5.max_iterations == 20000);
  const auto f6 = load_experiment_spec((dir / "fig6.spec").string());
  CHECK(f6.learning_rates == std::vector<double>{0.003});
  CHECK(f6.pop_repetitions == 10);
  CHECK(f6.pop_stride == 150);

  // The full sweep shape, shrunk to one short run per cell.
  auto quick = t4;
  quick.repetitions = 1;
  quick.max_iterations = 20;
  quick.pop_repetitions = 0;
  const auto summary = run_experiment(quick);
  CHECK(summary.rows.size() == 32);
  CHECK(format_summary_csv(summary.rows).find("dla,0.003,") != std::string::npos);
}

TEST_CASE("PC is the optimal share of all repetitions") {
  const auto g2 = resolve_graph("graph2");
  auto spec = small_spec();
  spec.repetitions = 10;
  const auto s = run_experiment(spec, g2);
  REQUIRE(s.rows.size() == 4);
  const auto optimum = oracle_shortest_path(g2, 1, 15).edges;
  for (const auto& row : s.rows) {
    const double scaled = row.percent_converged / 100.0 * 10.0;
    CHECK(scaled == doctest::Approx(std::round(scaled)));
    CHECK(row.percent_converged >= 0.0);
    CHECK(row.percent_converged <= 100.0);
    CHECK(row.percent_target_reached >= row.percent_converged);
  }

  // Recompute one cell by hand.
  std::vector<RunRecord> runs;
  double samples = 0;
  int good = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    runs.push_back(solve(g2, spec.solver_config(Algorithm::edla, 0.09, i)));
    runs.back().wall_seconds = 0.0;
    if (runs.back().converged && runs.back().final_edges == optimum) {
      ++good;
      samples += static_cast<double>(runs.back().total_samples());
    }
  }
  const auto row = summarize("edla", 0.09, g2, runs, optimum);
  CHECK(row.percent_converged == good * 10.0);
  CHECK(row.avg_samples == doctest::Approx(samples / good));
  CHECK(same_row(row, s.rows[3]));
}

TEST_CASE("no converged runs gives PC 0 and empty POP averages") {
  auto spec = small_spec();
  spec.repetitions = 1;
  spec.max_iterations = 0;
  spec.algorithms = {Algorithm::edla};
  spec.learning_rates = {0.05};
  const auto s = run_experiment(spec);
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].percent_converged == 0.0);
  CHECK(std::isnan(s.rows[0].avg_samples));
  CHECK(std::isnan(s.rows[0].avg_iterations));
  REQUIRE(s.curves.size() == 1);
  CHECK(s.curves[0].points.empty());
}

TEST_CASE("experiments are deterministic across runs and worker counts") {
  auto spec = small_spec();
  const auto d1 = scratch("a"), d2 = scratch("b"), d3 = scratch("c");
  spec.output_dir = d1.string();
  run_and_write_experiment(spec);
  spec.output_dir = d2.string();
  run_and_write_experiment(spec);
  spec.output_dir = d3.string();
  spec.jobs = 4;
  run_and_write_experiment(spec);
  for (const char* f : {"summary.csv", "summary_all_runs.csv", "pop_edla_0.05.csv", "pop_dla_0.09.csv"}) {
    CAPTURE(f);
    const auto a = slurp(d1 / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(d2 / f));
    CHECK(a == slurp(d3 / f));
  }
  CHECK(slurp(d1 / "summary.csv").rfind("algorithm,learning_rate,AS,AI,AT_seconds,PC_percent\n", 0) == 0);
  CHECK(slurp(d1 / "pop_edla_0.05.csv").rfind("iteration,mean_optimal_probability\n1,", 0) == 0);
  spec.base_seed = 2;
  spec.output_dir = d3.string();
  run_and_write_experiment(spec);
  CHECK(slurp(d1 / "pop_edla_0.05.csv") != slurp(d3 / "pop_edla_0.05.csv"));
}

TEST_CASE("failures leave finished rows on disk") {
  const auto dir = scratch("partial");
  ExperimentSpec spec = small_spec();
  spec.output_dir = dir.string();
  spec.dataset = "graph2";
  spec.algorithms = {Algorithm::edla};
  spec.learning_rates = {0.05};
  run_and_write_experiment(spec);
  CHECK(parse_summary_csv(slurp(dir / "summary.csv")).size() == 1);
  spec.dataset = "/nonexistent.graph";
  CHECK_THROWS(run_and_write_experiment(spec));
  CHECK(parse_summary_csv(slurp(dir / "summary.csv")).size() == 1);
}

TEST_CASE("summary CSV round trip") {
  std::vector<SummaryRow> rows{
      {"edla", 0.05, 1354.25, 319.5, 0.038, 100.0, 1400.0, 320.0, 100.0},
      {"dla", 0.1, std::nan(""), std::nan(""), std::nan(""), 0.0, 5.0, 1.0, 0.0},
      {"la-colony", 1.0 / 3.0, 0.1 + 0.2, 1e-300, 12345678.901234567, 33.33333333333333, 0, 0, 0},
  };
  const auto parsed = parse_summary_csv(format_summary_csv(rows));
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(same_row(parsed[i], rows[i]));
  CHECK(format_summary_csv(parsed) == format_summary_csv(rows));
  CHECK_THROWS(parse_summary_csv("bad header\n"));
  CHECK_THROWS(parse_summary_csv("algorithm,learning_rate,AS,AI,AT_seconds,PC_percent\nedla,1\n"));
  CHECK(format_summary_all_runs_csv(rows).rfind(
            "algorithm,learning_rate,AS_all_runs,AI_all_runs,target_reached_percent\nedla,0.05,1400,320,100\n", 0) == 0);
}

TEST_CASE("POP CSV round trip") {
  const std::vector<PopPoint> pts{{1, 1.0 / 9.0}, {151, 0.2}, {301, 0.30000000000000004}};
  CHECK(parse_pop_csv(format_pop_csv(pts)) == pts);
  CHECK(format_pop_csv(pts).rfind("iteration,mean_optimal_probability\n1,0.1111111111111111\n", 0) == 0);
  CHECK_THROWS(parse_pop_csv("iteration,p\n"));
  CHECK(pop_file_name("la-colony", 0.07) == "pop_la-colony_0.07.csv");
}

TEST_CASE("POP curve of a single run samples its series") {
  std::vector<double> q;
  for (int i = 0; i < 47; ++i) q.push_back(0.01 * i);
  const std::vector<RunRecord> one{with_series(q)};
  const auto curve = export_pop_curve(one, 10);
  REQUIRE(curve.size() == 5);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    CHECK(curve[k].iteration == 1 + 10 * k);
    CHECK(curve[k].mean_probability == q[10 * k]);
  }
}

TEST_CASE("POP averaging over active runs") {
  const std::vector<RunRecord> runs{with_series({0.1, 0.2, 0.3, 0.4}), with_series({0.3, 0.5})};
  const auto active = export_pop_curve(runs, 1);
  REQUIRE(active.size() == 4);
  CHECK(active[0].mean_probability == doctest::Approx(0.2));
  CHECK(active[1].mean_probability == doctest::Approx(0.35));
  CHECK(active[2].mean_probability == doctest::Approx(0.3));
  const auto carried = export_pop_curve(runs, 1, true);
  CHECK(carried[2].mean_probability == doctest::Approx(0.4));
  CHECK(carried[3].mean_probability == doctest::Approx(0.45));
  CHECK_THROWS_AS(export_pop_curve(std::vector<RunRecord>{}, 5), std::invalid_argument);
  CHECK_THROWS_AS(export_pop_curve(runs, 0), std::invalid_argument);
}

TEST_CASE("POP curves stay in the unit interval") {
  const auto g2 = resolve_graph("graph2");
  auto spec = small_spec();
  spec.algorithms = {Algorithm::edla};
  spec.learning_rates = {0.02};
  spec.pop_repetitions = 5;
  const auto s = run_experiment(spec, g2);
  REQUIRE(s.curves.size() == 1);
  CHECK(std::abs(s.curves[0].points.front().mean_probability - 1.0 / 9.0) <= 1e-12);
  for (const auto& p : s.curves[0].points) {
    CHECK(p.mean_probability >= 0.0);
    CHECK(p.mean_probability <= 1.0);
  }
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.05) == "0.05");
  CHECK(format_number(100) == "100");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
