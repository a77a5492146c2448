#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edla/solvers.hpp"

namespace edla {

// Multi-seed sweep over algorithms and learning rates on one dataset.
// Run i of every (algorithm, rate) cell uses seed base_seed + i.
struct ExperimentSpec {
  std::string dataset = "graph2";  // bundled name or path
  Problem problem = Problem::sspp;
  NodeId source = 1;
  NodeId dest = 15;
  std::vector<Algorithm> algorithms{Algorithm::edla};
  std::vector<double> learning_rates{0.05};
  std::size_t repetitions = 50;
  std::size_t max_iterations = 10000;
  double probability_target = 0.9;
  std::optional<ThresholdKind> threshold;  // unset: per-algorithm default
  VarianceAwareParams variance{};
  std::string output_dir = ".";
  std::uint64_t base_seed = 1;
  std::size_t pop_repetitions = 10;
  std::size_t pop_stride = 150;
  bool pop_carry_last = false;
  bool wall_time = true;
  std::size_t jobs = 1;

  void validate() const;
  SolverConfig solver_config(Algorithm algorithm, double rate, std::size_t run) const;
};

// Line-oriented key=value text; '#' starts a comment. Unknown keys are
// rejected. `origin_dir` resolves a relative dataset path.
ExperimentSpec parse_experiment_spec(std::string_view text, const std::string& origin_dir = "");
ExperimentSpec load_experiment_spec(const std::string& path);

struct SummaryRow {
  std::string algorithm;
  double learning_rate = 0.0;
  // Averages over runs that converged to the known optimum.
  double avg_samples = 0.0;     // AS
  double avg_iterations = 0.0;  // AI
  double avg_seconds = 0.0;     // AT
  double percent_converged = 0.0;  // PC
  // Averages over every run, and the share that reached the probability target at all.
  double avg_samples_all = 0.0;
  double avg_iterations_all = 0.0;
  double percent_target_reached = 0.0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct PopPoint {
  std::size_t iteration;
  double mean_probability;
  friend bool operator==(const PopPoint&, const PopPoint&) = default;
};

struct PopCurve {
  std::string algorithm;
  double learning_rate;
  std::vector<PopPoint> points;
};

struct ExperimentSummary {
  std::vector<SummaryRow> rows;  // one per (algorithm, rate), in spec order
  std::vector<PopCurve> curves;
};

// Whether a run ended at the reference optimum (edge order ignored for trees).
bool ended_at_optimum(const StochasticGraph& graph, const RunRecord& record, std::span<const EdgeId> optimum);

SummaryRow summarize(const std::string& algorithm, double rate, const StochasticGraph& graph,
                     std::span<const RunRecord> runs, std::span<const EdgeId> optimum);

// Rows at iterations 1, 1+stride, ... of the mean optimal-sub-graph
// probability. By default a run stops contributing once it has terminated;
// with carry_last it keeps contributing its final value. Throws
// std::invalid_argument on an empty record set or zero stride.
std::vector<PopPoint> export_pop_curve(std::span<const RunRecord> records, std::size_t stride, bool carry_last = false);

ExperimentSummary run_experiment(const ExperimentSpec& spec);
ExperimentSummary run_experiment(const ExperimentSpec& spec, const StochasticGraph& graph);

// Runs the experiment and writes summary.csv, summary_all_runs.csv and one
// pop_<alg>_<rate>.csv per cell into spec.output_dir. summary.csv is rewritten
// after each finished cell so a failure leaves the completed rows on disk.
ExperimentSummary run_and_write_experiment(const ExperimentSpec& spec);

std::string format_summary_csv(std::span<const SummaryRow> rows);
std::string format_summary_all_runs_csv(std::span<const SummaryRow> rows);
std::vector<SummaryRow> parse_summary_csv(std::string_view text);
std::string format_pop_csv(std::span<const PopPoint> points);
std::vector<PopPoint> parse_pop_csv(std::string_view text);
std::string pop_file_name(const std::string& algorithm, double rate);

// Shortest decimal text that parses back to the same double; "nan" for NaN.
std::string format_number(double x);

}  // namespace edla
