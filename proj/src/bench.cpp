#include "edla/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace edla {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("invalid number '" + s + "' for " + what);
  return v;
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("invalid integer '" + s + "' for " + what);
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("invalid boolean '" + s + "' for " + what);
}

std::vector<EdgeId> canonical(const StochasticGraph& graph, std::vector<EdgeId> edges) {
  if (!graph.directed())
    std::sort(edges.begin(), edges.end(),
              [&](EdgeId a, EdgeId b) { return edge_key(graph.edge(a)) < edge_key(graph.edge(b)); });
  return edges;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

double mean_or_nan(double sum, std::size_t count) {
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

// Runs every repetition of one cell, `jobs` at a time; results are stored by
// run index so scheduling never affects the output.
std::vector<RunRecord> run_cell(const ExperimentSpec& spec, const StochasticGraph& graph, Algorithm algorithm,
                                double rate) {
  std::vector<RunRecord> runs(spec.repetitions);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        runs[i] = solve(graph, spec.solver_config(algorithm, rate, i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs.size();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, std::max<std::size_t>(1, spec.repetitions));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  if (!spec.wall_time)
    for (auto& r : runs) r.wall_seconds = 0.0;
  return runs;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (algorithms.empty()) throw ConfigError("no algorithms given");
  if (learning_rates.empty()) throw ConfigError("no learning rates given");
  for (double r : learning_rates)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("learning rate " + format_number(r) + " outside (0,1)");
  if (pop_stride < 1) throw ConfigError("pop_stride must be at least 1");
  for (Algorithm a : algorithms) solver_config(a, learning_rates.front(), 0).validate();
}

SolverConfig ExperimentSpec::solver_config(Algorithm algorithm, double rate, std::size_t run) const {
  SolverConfig c;
  c.problem = problem;
  c.source = source;
  c.dest = dest;
  c.algorithm = algorithm;
  c.learning_rate = rate;
  c.threshold = default_threshold(algorithm);
  if (threshold) c.threshold.kind = *threshold;
  c.threshold.variance = variance;
  c.max_iterations = max_iterations;
  c.probability_target = probability_target;
  c.seed = base_seed + run;
  c.record_trace = false;
  return c;
}

ExperimentSpec parse_experiment_spec(std::string_view text, const std::string& origin_dir) {
  ExperimentSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool dest_given = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    try {
      if (key == "dataset") {
        spec.dataset = value;
      } else if (key == "problem") {
        spec.problem = parse_problem(value);
      } else if (key == "source") {
        spec.source = static_cast<NodeId>(parse_unsigned(value, key));
      } else if (key == "dest") {
        spec.dest = static_cast<NodeId>(parse_unsigned(value, key));
        dest_given = true;
      } else if (key == "algorithms") {
        spec.algorithms.clear();
        for (const auto& a : split(value, ',')) spec.algorithms.push_back(parse_algorithm(a));
      } else if (key == "learning_rates") {
        spec.learning_rates.clear();
        for (const auto& r : split(value, ',')) spec.learning_rates.push_back(parse_real(r, key));
      } else if (key == "repetitions") {
        spec.repetitions = parse_unsigned(value, key);
      } else if (key == "max_iterations") {
        spec.max_iterations = parse_unsigned(value, key);
      } else if (key == "prob_target") {
        spec.probability_target = parse_real(value, key);
      } else if (key == "threshold") {
        if (value == "default")
          spec.threshold.reset();
        else
          spec.threshold = parse_threshold_kind(value);
      } else if (key == "mean_step") {
        spec.variance.mean_step = parse_real(value, key);
      } else if (key == "deviation_step") {
        spec.variance.deviation_step = parse_real(value, key);
      } else if (key == "bound_mean_scale") {
        spec.variance.mean_scale = parse_real(value, key);
      } else if (key == "base_seed") {
        spec.base_seed = parse_unsigned(value, key);
      } else if (key == "output_dir") {
        spec.output_dir = value;
      } else if (key == "pop_repetitions") {
        spec.pop_repetitions = parse_unsigned(value, key);
      } else if (key == "pop_stride") {
        spec.pop_stride = parse_unsigned(value, key);
      } else if (key == "pop_carry_last") {
        spec.pop_carry_last = parse_bool(value, key);
      } else if (key == "wall_time") {
        spec.wall_time = parse_bool(value, key);
      } else if (key == "jobs") {
        spec.jobs = parse_unsigned(value, key);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!dest_given && spec.problem == Problem::sspp) throw ConfigError("sspp experiments need 'dest'");
  const auto names = bundled_dataset_names();
  if (!origin_dir.empty() && std::find(names.begin(), names.end(), spec.dataset) == names.end()) {
    std::filesystem::path p(spec.dataset);
    if (p.is_relative() && !std::filesystem::exists(p)) spec.dataset = (std::filesystem::path(origin_dir) / p).string();
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), std::filesystem::path(path).parent_path().string());
}

bool ended_at_optimum(const StochasticGraph& graph, const RunRecord& record, std::span<const EdgeId> optimum) {
  return record.converged &&
         canonical(graph, record.final_edges) == canonical(graph, std::vector<EdgeId>(optimum.begin(), optimum.end()));
}

SummaryRow summarize(const std::string& algorithm, double rate, const StochasticGraph& graph,
                     std::span<const RunRecord> runs, std::span<const EdgeId> optimum) {
  SummaryRow row;
  row.algorithm = algorithm;
  row.learning_rate = rate;
  double samples = 0, iterations = 0, seconds = 0, samples_all = 0, iterations_all = 0;
  std::size_t good = 0, reached = 0;
  for (const auto& r : runs) {
    samples_all += static_cast<double>(r.total_samples());
    iterations_all += static_cast<double>(r.iterations);
    if (r.converged) ++reached;
    if (!ended_at_optimum(graph, r, optimum)) continue;
    ++good;
    samples += static_cast<double>(r.total_samples());
    iterations += static_cast<double>(r.iterations);
    seconds += r.wall_seconds;
  }
  const auto n = static_cast<double>(runs.size());
  row.avg_samples = mean_or_nan(samples, good);
  row.avg_iterations = mean_or_nan(iterations, good);
  row.avg_seconds = mean_or_nan(seconds, good);
  row.percent_converged = runs.empty() ? 0.0 : static_cast<double>(good) / n * 100.0;
  row.avg_samples_all = mean_or_nan(samples_all, runs.size());
  row.avg_iterations_all = mean_or_nan(iterations_all, runs.size());
  row.percent_target_reached = runs.empty() ? 0.0 : static_cast<double>(reached) / n * 100.0;
  return row;
}

std::vector<PopPoint> export_pop_curve(std::span<const RunRecord> records, std::size_t stride, bool carry_last) {
  if (records.empty()) throw std::invalid_argument("no run records");
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  std::size_t longest = 0;
  for (const auto& r : records) longest = std::max(longest, r.optimal_probability.size());
  std::vector<PopPoint> points;
  for (std::size_t it = 1; it <= longest; it += stride) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
      const auto& q = r.optimal_probability;
      if (it <= q.size()) {
        sum += q[it - 1];
        ++count;
      } else if (carry_last && !q.empty()) {
        sum += q.back();
        ++count;
      }
    }
    if (count == 0) break;
    points.push_back({it, sum / static_cast<double>(count)});
  }
  return points;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  const StochasticGraph graph = resolve_graph(spec.dataset);
  return run_experiment(spec, graph);
}

namespace {

ExperimentSummary run_cells(const ExperimentSpec& spec, const StochasticGraph& graph,
                            const std::function<void(const ExperimentSummary&)>& on_cell) {
  spec.validate();
  ExperimentSummary summary;
  const std::vector<EdgeId> optimum = optimal_edges(graph, spec.solver_config(spec.algorithms.front(), 0.5, 0));
  for (Algorithm algorithm : spec.algorithms) {
    for (double rate : spec.learning_rates) {
      const std::vector<RunRecord> runs = run_cell(spec, graph, algorithm, rate);
      const std::string name = to_string(algorithm);
      summary.rows.push_back(summarize(name, rate, graph, runs, optimum));
      if (spec.pop_repetitions > 0) {
        const std::size_t k = std::min(spec.pop_repetitions, runs.size());
        summary.curves.push_back(
            {name, rate, export_pop_curve(std::span(runs).first(k), spec.pop_stride, spec.pop_carry_last)});
      }
      if (on_cell) on_cell(summary);
    }
  }
  return summary;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec, const StochasticGraph& graph) {
  return run_cells(spec, graph, {});
}

ExperimentSummary run_and_write_experiment(const ExperimentSpec& spec) {
  const StochasticGraph graph = resolve_graph(spec.dataset);
  const std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  return run_cells(spec, graph, [&](const ExperimentSummary& partial) {
    write_file(dir / "summary.csv", format_summary_csv(partial.rows));
    write_file(dir / "summary_all_runs.csv", format_summary_all_runs_csv(partial.rows));
    if (!partial.curves.empty() && partial.curves.size() == partial.rows.size()) {
      const auto& c = partial.curves.back();
      write_file(dir / pop_file_name(c.algorithm, c.learning_rate), format_pop_csv(c.points));
    }
  });
}

std::string format_summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "algorithm,learning_rate,AS,AI,AT_seconds,PC_percent\n";
  for (const auto& r : rows) {
    out += r.algorithm + ',' + format_number(r.learning_rate) + ',' + format_number(r.avg_samples) + ',' +
           format_number(r.avg_iterations) + ',' + format_number(r.avg_seconds) + ',' +
           format_number(r.percent_converged) + '\n';
  }
  return out;
}

std::string format_summary_all_runs_csv(std::span<const SummaryRow> rows) {
  std::string out = "algorithm,learning_rate,AS_all_runs,AI_all_runs,target_reached_percent\n";
  for (const auto& r : rows) {
    out += r.algorithm + ',' + format_number(r.learning_rate) + ',' + format_number(r.avg_samples_all) + ',' +
           format_number(r.avg_iterations_all) + ',' + format_number(r.percent_target_reached) + '\n';
  }
  return out;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != "algorithm,learning_rate,AS,AI,AT_seconds,PC_percent")
    throw std::invalid_argument("unexpected summary header");
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 6) throw std::invalid_argument("summary row needs 6 fields: " + line);
    SummaryRow r;
    r.algorithm = cells[0];
    r.learning_rate = parse_real(cells[1], "learning_rate");
    r.avg_samples = parse_real(cells[2], "AS");
    r.avg_iterations = parse_real(cells[3], "AI");
    r.avg_seconds = parse_real(cells[4], "AT_seconds");
    r.percent_converged = parse_real(cells[5], "PC_percent");
    rows.push_back(r);
  }
  return rows;
}

std::string format_pop_csv(std::span<const PopPoint> points) {
  std::string out = "iteration,mean_optimal_probability\n";
  for (const auto& p : points) out += std::to_string(p.iteration) + ',' + format_number(p.mean_probability) + '\n';
  return out;
}

std::vector<PopPoint> parse_pop_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != "iteration,mean_optimal_probability")
    throw std::invalid_argument("unexpected POP header");
  std::vector<PopPoint> points;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 2) throw std::invalid_argument("POP row needs 2 fields: " + line);
    points.push_back({static_cast<std::size_t>(parse_unsigned(cells[0], "iteration")),
                      parse_real(cells[1], "mean_optimal_probability")});
  }
  return points;
}

std::string pop_file_name(const std::string& algorithm, double rate) {
  return "pop_" + algorithm + "_" + format_number(rate) + ".csv";
}

}  // namespace edla
