#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edla/bench.hpp"
#include "edla/solvers.hpp"

using json = nlohmann::json;
using namespace edla;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// Failure caused by the user's input rather than by the run itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string edge_text(const Edge& e) { return "(" + std::to_string(e.tail) + "," + std::to_string(e.head) + ")"; }

json edge_list(const StochasticGraph& g, const std::vector<EdgeId>& ids) {
  json out = json::array();
  for (EdgeId id : ids) out.push_back({g.edge(id).tail, g.edge(id).head});
  return out;
}

std::vector<NodeId> nodes_of_path(const StochasticGraph& g, NodeId source, const std::vector<EdgeId>& ids) {
  std::vector<NodeId> nodes;
  if (ids.empty()) return nodes;
  nodes.push_back(source);
  for (EdgeId id : ids) nodes.push_back(g.edge(id).other(nodes.back()));
  return nodes;
}

std::string join(const std::vector<NodeId>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

struct SolveArgs {
  std::string graph;
  std::string problem;
  std::optional<NodeId> source, dest;
  std::string algorithm = "edla";
  double learning_rate = 0.05;
  std::optional<std::string> threshold;
  std::size_t max_iters = 10000;
  double prob_target = 0.9;
  std::uint64_t seed = 1;
  bool json = false;
  double mean_step = VarianceAwareParams{}.mean_step;
  double deviation_step = VarianceAwareParams{}.deviation_step;
  double bound_mean_scale = VarianceAwareParams{}.mean_scale;
};

void require_endpoints(const std::string& problem, const std::optional<NodeId>& source,
                       const std::optional<NodeId>& dest) {
  if (problem != "sspp") return;
  if (!source) throw UsageError("--source is required for sspp");
  if (!dest) throw UsageError("--dest is required for sspp");
}

int cmd_solve(const SolveArgs& a) {
  require_endpoints(a.problem, a.source, a.dest);
  const StochasticGraph g = resolve_graph(a.graph);
  SolverConfig c;
  c.problem = parse_problem(a.problem);
  c.source = a.source.value_or(1);
  c.dest = a.dest.value_or(1);
  c.algorithm = parse_algorithm(a.algorithm);
  c.learning_rate = a.learning_rate;
  c.threshold = default_threshold(c.algorithm);
  if (a.threshold) c.threshold.kind = parse_threshold_kind(*a.threshold);
  c.threshold.variance = {a.mean_step, a.deviation_step, a.bound_mean_scale};
  c.max_iterations = a.max_iters;
  c.probability_target = a.prob_target;
  c.seed = a.seed;
  c.record_trace = false;
  const RunRecord r = solve(g, c);
  const auto optimum = optimal_edges(g, c);
  const bool at_optimum = ended_at_optimum(g, r, optimum);
  const std::vector<NodeId> path =
      c.problem == Problem::sspp ? nodes_of_path(g, c.source, r.final_edges) : std::vector<NodeId>{};

  if (a.json) {
    json out = {
        {"graph", g.name()},
        {"problem", to_string(c.problem)},
        {"algorithm", to_string(c.algorithm)},
        {"learning_rate", c.learning_rate},
        {"threshold", to_string(c.threshold.kind)},
        {"seed", c.seed},
        {"converged", r.converged},
        {"at_optimum", at_optimum},
        {"iterations", r.iterations},
        {"edge_samples", r.edge_samples},
        {"discarded_attempts", r.discarded_attempts},
        {"discarded_samples", r.discarded_samples},
        {"total_samples", r.total_samples()},
        {"wall_seconds", r.wall_seconds},
        {"final_weight", r.final_weight},
        {"final_probability", r.final_probability},
        {"optimal_probability", r.optimal_probability.empty() ? 0.0 : r.optimal_probability.back()},
        {"final_edges", edge_list(g, r.final_edges)},
    };
    if (c.problem == Problem::sspp) {
      out["source"] = c.source;
      out["dest"] = c.dest;
      out["final_path"] = path;
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }

  std::cout << "graph:       " << g.name() << " (" << to_string(c.problem) << ")\n"
            << "algorithm:   " << to_string(c.algorithm) << " a=" << format_number(c.learning_rate)
            << " threshold=" << to_string(c.threshold.kind) << " seed=" << c.seed << '\n'
            << "converged:   " << (r.converged ? "yes" : "no") << (at_optimum ? " (optimum)" : "") << '\n'
            << "iterations:  " << r.iterations << '\n'
            << "samples:     " << r.total_samples() << " (discarded " << r.discarded_samples << ")\n"
            << "probability: " << format_number(r.final_probability) << '\n'
            << "weight:      " << format_number(r.final_weight) << '\n'
            << "seconds:     " << r.wall_seconds << '\n';
  if (c.problem == Problem::sspp) {
    std::cout << "path:        " << join(path) << '\n';
  } else {
    std::cout << "tree:       ";
    for (EdgeId id : r.final_edges) std::cout << ' ' << edge_text(g.edge(id));
    std::cout << '\n';
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string spec;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  bool pop_carry_last = false;
  bool no_wall_time = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentSpec spec = load_experiment_spec(a.spec);
  if (a.base_seed) spec.base_seed = *a.base_seed;
  if (a.jobs) spec.jobs = *a.jobs;
  if (a.out) spec.output_dir = *a.out;
  if (a.pop_carry_last) spec.pop_carry_last = true;
  if (a.no_wall_time) spec.wall_time = false;
  spec.validate();
  const ExperimentSummary s = run_and_write_experiment(spec);
  std::cout << format_summary_csv(s.rows);
  std::cout << "wrote " << s.rows.size() << " rows to " << (std::filesystem::path(spec.output_dir) / "summary.csv").string()
            << '\n';
  return kExitOk;
}

struct OracleArgs {
  std::string graph;
  std::string problem;
  std::optional<NodeId> source, dest;
  bool json = false;
};

int cmd_oracle(const OracleArgs& a) {
  require_endpoints(a.problem, a.source, a.dest);
  const StochasticGraph g = resolve_graph(a.graph);
  const Problem problem = parse_problem(a.problem);
  json out = {{"graph", g.name()}, {"problem", to_string(problem)}};
  if (problem == Problem::sspp) {
    const PathOptimum p = oracle_shortest_path(g, *a.source, *a.dest);
    out["path"] = p.nodes;
    out["edges"] = edge_list(g, p.edges);
    out["expected_weight"] = p.expected_weight;
    if (!a.json) {
      std::cout << "path: " << join(p.nodes) << "\nexpected_weight: " << format_number(p.expected_weight) << '\n';
      return kExitOk;
    }
  } else {
    const TreeOptimum t = oracle_min_spanning_tree(g);
    out["edges"] = edge_list(g, t.edges);
    out["expected_weight"] = t.expected_weight;
    if (!a.json) {
      std::cout << "tree:";
      for (EdgeId id : t.edges) std::cout << ' ' << edge_text(g.edge(id));
      std::cout << "\nexpected_weight: " << format_number(t.expected_weight) << '\n';
      return kExitOk;
    }
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const StochasticGraph g = resolve_graph(path);
  std::cout << "ok: " << g.name() << ' ' << (g.directed() ? "directed" : "undirected") << " nodes=" << g.node_count()
            << " edges=" << g.edge_count() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-automata solver for stochastic shortest path and spanning tree problems"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver and report the final sub-graph");
  solve_cmd->add_option("--graph", solve_args.graph, "Bundled dataset name or graph file")->required();
  solve_cmd->add_option("--problem", solve_args.problem, "sspp or smstp")->required()->check(
      CLI::IsMember({"sspp", "smstp"}));
  solve_cmd->add_option("--source", solve_args.source, "Source node (sspp)");
  solve_cmd->add_option("--dest", solve_args.dest, "Destination node (sspp)");
  solve_cmd->add_option("--algorithm", solve_args.algorithm, "edla, dla or la-colony")
      ->check(CLI::IsMember({"edla", "dla", "la-colony"}));
  solve_cmd->add_option("--learning-rate", solve_args.learning_rate, "Reward rate in (0,1)");
  solve_cmd->add_option("--threshold", solve_args.threshold, "dynamic or variance")
      ->check(CLI::IsMember({"dynamic", "variance"}));
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "Iteration cap");
  solve_cmd->add_option("--prob-target", solve_args.prob_target, "Stop once the sub-graph probability exceeds this");
  solve_cmd->add_option("--seed", solve_args.seed, "Random seed");
  solve_cmd->add_option("--mean-step", solve_args.mean_step, "Variance-aware mean step");
  solve_cmd->add_option("--deviation-step", solve_args.deviation_step, "Variance-aware deviation step");
  solve_cmd->add_option("--bound-mean-scale", solve_args.bound_mean_scale, "Factor on the mean in the bound");
  solve_cmd->add_flag("--json", solve_args.json, "Machine-readable output");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a multi-seed sweep described by a spec file");
  exp_cmd->add_option("--spec", exp_args.spec, "Experiment spec file")->required();
  exp_cmd->add_option("--base-seed", exp_args.base_seed, "Seed of run 0");
  exp_cmd->add_option("--jobs", exp_args.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--out", exp_args.out, "Output directory");
  exp_cmd->add_flag("--pop-carry-last", exp_args.pop_carry_last, "Keep finished runs in POP averages");
  exp_cmd->add_flag("--no-wall-time", exp_args.no_wall_time, "Report AT as 0 for byte-stable output");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print the exact expected-weight optimum");
  oracle_cmd->add_option("--graph", oracle_args.graph, "Bundled dataset name or graph file")->required();
  oracle_cmd->add_option("--problem", oracle_args.problem, "sspp or smstp")->required()->check(
      CLI::IsMember({"sspp", "smstp"}));
  oracle_cmd->add_option("--source", oracle_args.source, "Source node (sspp)");
  oracle_cmd->add_option("--dest", oracle_args.dest, "Destination node (sspp)");
  oracle_cmd->add_flag("--json", oracle_args.json, "Machine-readable output");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check that a graph file parses and is well formed");
  validate_cmd->add_option("--graph", validate_path, "Bundled dataset name or graph file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*exp_cmd) return cmd_experiment(exp_args);
    if (*oracle_cmd) return cmd_oracle(oracle_args);
    if (*validate_cmd) return cmd_validate(validate_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitInvalid;
}
