#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wdom/wdom.hpp"

namespace wdom::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kBenchColumns = "n,k,w,L,strategy,wall_time_ms,table_cells,size_or_value,width,rep";

struct SolveResult {
  std::string problem;
  unsigned w = 1;
  std::optional<std::size_t> budget;
  long size_or_value = 0;
  std::optional<std::vector<Vertex>> witness;  // 0-based; printed 1-based
  std::optional<long> width_used;  // absent for brute force
  std::optional<std::size_t> node_count;
  std::string strategy;
  long wall_time_ms = 0;
};

inline Json to_json(const SolveResult& r) {
  Json j;
  j["problem"] = r.problem;
  j["w"] = r.w;
  if (r.budget) j["L"] = *r.budget;
  j["size_or_value"] = r.size_or_value;
  if (r.witness) {
    Json list = Json::array();
    for (Vertex v : *r.witness) list.push_back(v + 1);
    j["witness"] = list;
  }
  if (r.width_used) j["width_used"] = *r.width_used;
  if (r.node_count) j["node_count"] = *r.node_count;
  j["strategy"] = r.strategy;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline std::string to_text(const SolveResult& r) {
  std::ostringstream os;
  os << "problem: " << r.problem << "\nw: " << r.w << "\n";
  if (r.budget) os << "L: " << *r.budget << "\n";
  os << (r.problem == "wds" ? "size: " : "value: ") << r.size_or_value << "\n";
  if (r.witness) {
    os << "witness:";
    for (Vertex v : *r.witness) os << ' ' << v + 1;
    os << "\n";
  }
  if (r.width_used) os << "width: " << *r.width_used << "\n";
  if (r.node_count) os << "nodes: " << *r.node_count << "\n";
  os << "strategy: " << r.strategy << "\nwall_time_ms: " << r.wall_time_ms << "\n";
  return os.str();
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline long elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<long>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
}

/// Flags shared by solve and oracle.
struct ProblemFlags {
  std::string problem = "wds";
  unsigned w = 1;
  std::optional<std::size_t> budget;
  std::string input;
  GraphFormat format = GraphFormat::pace_gr;
  std::string td;
  EliminationMethod method = EliminationMethod::min_fill;
  JoinStrategy strategy = JoinStrategy::convolution;
  bool witness = false;
  bool json = false;
  unsigned threads = 1;

  void require_budget() const {
    if (problem == "lmax" && !budget) throw ArgumentError("--budget is required when --problem is lmax");
  }
};

inline const std::map<std::string, GraphFormat> kFormats{{"pace-gr", GraphFormat::pace_gr},
                                                          {"edge-list", GraphFormat::edge_list}};
inline const std::map<std::string, EliminationMethod> kMethods{{"min-fill", EliminationMethod::min_fill},
                                                                {"min-degree", EliminationMethod::min_degree}};
inline const std::map<std::string, JoinStrategy> kStrategies{{"naive", JoinStrategy::naive},
                                                              {"convolution", JoinStrategy::convolution}};

inline const char* strategy_name(JoinStrategy s) { return s == JoinStrategy::naive ? "naive" : "convolution"; }

inline void add_problem_flags(CLI::App& app, ProblemFlags& f) {
  app.add_option("--problem", f.problem, "wds or lmax")->required()->check(CLI::IsMember({"wds", "lmax"}));
  app.add_option("--w", f.w, "domination threshold w >= 1")->required()->check(CLI::Range(1u, kMaxW));
  app.add_option("--budget", f.budget, "budget L for lmax (clamped to n)")->check(CLI::NonNegativeNumber);
  app.add_option("--input", f.input, "graph file")->required();
  app.add_option("--format", f.format, "pace-gr (default) or edge-list")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  app.add_option("--td", f.td, "import a .td decomposition instead of computing one");
  app.add_option("--method", f.method, "min-fill (default) or min-degree")
      ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
  app.add_option("--strategy", f.strategy, "join strategy: convolution (default) or naive")
      ->transform(CLI::CheckedTransformer(kStrategies, CLI::ignore_case));
  app.add_flag("--witness", f.witness, "extract and print an optimal set");
  app.add_flag("--json", f.json, "single-line JSON output");
  app.add_option("--threads", f.threads, "worker threads for join nodes")->check(CLI::Range(1u, 256u));
}

inline SolveResult run_solve(const ProblemFlags& f) {
  f.require_budget();
  Graph g = parse_graph(read_file(f.input), f.format);
  TreeDecomposition td = f.td.empty() ? decompose(g, f.method) : parse_td(read_file(f.td));
  NiceDecomposition nd = make_nice(td, g);

  SolveResult r;
  r.problem = f.problem;
  r.w = f.w;
  r.width_used = nd.width();
  r.node_count = nd.node_count();
  r.strategy = strategy_name(f.strategy);
  auto start = std::chrono::steady_clock::now();
  if (f.problem == "wds") {
    auto s = solve_wdom(g, nd, f.w, f.strategy, f.witness, f.threads);
    r.size_or_value = s.size;
    if (f.witness) r.witness = s.witness;
  } else {
    r.budget = std::min(*f.budget, g.vertex_count());
    auto s = solve_lmax(g, nd, f.w, *r.budget, f.strategy, f.witness, f.threads);
    r.size_or_value = s.value;
    if (f.witness) r.witness = s.witness;
  }
  r.wall_time_ms = elapsed_ms(start);
  return r;
}

inline SolveResult run_oracle(const ProblemFlags& f) {
  f.require_budget();
  Graph g = parse_graph(read_file(f.input), f.format);
  SolveResult r;
  r.problem = f.problem;
  r.w = f.w;
  r.strategy = "brute-force";
  auto start = std::chrono::steady_clock::now();
  BruteResult b;
  if (f.problem == "wds") {
    b = brute_wdom(g, f.w);
  } else {
    r.budget = std::min(*f.budget, g.vertex_count());
    b = brute_lmax(g, f.w, *r.budget);
  }
  r.wall_time_ms = elapsed_ms(start);
  r.size_or_value = static_cast<long>(b.value);
  if (f.witness) r.witness = b.set;
  return r;
}

struct BenchFlags {
  std::string problem = "wds";
  std::vector<std::size_t> n{1000};
  std::vector<std::size_t> k{2};
  std::vector<unsigned> w{1};
  std::vector<std::size_t> budget{4};
  std::vector<std::string> strategies{"convolution"};
  std::string decomposition = "construction";
  double keep_prob = 0.8;
  std::uint64_t seed = 1;
  unsigned reps = 1;
  unsigned threads = 1;
};

inline void run_bench(const BenchFlags& f, std::ostream& out) {
  out << kBenchColumns << "\n";
  for (std::size_t n : f.n)
    for (std::size_t k : f.k)
      for (unsigned rep = 0; rep < f.reps; ++rep) {
        // The instance depends on (seed, n, k, rep) only.
        const std::uint64_t seed = f.seed * 1000003ULL + n * 131ULL + k * 7ULL + rep;
        auto pk = random_partial_ktree_with_decomposition(n, k, f.keep_prob, seed);
        TreeDecomposition td = f.decomposition == "construction" ? pk.construction
                                                                  : decompose(pk.graph, kMethods.at(f.decomposition));
        NiceDecomposition nd = make_nice(td, pk.graph);
        for (unsigned w : f.w)
          for (const std::string& name : f.strategies) {
            const JoinStrategy strategy = kStrategies.at(name);
            auto emit = [&](const std::string& budget, long ms, std::size_t cells, long value) {
              out << n << ',' << k << ',' << w << ',' << budget << ',' << name << ',' << ms << ',' << cells << ','
                  << value << ',' << nd.width() << ',' << rep << "\n";
            };
            if (f.problem == "wds") {
              auto start = std::chrono::steady_clock::now();
              auto s = solve_wdom(pk.graph, nd, w, strategy, false, f.threads);
              emit("", elapsed_ms(start), s.table_cells, s.size);
            } else {
              for (std::size_t budget : f.budget) {
                auto start = std::chrono::steady_clock::now();
                auto s = solve_lmax(pk.graph, nd, w, budget, strategy, false, f.threads);
                emit(std::to_string(std::min(budget, n)), elapsed_ms(start), s.table_cells, s.value);
              }
            }
          }
      }
}

}  // namespace detail

/// Runs the command line `args` (without the program name). Exit codes:
/// 0 success, 2 usage, parse or validation errors, 1 internal failures.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum w-dominating sets and L-Max w-domination on bounded-treewidth graphs"};
  app.name("wdom");
  app.require_subcommand(1);

  detail::ProblemFlags solve_flags, oracle_flags;
  auto* solve = app.add_subcommand("solve", "solve via a nice tree decomposition");
  detail::add_problem_flags(*solve, solve_flags);
  auto* oracle = app.add_subcommand("oracle", "solve by brute force (small graphs only)");
  detail::add_problem_flags(*oracle, oracle_flags);

  std::string input, td_path, output;
  GraphFormat format = GraphFormat::pace_gr;
  EliminationMethod method = EliminationMethod::min_fill;
  auto* decompose_cmd = app.add_subcommand("decompose", "write a tree decomposition in .td format");
  decompose_cmd->add_option("--input", input, "graph file")->required();
  decompose_cmd->add_option("--format", format, "pace-gr (default) or edge-list")
      ->transform(CLI::CheckedTransformer(detail::kFormats, CLI::ignore_case));
  decompose_cmd->add_option("--method", method, "min-fill (default) or min-degree")
      ->transform(CLI::CheckedTransformer(detail::kMethods, CLI::ignore_case));
  decompose_cmd->add_option("--output", output, "output path (default: standard output)");

  auto* validate = app.add_subcommand("validate-td", "check a .td file against a graph");
  validate->add_option("--input", input, "graph file")->required();
  validate->add_option("--format", format, "pace-gr (default) or edge-list")
      ->transform(CLI::CheckedTransformer(detail::kFormats, CLI::ignore_case));
  validate->add_option("--td", td_path, ".td file")->required();

  detail::BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "time the engines on random partial k-trees, CSV to standard output");
  bench->footer(std::string("CSV columns: ") + kBenchColumns +
                "\n  L is empty for wds; wall_time_ms covers the engine run (decomposition excluded);"
                "\n  table_cells counts cells computed over all nodes; width is the decomposition width.");
  bench->add_option("--problem", bench_flags.problem, "wds (default) or lmax")->check(CLI::IsMember({"wds", "lmax"}));
  bench->add_option("--n", bench_flags.n, "vertex counts")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--k", bench_flags.k, "k of the partial k-trees")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--w", bench_flags.w, "thresholds")->delimiter(',')->check(CLI::Range(1u, kMaxW));
  bench->add_option("--budget", bench_flags.budget, "budgets L (lmax)")->delimiter(',');
  bench->add_option("--strategy", bench_flags.strategies, "naive and/or convolution")
      ->delimiter(',')
      ->check(CLI::IsMember({"naive", "convolution"}));
  bench->add_option("--decomposition", bench_flags.decomposition, "construction (default), min-fill or min-degree")
      ->check(CLI::IsMember({"construction", "min-fill", "min-degree"}));
  bench->add_option("--keep-prob", bench_flags.keep_prob, "edge keep probability")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seed", bench_flags.seed, "base seed");
  bench->add_option("--reps", bench_flags.reps, "repetitions (fresh instance each)")->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_flags.threads, "worker threads for join nodes")->check(CLI::Range(1u, 256u));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed() || oracle->parsed()) {
      const bool is_solve = solve->parsed();
      auto r = is_solve ? detail::run_solve(solve_flags) : detail::run_oracle(oracle_flags);
      const bool json = is_solve ? solve_flags.json : oracle_flags.json;
      if (json)
        out << to_json(r).dump() << "\n";
      else
        out << to_text(r);
    } else if (decompose_cmd->parsed()) {
      Graph g = parse_graph(detail::read_file(input), format);
      std::string text = write_td(wdom::decompose(g, method));
      if (output.empty()) {
        out << text;
      } else {
        std::ofstream file(output, std::ios::binary);
        if (!(file << text)) throw ArgumentError("cannot write " + output);
      }
    } else if (validate->parsed()) {
      Graph g = parse_graph(detail::read_file(input), format);
      TreeDecomposition td = parse_td(detail::read_file(td_path));
      auto report = validate_td(g, td);
      if (!report.ok()) {
        out << report.to_string();
        err << "invalid tree decomposition (" << report.violations.size() << " violations)\n";
        return 2;
      }
      out << "valid, width " << td.width() << "\n";
    } else if (bench->parsed()) {
      detail::run_bench(bench_flags, out);
    }
  } catch (const InvalidDecomposition& e) {
    err << "error: " << e.what() << "\n" << e.report().to_string();
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace wdom::cli
