// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "reference_dp.hpp"
#include "wdom/wdom.hpp"

using namespace wdom;
using namespace wdom::test;

namespace {

// Pinned limits.
constexpr std::size_t kWdsInstances = 200;
constexpr std::size_t kLmaxInstances = 200;
constexpr std::size_t kConvolutionPairs = 500;
constexpr std::size_t kReferenceInstances = 100;
constexpr double kScaleSeconds = 60.0;
constexpr double kScaleRatio = 3.0;
constexpr std::size_t kScaleN = 20000;
constexpr std::size_t kScaleK = 5;
constexpr double kScaleKeepProb = 0.8;
constexpr std::size_t kMonotoneMaxN = 10;
// Instances whose estimated per-node join work exceeds these caps are
// regenerated with one vertex fewer (same seed and density).
constexpr double kWdsWorkCap = 2.0e8;
constexpr double kLmaxWorkCap = 2.0e9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Instance {
  Graph graph;
  NiceDecomposition nice;
  std::size_t requested_n;
  double density;
  unsigned w;
  std::uint64_t seed;
};

std::size_t bag_total(const TreeDecomposition& td) {
  std::size_t s = 0;
  for (const auto& b : td.bags) s += b.size();
  return s;
}

// Upper bound on good pairs enumerated at the largest node: each bag vertex
// contributes 1 (selected) + sum over s of (s + 1) pairs.
double join_work(const NiceDecomposition& nd, unsigned w) {
  double per_vertex = 1.0 + (w + 1.0) * (w + 2.0) / 2.0, worst = 1.0;
  for (const auto& node : nd.nodes) worst = std::max(worst, std::pow(per_vertex, static_cast<double>(node.bag.size())));
  return worst;
}

struct Criterion {
  Criterion(int i, std::string n) : id(i), name(std::move(n)) {}

  int id;
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

struct Suite {
  std::vector<Criterion> criteria;
  std::size_t node_bound_checked = 0;

  Criterion& get(int id) { return criteria[static_cast<std::size_t>(id - 1)]; }

  void check_node_bound(const Graph& g, const TreeDecomposition& td, const NiceDecomposition& nd) {
    ++node_bound_checked;
    if (nd.node_count() > 4 * (g.vertex_count() + bag_total(td)))
      get(6).fail("nice node count " + std::to_string(nd.node_count()) + " above bound");
  }
};

Instance make_instance(std::mt19937_64& rng, std::size_t n_lo, std::size_t n_hi, double cap_scale_lmax, Suite& suite,
                       bool lmax) {
  const std::size_t n = n_lo + rng() % (n_hi - n_lo + 1);
  const double density = 0.1 * static_cast<double>(1 + rng() % 9);
  const unsigned w = 1 + static_cast<unsigned>(rng() % 3);
  const std::uint64_t seed = rng();
  for (std::size_t m = n;; --m) {
    Graph g = random_gnp(m, density, seed);
    auto td = decompose(g);
    auto nd = make_nice(td, g);
    double work = join_work(nd, w);
    if (lmax) work *= cap_scale_lmax * static_cast<double>((m + 1) * (m + 1));
    if (work <= (lmax ? kLmaxWorkCap : kWdsWorkCap) || m == n_lo) {
      suite.check_node_bound(g, td, nd);
      return {std::move(g), std::move(nd), n, density, w, seed};
    }
  }
}

std::string describe(const Instance& in) {
  std::ostringstream os;
  os << "n=" << in.graph.vertex_count() << " p=" << in.density << " w=" << in.w << " seed=" << in.seed;
  return os.str();
}

void check_wds_tables(const Instance& in, Suite& suite) {
  auto naive = evaluate_wds(in.graph, in.nice, in.w, {JoinStrategy::naive, TableRetention::all, 1});
  auto conv = evaluate_wds(in.graph, in.nice, in.w, {JoinStrategy::convolution, TableRetention::all, 1});
  for (NodeId t = 0; t < in.nice.node_count(); ++t) {
    const auto& a = *naive.tables[t];
    const auto& b = *conv.tables[t];
    if (in.nice.nodes[t].kind == NiceKind::join && a.values != b.values)
      suite.get(3).fail("wds join tables differ at node " + std::to_string(t) + ", " + describe(in));
    if (b.values.size() != power(in.w + 2, in.nice.nodes[t].bag.size()))
      suite.get(6).fail("wds table size mismatch, " + describe(in));
    if (in.graph.vertex_count() <= kMonotoneMaxN && !wds_table_monotone(b))
      suite.get(7).fail("wds table not monotone at node " + std::to_string(t) + ", " + describe(in));
  }
}

void check_lmax_tables(const Instance& in, std::size_t budget, Suite& suite) {
  auto naive = evaluate_lmax(in.graph, in.nice, in.w, budget, {JoinStrategy::naive, TableRetention::all, 1});
  auto conv = evaluate_lmax(in.graph, in.nice, in.w, budget, {JoinStrategy::convolution, TableRetention::all, 1});
  const std::size_t clamped = std::min(budget, in.graph.vertex_count());
  for (NodeId t = 0; t < in.nice.node_count(); ++t) {
    const auto& a = *naive.tables[t];
    const auto& b = *conv.tables[t];
    if (in.nice.nodes[t].kind == NiceKind::join && a.values != b.values)
      suite.get(3).fail("lmax join tables differ at node " + std::to_string(t) + ", " + describe(in));
    if (b.values.size() != power(in.w + 2, in.nice.nodes[t].bag.size()) * (clamped + 1))
      suite.get(6).fail("lmax table size mismatch, " + describe(in));
    if (in.graph.vertex_count() <= kMonotoneMaxN && !lmax_table_budget_monotone(b))
      suite.get(7).fail("lmax table not budget-monotone at node " + std::to_string(t) + ", " + describe(in));
  }
}

void run_wds_oracle(Suite& suite) {
  std::mt19937_64 rng(20240601);
  auto start = Clock::now();
  std::size_t agree = 0, reduced = 0, cross = 0;
  std::size_t per_w[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < kWdsInstances; ++i) {
    Instance in = make_instance(rng, 4, 14, 0, suite, false);
    reduced += in.graph.vertex_count() < in.requested_n;
    ++per_w[in.w];
    const auto expected = brute_wdom(in.graph, in.w).value;
    auto s = solve_wdom(in.graph, in.nice, in.w, JoinStrategy::convolution, true);
    auto t = solve_wdom(in.graph, in.nice, in.w, JoinStrategy::naive, true);
    const bool ok = s.size == static_cast<Cost>(expected) && t.size == s.size &&
                    s.witness.size() == expected && is_w_dominating(in.graph, s.witness, in.w) &&
                    t.witness.size() == expected && is_w_dominating(in.graph, t.witness, in.w);
    if (ok)
      ++agree;
    else
      suite.get(1).fail("size " + std::to_string(s.size) + " vs brute " + std::to_string(expected) + ", " +
                        describe(in));
    check_wds_tables(in, suite);

    // Criterion 9: budget = optimum covers every vertex.
    auto l = solve_lmax(in.graph, in.nice, in.w, expected, JoinStrategy::convolution, true);
    if (l.value == static_cast<Cost>(in.graph.vertex_count()))
      ++cross;
    else
      suite.get(9).fail("lmax value " + std::to_string(l.value) + " at L=" + std::to_string(expected) + ", " +
                        describe(in));
  }
  suite.get(1).notes.push_back(std::to_string(agree) + "/" + std::to_string(kWdsInstances) + " agree; w=1/2/3: " +
                               std::to_string(per_w[1]) + "/" + std::to_string(per_w[2]) + "/" +
                               std::to_string(per_w[3]) + "; " + std::to_string(reduced) +
                               " regenerated smaller; " + std::to_string(seconds_since(start)).substr(0, 5) + " s");
  suite.get(9).notes.push_back(std::to_string(cross) + "/" + std::to_string(kWdsInstances) + " reach n");
}

void run_lmax_oracle(Suite& suite) {
  std::mt19937_64 rng(20240602);
  auto start = Clock::now();
  std::size_t agree = 0, reduced = 0, checks = 0;
  for (std::size_t i = 0; i < kLmaxInstances; ++i) {
    Instance in = make_instance(rng, 4, 12, 1.0, suite, true);
    reduced += in.graph.vertex_count() < in.requested_n;
    const std::size_t n = in.graph.vertex_count();
    bool ok = true;
    for (std::size_t budget = 0; budget <= n; ++budget) {
      ++checks;
      const auto expected = static_cast<Cost>(brute_lmax(in.graph, in.w, budget).value);
      auto s = solve_lmax(in.graph, in.nice, in.w, budget, JoinStrategy::convolution, true);
      auto t = solve_lmax(in.graph, in.nice, in.w, budget, JoinStrategy::naive, false);
      if (s.value != expected || t.value != expected || s.witness.size() > budget ||
          lmax_value(in.graph, s.witness, in.w) != static_cast<std::size_t>(expected)) {
        ok = false;
        suite.get(2).fail("L=" + std::to_string(budget) + " value " + std::to_string(s.value) + " vs brute " +
                          std::to_string(expected) + ", " + describe(in));
      }
    }
    agree += ok;
    // Every budget slice z <= n of the L = n tables is the table for L = z.
    check_lmax_tables(in, n, suite);
  }
  suite.get(2).notes.push_back(std::to_string(agree) + "/" + std::to_string(kLmaxInstances) + " instances agree on all " +
                               std::to_string(checks) + " (graph, L) pairs; " + std::to_string(reduced) +
                               " regenerated smaller; " + std::to_string(seconds_since(start)).substr(0, 5) + " s");
}

SetFunctionTable random_table(unsigned n, Cost bound, double hole, std::mt19937_64& rng, ConvolutionMode mode) {
  SetFunctionTable t(n, 0);
  std::uniform_int_distribution<Cost> value(0, bound);
  std::bernoulli_distribution missing(hole);
  for (auto& v : t.values) v = missing(rng) ? sentinel_of(mode) : value(rng);
  return t;
}

SetFunctionTable conv(const SetFunctionTable& g, const SetFunctionTable& h, Cost bound, ConvolutionMode mode) {
  return mode == ConvolutionMode::min_sum ? min_sum_convolve(g, h, bound) : max_sum_convolve(g, h, bound);
}

void run_convolution(Suite& suite) {
  Criterion& c = suite.get(4);
  std::mt19937_64 rng(20240603);
  auto start = Clock::now();
  std::size_t exact = 0, properties = 0, assoc = 0;
  for (std::size_t i = 0; i < kConvolutionPairs; ++i) {
    const unsigned n = static_cast<unsigned>(i % 13);
    const Cost bound = static_cast<Cost>(rng() % 33);
    const double hole = static_cast<double>(rng() % 5) * 0.2;
    bool ok = true;
    for (auto mode : {ConvolutionMode::min_sum, ConvolutionMode::max_sum}) {
      auto g = random_table(n, bound, hole, rng, mode), h = random_table(n, bound, hole, rng, mode);
      auto fast = conv(g, h, bound, mode);
      if (fast != naive_convolve(g, h, mode)) {
        ok = false;
        c.fail("fast != naive at n=" + std::to_string(n) + " M=" + std::to_string(bound));
      }
      SetFunctionTable e(n, sentinel_of(mode));
      e[0] = 0;
      bool props = conv(g, e, bound, mode) == g && conv(h, g, bound, mode) == fast;
      if (n <= 8) {
        auto k = random_table(n, bound, hole, rng, mode);
        props &= conv(fast, k, 2 * bound, mode) == conv(g, conv(h, k, 2 * bound, mode), 2 * bound, mode);
        ++assoc;
      }
      if (!props) c.fail("identity/commutativity/associativity failed at n=" + std::to_string(n));
      properties += props;
    }
    exact += ok;
  }
  c.notes.push_back(std::to_string(exact) + "/" + std::to_string(kConvolutionPairs) + " pairs exact in both modes; " +
                    std::to_string(properties) + " property checks passed (" + std::to_string(assoc) +
                    " with associativity); " + std::to_string(seconds_since(start)).substr(0, 5) + " s");
}

void run_reference(Suite& suite) {
  Criterion& c = suite.get(5);
  std::mt19937_64 rng(20240604);
  std::size_t wds_ok = 0, lmax_ok = 0;
  auto next_instance = [&](std::size_t i) {
    const std::uint64_t seed = rng();
    if (i % 2 == 0) {
      const std::size_t n = 5 + rng() % 26;
      auto pk = random_partial_ktree_with_decomposition(n, 1 + rng() % 3, 0.7, seed);
      auto nd = make_nice(pk.construction, pk.graph);
      suite.check_node_bound(pk.graph, pk.construction, nd);
      return std::make_pair(std::move(pk.graph), std::move(nd));
    }
    std::size_t n = 4 + rng() % 15;
    const double p = 0.1 * static_cast<double>(1 + rng() % 5);
    for (;; --n) {
      Graph g = random_gnp(n, p, seed);
      auto td = decompose(g);
      if (td.width() <= 5 || n == 4) {
        auto nd = make_nice(td, g);
        suite.check_node_bound(g, td, nd);
        return std::make_pair(std::move(g), std::move(nd));
      }
    }
  };
  for (std::size_t i = 0; i < kReferenceInstances; ++i) {
    auto [g, nd] = next_instance(i);
    auto s = solve_wdom(g, nd, 1);
    if (s.size == reference_domination_number(g, nd))
      ++wds_ok;
    else
      c.fail("domination number differs on n=" + std::to_string(g.vertex_count()));
  }
  for (std::size_t i = 0; i < kReferenceInstances; ++i) {
    auto [g, nd] = next_instance(i);
    bool ok = true;
    for (std::size_t budget = 0; budget <= g.vertex_count(); budget += 1 + g.vertex_count() / 8)
      if (solve_lmax(g, nd, 1, budget).value != reference_lmax(g, nd, budget)) {
        ok = false;
        c.fail("lmax differs on n=" + std::to_string(g.vertex_count()) + " L=" + std::to_string(budget));
      }
    lmax_ok += ok;
  }
  c.notes.push_back("wds " + std::to_string(wds_ok) + "/" + std::to_string(kReferenceInstances) + ", lmax " +
                    std::to_string(lmax_ok) + "/" + std::to_string(kReferenceInstances) + " match the 3-state reference");
}

struct ScaleRun {
  double seconds = 0;
  bool witness_ok = false;
  Cost size = 0;
  long width = 0;
};

ScaleRun scale_run(std::size_t n, Suite& suite) {
  auto pk = random_partial_ktree_with_decomposition(n, kScaleK, kScaleKeepProb, 8);
  auto start = Clock::now();
  auto nd = make_nice(pk.construction, pk.graph);
  auto s = solve_wdom(pk.graph, nd, 2, JoinStrategy::convolution, true, 1);
  ScaleRun r;
  r.seconds = seconds_since(start);
  r.witness_ok = s.witness.size() == static_cast<std::size_t>(s.size) && is_w_dominating(pk.graph, s.witness, 2);
  r.size = s.size;
  r.width = nd.width();
  suite.check_node_bound(pk.graph, pk.construction, nd);
  return r;
}

void run_scale(Suite& suite) {
  Criterion& c = suite.get(8);
  auto a = scale_run(kScaleN, suite);
  auto b = scale_run(2 * kScaleN, suite);
  const double ratio = b.seconds / a.seconds;
  std::ostringstream os;
  os.precision(3);
  os << "n=" << kScaleN << ": " << a.seconds << " s (width " << a.width << ", size " << a.size << "); n=" << 2 * kScaleN
     << ": " << b.seconds << " s; ratio " << ratio;
  c.notes.push_back(os.str());
  if (!a.witness_ok || !b.witness_ok) c.fail("witness failed validation");
  if (a.seconds >= kScaleSeconds) c.fail("n=" + std::to_string(kScaleN) + " took too long");
  if (ratio > kScaleRatio) c.fail("doubling n grew time by more than the allowed factor");
}

}  // namespace

int main() {
  Suite suite;
  suite.criteria = {{1, "wds oracle equivalence"},     {2, "lmax oracle equivalence"},
                    {3, "join strategy agreement"},    {4, "subset convolution correctness"},
                    {5, "w=1 reference cross-checks"}, {6, "table sizes and nice node bound"},
                    {7, "table monotonicity"},         {8, "scale smoke test"},
                    {9, "cross-problem consistency"}};

  struct Stage {
    const char* name;
    std::function<void(Suite&)> run;
    std::vector<int> covers;
  };
  const std::vector<Stage> stages{{"wds", run_wds_oracle, {1, 3, 6, 7, 9}},
                                  {"lmax", run_lmax_oracle, {2, 3, 6, 7}},
                                  {"convolution", run_convolution, {4}},
                                  {"reference", run_reference, {5}},
                                  {"scale", run_scale, {8}}};
  for (const auto& stage : stages) {
    try {
      stage.run(suite);
    } catch (const std::exception& e) {
      for (int id : stage.covers) suite.get(id).fail(std::string("stage ") + stage.name + " threw: " + e.what());
    }
  }
  suite.get(6).notes.push_back("node bound checked on " + std::to_string(suite.node_bound_checked) + " decompositions");

  bool all = true;
  for (const auto& c : suite.criteria) {
    std::cout << (c.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name;
    for (const auto& n : c.notes) std::cout << " | " << n;
    if (!c.pass) std::cout << " | first failure: " << c.first_failure;
    std::cout << "\n";
    all &= c.pass;
  }
  return all ? 0 : 1;
}
