#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"
#include "wdom/generators.hpp"
#include "wdom/nice_decomposition.hpp"

using namespace wdom;
using namespace wdom::test;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(text) != std::string::npos; });
}

std::size_t bag_total(const TreeDecomposition& td) {
  std::size_t s = 0;
  for (const auto& b : td.bags) s += b.size();
  return s;
}

// Every vertex is forgotten exactly once, and never introduced above its forget.
void expect_forgotten_once(const NiceDecomposition& nd, std::size_t n) {
  std::vector<std::size_t> forgets(n, 0);
  for (const auto& node : nd.nodes)
    if (node.kind == NiceKind::forget) ++forgets[node.vertex];
  for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(forgets[v], 1u) << "vertex " << v;
}

}  // namespace

TEST(MakeNice, SingleBagOnEdgeIsAChain) {
  Graph p2 = path(2);
  auto nd = make_nice(TreeDecomposition{2, {{0, 1}}, {}}, p2);
  ASSERT_EQ(nd.node_count(), 5u);
  auto order = nd.bottom_up_order();
  std::vector<NiceKind> kinds;
  std::vector<Vertex> vertices;
  for (NodeId t : order) {
    kinds.push_back(nd.nodes[t].kind);
    if (nd.nodes[t].kind != NiceKind::leaf) vertices.push_back(nd.nodes[t].vertex);
  }
  EXPECT_EQ(kinds, (std::vector<NiceKind>{NiceKind::leaf, NiceKind::introduce, NiceKind::introduce, NiceKind::forget,
                                           NiceKind::forget}));
  EXPECT_EQ(vertices, (std::vector<Vertex>{0, 1, 0, 1}));
  EXPECT_EQ(order.back(), nd.root);
  EXPECT_TRUE(nd.nodes[nd.root].bag.empty());
}

TEST(MakeNice, EqualBagsMeetAtAJoin) {
  // A bag with two neighbours carrying the same bag: the branches meet at a join.
  Graph p2 = path(2);
  auto nd = make_nice(TreeDecomposition{2, {{0, 1}, {0, 1}, {0, 1}}, {{0, 1}, {0, 2}}}, p2);
  EXPECT_TRUE(validate_nice(nd, p2).ok());
  auto join = std::find_if(nd.nodes.begin(), nd.nodes.end(), [](const NiceNode& n) { return n.kind == NiceKind::join; });
  ASSERT_NE(join, nd.nodes.end());
  EXPECT_EQ(join->bag, (Bag{0, 1}));
  for (NodeId c : join->children) EXPECT_EQ(nd.nodes[c].bag, (Bag{0, 1}));
}

TEST(MakeNice, CycleKeepsWidth) {
  Graph c5 = cycle(5);
  auto td = decompose(c5);
  auto nd = make_nice(td, c5);
  EXPECT_TRUE(validate_nice(nd, c5).ok()) << validate_nice(nd, c5).to_string();
  EXPECT_EQ(nd.width(), td.width());
}

TEST(MakeNice, RejectsInvalidDecomposition) {
  Graph tri = complete(3);
  EXPECT_THROW(make_nice(TreeDecomposition{3, {{0, 1}, {1, 2}}, {{0, 1}}}, tri), InvalidDecomposition);
}

TEST(MakeNice, PropertiesOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    Graph g = seed % 2 ? random_gnp(1 + seed % 20, 0.1 + 0.01 * static_cast<double>(seed), seed)
                       : random_partial_ktree(4 + seed % 30, 1 + seed % 4, 0.6, seed);
    for (auto m : {EliminationMethod::min_fill, EliminationMethod::min_degree}) {
      auto td = decompose(g, m);
      auto nd = make_nice(td, g);
      auto report = validate_nice(nd, g);
      ASSERT_TRUE(report.ok()) << report.to_string();
      EXPECT_EQ(nd.width(), td.width());
      EXPECT_LE(nd.node_count(), 4 * (g.vertex_count() + bag_total(td)));
      expect_forgotten_once(nd, g.vertex_count());
      for (const auto& node : nd.nodes)
        for (NodeId c : node.children) EXPECT_LT(c, static_cast<NodeId>(&node - nd.nodes.data()));
    }
  }
}

TEST(MakeNice, ConstructionDecompositionOfPartialKTree) {
  auto pk = random_partial_ktree_with_decomposition(300, 3, 0.8, 5);
  auto nd = make_nice(pk.construction, pk.graph);
  EXPECT_TRUE(validate_nice(nd, pk.graph).ok());
  EXPECT_EQ(nd.width(), pk.construction.width());
  EXPECT_LE(nd.node_count(), 4 * (pk.graph.vertex_count() + bag_total(pk.construction)));
}

TEST(MakeNice, Deterministic) {
  Graph g = random_gnp(15, 0.3, 3);
  auto td = decompose(g);
  EXPECT_EQ(dump_nice(make_nice(td, g)), dump_nice(make_nice(td, g)));
}

TEST(ValidateNice, JoinBagsUnequal) {
  Graph g(2);
  NiceDecomposition nd;
  nd.nodes = {{NiceKind::leaf, 0, {}, {}},
              {NiceKind::introduce, 0, {0}, {0}},
              {NiceKind::leaf, 0, {}, {}},
              {NiceKind::introduce, 1, {1}, {2}},
              {NiceKind::join, 0, {0}, {1, 3}},
              {NiceKind::forget, 0, {}, {4}}};
  nd.root = 5;
  EXPECT_TRUE(mentions(validate_nice(nd, g), "join bags unequal"));
}

TEST(ValidateNice, LeafNotEmpty) {
  Graph g(1);
  NiceDecomposition nd;
  nd.nodes = {{NiceKind::leaf, 0, {0}, {}}, {NiceKind::forget, 0, {}, {0}}};
  nd.root = 1;
  EXPECT_TRUE(mentions(validate_nice(nd, g), "leaf not empty"));
}

TEST(ValidateNice, RootNotEmptyAndBadIntroduce) {
  Graph g(2);
  NiceDecomposition nd;
  nd.nodes = {{NiceKind::leaf, 0, {}, {}}, {NiceKind::introduce, 0, {0, 1}, {0}}};
  nd.root = 1;
  auto r = validate_nice(nd, g);
  EXPECT_TRUE(mentions(r, "root bag not empty"));
  EXPECT_FALSE(r.ok());
}
