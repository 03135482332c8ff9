#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"
#include "wdom/generators.hpp"
#include "wdom/tree_decomposition.hpp"

using namespace wdom;
using namespace wdom::test;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(text) != std::string::npos; });
}

}  // namespace

TEST(Decompose, PathHasWidthOne) {
  for (auto m : {EliminationMethod::min_fill, EliminationMethod::min_degree}) {
    auto td = decompose(path(4), m);
    EXPECT_TRUE(validate_td(path(4), td).ok());
    EXPECT_EQ(td.width(), 1);
  }
}

TEST(Decompose, CycleHasWidthTwoAndNoOrderDoesBetter) {
  Graph c5 = cycle(5);
  auto td = decompose(c5);
  EXPECT_TRUE(validate_td(c5, td).ok());
  EXPECT_EQ(td.width(), 2);

  std::vector<Vertex> order(5);
  std::iota(order.begin(), order.end(), 0);
  long best = 100;
  do {
    auto t = decomposition_from_order(c5, order);
    ASSERT_TRUE(validate_td(c5, t).ok());
    best = std::min(best, t.width());
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(best, 2);
}

TEST(Decompose, CliqueHasFullWidth) {
  auto td = decompose(complete(4));
  EXPECT_EQ(td.width(), 3);
}

TEST(Decompose, ValidOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Graph g = random_gnp(1 + seed % 25, 0.05 + 0.015 * static_cast<double>(seed), seed);
    for (auto m : {EliminationMethod::min_fill, EliminationMethod::min_degree}) {
      auto td = decompose(g, m);
      auto r = validate_td(g, td);
      EXPECT_TRUE(r.ok()) << r.to_string();
    }
  }
}

TEST(Decompose, FullKTreeWidthIsK) {
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Graph g = random_partial_ktree(40, k, 1.0, seed);
      EXPECT_EQ(decompose(g, EliminationMethod::min_degree).width(), static_cast<long>(k));
      EXPECT_EQ(decompose(g, EliminationMethod::min_fill).width(), static_cast<long>(k));
    }
}

TEST(Decompose, DisconnectedAndEmptyGraphs) {
  Graph g = make_graph(6, {{0, 1}, {2, 3}});
  auto td = decompose(g);
  EXPECT_TRUE(validate_td(g, td).ok());
  EXPECT_EQ(td.width(), 1);
  Graph empty(0);
  EXPECT_TRUE(validate_td(empty, decompose(empty)).ok());
}

TEST(ValidateTd, SingleBagAlwaysValid) {
  EXPECT_TRUE(validate_td(path(2), TreeDecomposition{2, {{0, 1}}, {}}).ok());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = random_gnp(2 + seed, 0.4, seed);
    auto td = single_bag_decomposition(g);
    EXPECT_TRUE(validate_td(g, td).ok());
    EXPECT_EQ(td.width(), static_cast<long>(g.vertex_count()) - 1);
  }
}

TEST(ValidateTd, Violations) {
  auto forest = validate_td(path(2), TreeDecomposition{2, {{0, 1}, {0, 1}}, {}});
  EXPECT_TRUE(mentions(forest, "not a tree"));

  Graph tri = complete(3);
  auto uncovered = validate_td(tri, TreeDecomposition{3, {{0, 1}, {1, 2}}, {{0, 1}}});
  EXPECT_TRUE(mentions(uncovered, "edge {0,2} uncovered"));

  auto missing = validate_td(make_graph(3, {{0, 1}}), TreeDecomposition{3, {{0, 1}}, {}});
  EXPECT_TRUE(mentions(missing, "vertex 2 appears in no bag"));

  auto split = validate_td(path(3), TreeDecomposition{3, {{0, 1}, {1, 2}, {0}}, {{0, 1}, {1, 2}}});
  EXPECT_TRUE(mentions(split, "bags containing vertex 0 are not connected"));
}

TEST(Width, Examples) {
  EXPECT_EQ((TreeDecomposition{3, {{0, 1, 2}}, {}}).width(), 2);
  EXPECT_EQ((TreeDecomposition{6, {{0}, {1, 2, 3, 4}, {4, 5}}, {{0, 1}, {1, 2}}}).width(), 3);
  EXPECT_EQ((TreeDecomposition{2, {{0}, {1}}, {{0, 1}}}).width(), 0);
}

TEST(TdFormat, ParseExamples) {
  auto a = parse_td("s td 1 2 2\nb 1 1 2\n");
  EXPECT_EQ(a.node_count(), 1u);
  EXPECT_EQ(a.bags[0], (Bag{0, 1}));
  EXPECT_EQ(a.width(), 1);

  auto b = parse_td("s td 2 1 2\nb 1 1\nb 2 2\n1 2\n");
  EXPECT_EQ(b.node_count(), 2u);
  EXPECT_EQ(b.width(), 0);
  EXPECT_EQ(b.edges.size(), 1u);
}

TEST(TdFormat, RoundTrip) {
  const std::string canonical = "s td 3 3 4\nb 1 1 2 3\nb 2 2 3 4\nb 3 4\n1 2\n2 3\n";
  EXPECT_EQ(write_td(parse_td(canonical)), canonical);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = random_gnp(3 + seed, 0.3, seed);
    auto td = decompose(g);
    EXPECT_EQ(parse_td(write_td(td)), td);
  }
}

TEST(TdFormat, Errors) {
  EXPECT_THROW(parse_td("s td 1 2 2\nb 2 1 2\n"), ParseError);
  EXPECT_THROW(parse_td("s td 2 2 2\nb 1 1 2\n"), ParseError);
  EXPECT_THROW(parse_td("s td 1 3 2\nb 1 1 2\n"), ParseError);
  EXPECT_THROW(parse_td("s td 1 2 2\nb 1 1 3\n"), ParseError);
  EXPECT_THROW(parse_td("s td 2 1 2\nb 1 1\nb 2 2\n1 3\n"), ParseError);
  EXPECT_THROW(parse_td("b 1 1\n"), ParseError);
}
