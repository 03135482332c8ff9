#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wdom/generators.hpp"
#include "wdom/oracle.hpp"

using namespace wdom;
using namespace wdom::test;

TEST(IsWDominating, Examples) {
  Graph g = random_gnp(8, 0.3, 1);
  std::vector<Vertex> all{0, 1, 2, 3, 4, 5, 6, 7};
  for (unsigned w = 1; w <= 4; ++w) EXPECT_TRUE(is_w_dominating(g, all, w));
  std::vector<Vertex> opposite{0, 2};
  EXPECT_TRUE(is_w_dominating(cycle(4), opposite, 2));
  std::vector<Vertex> adjacent{0, 1};
  EXPECT_FALSE(is_w_dominating(cycle(4), adjacent, 2));
  EXPECT_TRUE(is_w_dominating(Graph(0), std::vector<Vertex>{}, 1));
  std::vector<Vertex> bad{9};
  EXPECT_THROW(is_w_dominating(cycle(4), bad, 1), ArgumentError);
}

TEST(LmaxValue, Examples) {
  std::vector<Vertex> center{0};
  EXPECT_EQ(lmax_value(star(4), center, 1), 5u);
  EXPECT_EQ(lmax_value(star(4), center, 2), 1u);
  EXPECT_EQ(lmax_value(cycle(4), std::vector<Vertex>{}, 1), 0u);
}

TEST(BruteWdom, Examples) {
  EXPECT_EQ(brute_wdom(cycle(5), 1).value, 2u);
  EXPECT_EQ(brute_wdom(cycle(4), 2).set, (std::vector<Vertex>{0, 2}));
  EXPECT_EQ(brute_wdom(path(3), 2).set, (std::vector<Vertex>{0, 2}));
  EXPECT_EQ(brute_wdom(path(3), 3).value, 3u);
  EXPECT_EQ(brute_wdom(Graph(0), 1).value, 0u);
  EXPECT_THROW(brute_wdom(Graph(21), 1), ArgumentError);
}

TEST(BruteLmax, Examples) {
  EXPECT_EQ(brute_lmax(cycle(4), 2, 1).value, 1u);
  EXPECT_EQ(brute_lmax(cycle(4), 2, 2).value, 4u);
  auto s = brute_lmax(star(4), 1, 1);
  EXPECT_EQ(s.value, 5u);
  EXPECT_EQ(s.set, std::vector<Vertex>{0});
  EXPECT_EQ(brute_lmax(cycle(4), 1, 0).value, 0u);
  EXPECT_THROW(brute_lmax(Graph(17), 1, 1), ArgumentError);
}

TEST(Brute, ResultsAreConsistent) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = random_gnp(3 + seed % 9, 0.4, seed);
    for (unsigned w = 1; w <= 3; ++w) {
      auto d = brute_wdom(g, w);
      EXPECT_EQ(d.set.size(), d.value);
      EXPECT_TRUE(is_w_dominating(g, d.set, w));
      auto l = brute_lmax(g, w, d.value);
      EXPECT_EQ(l.value, g.vertex_count());
      EXPECT_EQ(lmax_value(g, l.set, w), l.value);
    }
  }
}
