// Builds a random partial 3-tree, solves both problems and prints the sets.
#include <iostream>

#include "wdom/wdom.hpp"

int main() {
  using namespace wdom;
  auto pk = random_partial_ktree_with_decomposition(40, 3, 0.7, 2024);
  auto nd = make_nice(pk.construction, pk.graph);
  std::cout << "n=" << pk.graph.vertex_count() << " m=" << pk.graph.edge_count() << " width=" << nd.width()
            << " nice nodes=" << nd.node_count() << "\n";

  for (unsigned w = 1; w <= 3; ++w) {
    auto s = solve_wdom(pk.graph, nd, w);
    std::cout << "w=" << w << " minimum w-dominating set has " << s.size << " vertices:";
    for (Vertex v : s.witness) std::cout << ' ' << v + 1;
    std::cout << "\n";

    for (std::size_t budget : {std::size_t{2}, std::size_t{5}}) {
      auto l = solve_lmax(pk.graph, nd, w, budget);
      std::cout << "  L=" << budget << " best |S| + covered = " << l.value << " with S =";
      for (Vertex v : l.witness) std::cout << ' ' << v + 1;
      std::cout << "\n";
    }
  }
}
