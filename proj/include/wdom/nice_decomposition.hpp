#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "wdom/error.hpp"
#include "wdom/graph.hpp"
#include "wdom/tree_decomposition.hpp"
#include "wdom/validation.hpp"

namespace wdom {

enum class NiceKind : std::uint8_t { leaf, introduce, forget, join };

inline const char* to_string(NiceKind kind) {
  switch (kind) {
    case NiceKind::leaf: return "leaf";
    case NiceKind::introduce: return "introduce";
    case NiceKind::forget: return "forget";
    case NiceKind::join: return "join";
  }
  return "?";
}

struct NiceNode {
  NiceKind kind = NiceKind::leaf;
  Vertex vertex = 0;  // introduced or forgotten vertex
  Bag bag;
  std::vector<NodeId> children;
};

/// Rooted decomposition with leaf / introduce / forget / join nodes.
struct NiceDecomposition {
  std::vector<NiceNode> nodes;
  NodeId root = 0;

  std::size_t node_count() const noexcept { return nodes.size(); }

  long width() const noexcept {
    long best = -1;
    for (const auto& n : nodes) best = std::max(best, static_cast<long>(n.bag.size()) - 1);
    return best;
  }

  /// Children-before-parents order over the nodes reachable from the root.
  std::vector<NodeId> bottom_up_order() const {
    std::vector<NodeId> order;
    if (nodes.empty()) return order;
    order.reserve(nodes.size());
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [t, next] = stack.back();
      if (next < nodes[t].children.size()) {
        NodeId c = nodes[t].children[next++];
        stack.emplace_back(c, 0);
      } else {
        order.push_back(t);
        stack.pop_back();
      }
    }
    return order;
  }

  /// The underlying plain tree decomposition.
  TreeDecomposition as_tree_decomposition(std::size_t vertex_count) const {
    TreeDecomposition td;
    td.vertex_count = vertex_count;
    for (const auto& n : nodes) td.bags.push_back(n.bag);
    for (NodeId t = 0; t < nodes.size(); ++t)
      for (NodeId c : nodes[t].children) td.edges.emplace_back(t, c);
    return td;
  }
};

/// Thrown by make_nice when the input decomposition is not valid.
class InvalidDecomposition : public Error {
 public:
  explicit InvalidDecomposition(ValidationReport report)
      : Error("invalid tree decomposition:\n" + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

class NiceBuilder {
 public:
  explicit NiceBuilder(NiceDecomposition& out) : out_(out) {}

  NodeId leaf() { return push({NiceKind::leaf, 0, {}, {}}); }

  NodeId introduce(NodeId child, Vertex v) {
    Bag bag = out_.nodes[child].bag;
    bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
    return push({NiceKind::introduce, v, std::move(bag), {child}});
  }

  NodeId forget(NodeId child, Vertex v) {
    Bag bag = out_.nodes[child].bag;
    bag.erase(std::lower_bound(bag.begin(), bag.end(), v));
    return push({NiceKind::forget, v, std::move(bag), {child}});
  }

  NodeId join(NodeId left, NodeId right) {
    return push({NiceKind::join, 0, out_.nodes[left].bag, {left, right}});
  }

  /// Forgets everything outside `target`, then introduces what is missing.
  NodeId transition(NodeId from, const Bag& target) {
    Bag current = out_.nodes[from].bag;
    Bag drop, add;
    std::set_difference(current.begin(), current.end(), target.begin(), target.end(), std::back_inserter(drop));
    std::set_difference(target.begin(), target.end(), current.begin(), current.end(), std::back_inserter(add));
    for (Vertex v : drop) from = forget(from, v);
    for (Vertex v : add) from = introduce(from, v);
    return from;
  }

 private:
  NodeId push(NiceNode node) {
    out_.nodes.push_back(std::move(node));
    return out_.nodes.size() - 1;
  }

  NiceDecomposition& out_;
};

}  // namespace detail

/// Converts a valid tree decomposition into a nice one with empty leaves and
/// an empty root. The input tree is rooted at node 0; children are visited in
/// increasing node order, introduce/forget chains run in increasing vertex
/// order, and nodes with several children become a left-leaning join comb.
/// Every child index is smaller than its parent's.
inline NiceDecomposition make_nice(const TreeDecomposition& td, const Graph& g) {
  if (auto report = validate_td(g, td); !report.ok()) throw InvalidDecomposition(std::move(report));

  NiceDecomposition nd;
  detail::NiceBuilder build(nd);
  if (td.node_count() == 0) {
    nd.root = build.leaf();
    return nd;
  }

  const std::size_t nodes = td.node_count();
  std::vector<std::vector<NodeId>> adj(nodes);
  for (auto [a, b] : td.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<NodeId> parent(nodes, nodes), order{0};
  parent[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (NodeId s : adj[order[i]])
      if (parent[s] == nodes) {
        parent[s] = order[i];
        order.push_back(s);
      }
  std::vector<std::vector<NodeId>> children(nodes);
  for (NodeId t : order)
    if (t != 0) children[parent[t]].push_back(t);
  for (auto& c : children) std::sort(c.begin(), c.end());

  std::vector<NodeId> top(nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId t = *it;
    const Bag& bag = td.bags[t];
    std::vector<NodeId> branches;
    for (NodeId c : children[t]) branches.push_back(build.transition(top[c], bag));
    if (branches.empty()) branches.push_back(build.transition(build.leaf(), bag));
    NodeId cur = branches.front();
    for (std::size_t i = 1; i < branches.size(); ++i) cur = build.join(cur, branches[i]);
    top[t] = cur;
  }
  nd.root = build.transition(top[0], Bag{});
  return nd;
}

/// Checks every nice-node clause, the empty leaf/root convention, and the
/// plain decomposition conditions.
inline ValidationReport validate_nice(const NiceDecomposition& nd, const Graph& g) {
  ValidationReport report;
  const std::size_t count = nd.node_count();
  if (count == 0) {
    report.add("no nodes");
    return report;
  }
  if (nd.root >= count) {
    report.add("root out of range");
    return report;
  }
  if (!nd.nodes[nd.root].bag.empty()) report.add("root bag not empty");

  std::vector<std::size_t> parents(count, 0);
  for (NodeId t = 0; t < count; ++t) {
    const auto& node = nd.nodes[t];
    const std::string id = "node " + std::to_string(t) + ": ";
    bool children_ok = true;
    for (NodeId c : node.children) {
      if (c >= count || c == t) {
        report.add(id + "child out of range");
        children_ok = false;
      } else {
        ++parents[c];
      }
    }
    if (!children_ok) continue;
    auto has = [&](const Bag& b, Vertex v) { return std::binary_search(b.begin(), b.end(), v); };
    switch (node.kind) {
      case NiceKind::leaf:
        if (!node.children.empty()) report.add(id + "leaf has children");
        if (!node.bag.empty()) report.add(id + "leaf not empty");
        break;
      case NiceKind::introduce: {
        if (node.children.size() != 1) {
          report.add(id + "introduce needs one child");
          break;
        }
        Bag expect = nd.nodes[node.children[0]].bag;
        if (has(expect, node.vertex)) report.add(id + "introduced vertex already in child bag");
        expect.insert(std::lower_bound(expect.begin(), expect.end(), node.vertex), node.vertex);
        if (expect != node.bag) report.add(id + "introduce bag mismatch");
        break;
      }
      case NiceKind::forget: {
        if (node.children.size() != 1) {
          report.add(id + "forget needs one child");
          break;
        }
        Bag expect = nd.nodes[node.children[0]].bag;
        if (!has(expect, node.vertex)) {
          report.add(id + "forgotten vertex not in child bag");
          break;
        }
        expect.erase(std::lower_bound(expect.begin(), expect.end(), node.vertex));
        if (expect != node.bag) report.add(id + "forget bag mismatch");
        break;
      }
      case NiceKind::join:
        if (node.children.size() != 2) {
          report.add(id + "join needs two children");
          break;
        }
        if (nd.nodes[node.children[0]].bag != node.bag || nd.nodes[node.children[1]].bag != node.bag)
          report.add(id + "join bags unequal");
        break;
    }
  }
  bool shape_ok = true;
  for (NodeId t = 0; t < count; ++t) {
    if (t == nd.root && parents[t] != 0) {
      report.add("root has a parent");
      shape_ok = false;
    }
    if (t != nd.root && parents[t] != 1) {
      report.add("node " + std::to_string(t) + " has " + std::to_string(parents[t]) + " parents");
      shape_ok = false;
    }
  }
  // With in-degree at most one and a parentless root the walk below terminates.
  if (shape_ok && nd.bottom_up_order().size() != count) report.add("nodes unreachable from the root");

  for (auto& v : validate_td(g, nd.as_tree_decomposition(g.vertex_count())).violations) report.add(v);
  return report;
}

/// One line per node: `id kind vertex|- children|- {bag}`, vertex ids 1-based.
inline std::string dump_nice(const NiceDecomposition& nd) {
  std::string out;
  for (NodeId t = 0; t < nd.node_count(); ++t) {
    const auto& node = nd.nodes[t];
    out += std::to_string(t) + " " + to_string(node.kind) + " ";
    bool has_vertex = node.kind == NiceKind::introduce || node.kind == NiceKind::forget;
    out += has_vertex ? std::to_string(node.vertex + 1) : "-";
    out += " ";
    if (node.children.empty()) out += "-";
    for (std::size_t i = 0; i < node.children.size(); ++i)
      out += (i ? "," : "") + std::to_string(node.children[i]);
    out += " {";
    for (std::size_t i = 0; i < node.bag.size(); ++i) out += (i ? " " : "") + std::to_string(node.bag[i] + 1);
    out += "}\n";
  }
  return out;
}

}  // namespace wdom
