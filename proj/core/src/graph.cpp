#include "gsna/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace gsna {

void DirectedGraph::check_node(NodeId v) const {
  if (v >= node_weights_.size()) throw std::out_of_range("unknown node id");
}

std::uint64_t DirectedGraph::node_weight(NodeId v) const {
  check_node(v);
  return node_weights_[v];
}

std::span<const OutEdge> DirectedGraph::out_edges(NodeId v) const {
  check_node(v);
  return {out_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const InEdge> DirectedGraph::in_edges(NodeId v) const {
  check_node(v);
  return {in_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::uint64_t DirectedGraph::edge_weight(NodeId s, NodeId t) const {
  check_node(t);
  auto edges = out_edges(s);
  auto it = std::lower_bound(edges.begin(), edges.end(), t,
                             [](const OutEdge& e, NodeId id) { return e.to < id; });
  if (it == edges.end() || it->to != t) return 0;
  return it->weight;
}

GraphBuilder::GraphBuilder(std::size_t node_count, std::uint64_t node_weight)
    : node_weights_(node_count, node_weight), out_(node_count) {}

void GraphBuilder::check_node(NodeId v) const {
  if (v >= node_weights_.size()) throw std::out_of_range("unknown node id");
}

NodeId GraphBuilder::add_node(std::uint64_t weight) {
  node_weights_.push_back(weight);
  out_.emplace_back();
  return static_cast<NodeId>(node_weights_.size() - 1);
}

void GraphBuilder::set_node_weight(NodeId v, std::uint64_t weight) {
  check_node(v);
  node_weights_[v] = weight;
}

void GraphBuilder::add_edge(NodeId source, NodeId target, std::uint64_t weight) {
  check_node(source);
  check_node(target);
  if (weight == 0) throw std::invalid_argument("edge weights are positive");
  out_[source][target] += weight;
}

DirectedGraph GraphBuilder::build() const {
  DirectedGraph g;
  const std::size_t n = node_weights_.size();
  g.node_weights_ = node_weights_;
  for (std::uint64_t w : node_weights_) g.total_node_weight_ += w;

  std::size_t m = 0;
  for (const auto& adj : out_) m += adj.size();

  g.out_offsets_.assign(n + 1, 0);
  g.out_.resize(m);
  std::vector<std::size_t> in_count(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    g.out_offsets_[s + 1] = g.out_offsets_[s] + out_[s].size();
    std::size_t i = g.out_offsets_[s];
    for (const auto& [t, w] : out_[s]) g.out_[i++] = OutEdge{t, w};
    std::sort(g.out_.begin() + static_cast<std::ptrdiff_t>(g.out_offsets_[s]),
              g.out_.begin() + static_cast<std::ptrdiff_t>(g.out_offsets_[s + 1]),
              [](const OutEdge& a, const OutEdge& b) { return a.to < b.to; });
    for (const auto& [t, w] : out_[s]) {
      ++in_count[t];
      g.total_edge_weight_ += w;
    }
  }

  g.in_offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.in_offsets_[v + 1] = g.in_offsets_[v] + in_count[v];
  g.in_.resize(m);
  std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  // Scanning sources in ascending order keeps each in-list sorted by source.
  for (NodeId s = 0; s < n; ++s)
    for (std::size_t i = g.out_offsets_[s]; i < g.out_offsets_[s + 1]; ++i)
      g.in_[cursor[g.out_[i].to]++] = InEdge{s, g.out_[i].weight};

  return g;
}

}  // namespace gsna
