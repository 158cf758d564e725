#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace gsna {

using NodeId = std::uint32_t;

struct OutEdge {
  NodeId to;
  std::uint64_t weight;
};

struct InEdge {
  NodeId from;
  std::uint64_t weight;
};

// Immutable directed multiweight graph in CSR form. At most one stored edge
// per ordered (source, target) pair; parallel inserts accumulate into the
// weight. Self-loops are allowed.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  std::size_t node_count() const { return node_weights_.size(); }
  std::size_t edge_count() const { return out_.size(); }

  std::uint64_t node_weight(NodeId v) const;
  std::uint64_t total_node_weight() const { return total_node_weight_; }
  std::uint64_t total_edge_weight() const { return total_edge_weight_; }

  // Sorted by target / by source.
  std::span<const OutEdge> out_edges(NodeId v) const;
  std::span<const InEdge> in_edges(NodeId v) const;

  std::uint64_t edge_weight(NodeId s, NodeId t) const;  // 0 when absent
  bool has_edge(NodeId s, NodeId t) const { return edge_weight(s, t) != 0; }

  // Visits every stored edge ordered by (source, target).
  template <class Fn>
  void for_each_edge(Fn&& fn) const {
    for (NodeId s = 0; s < node_weights_.size(); ++s)
      for (std::size_t i = out_offsets_[s]; i < out_offsets_[s + 1]; ++i)
        fn(s, out_[i].to, out_[i].weight);
  }

 private:
  friend class GraphBuilder;
  void check_node(NodeId v) const;

  std::vector<std::uint64_t> node_weights_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<std::size_t> in_offsets_{0};
  std::vector<OutEdge> out_;
  std::vector<InEdge> in_;
  std::uint64_t total_node_weight_ = 0;
  std::uint64_t total_edge_weight_ = 0;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t node_count = 0, std::uint64_t node_weight = 1);

  NodeId add_node(std::uint64_t weight = 1);
  void set_node_weight(NodeId v, std::uint64_t weight);

  // Accumulates onto an existing (source, target) edge. Weight must be >= 1.
  void add_edge(NodeId source, NodeId target, std::uint64_t weight = 1);

  std::size_t node_count() const { return node_weights_.size(); }
  DirectedGraph build() const;

 private:
  void check_node(NodeId v) const;

  std::vector<std::uint64_t> node_weights_;
  std::vector<std::unordered_map<NodeId, std::uint64_t>> out_;
};

}  // namespace gsna
