#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "gsna/graph.hpp"
#include "gsna/util.hpp"

namespace gsna {

enum class Direction { In, Out };

// Raw adjacency degree; self-loops count once in each direction.
double degree(const DirectedGraph& g, NodeId v, Direction dir, bool weighted = false);

// Nodes reachable from v along edge direction, excluding v itself.
std::size_t reachable_count(const DirectedGraph& g, NodeId v);

// Wasserman-Faust closeness for disconnected digraphs: with r nodes reachable
// from v (excluding v) at total hop distance D over n nodes,
//   C(v) = (r / (n-1)) * (r / D),
// and 0 when nothing is reachable. Hop metric ignores edge weights; self-loops
// never shorten a path.
std::vector<double> closeness_centrality(const DirectedGraph& g, unsigned threads = 0);

namespace detail {
// Sources are processed in fixed blocks and the per-block partials are summed
// in block order, making the result independent of the worker count.
inline constexpr std::size_t kSourceBlock = 64;
}  // namespace detail

// Brandes' algorithm over unweighted directed shortest paths, unnormalized,
// endpoints excluded. Acc is the accumulator for the pair-dependency sums:
// double in production, an exact rational in tests. Path counts are exact
// integers in both cases.
template <class Acc>
std::vector<Acc> betweenness_centrality_as(const DirectedGraph& g, unsigned threads = 0) {
  const std::size_t n = g.node_count();
  const std::size_t nblocks = n == 0 ? 0 : (n + detail::kSourceBlock - 1) / detail::kSourceBlock;
  std::vector<std::vector<Acc>> partial(nblocks);

  parallel_blocks(n, detail::kSourceBlock, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::vector<Acc> acc(n, Acc(0));
    std::vector<std::uint64_t> sigma(n);
    std::vector<std::int32_t> dist(n);
    std::vector<Acc> delta(n, Acc(0));
    std::vector<NodeId> order;
    order.reserve(n);

    for (std::size_t src = begin; src < end; ++src) {
      const NodeId s = static_cast<NodeId>(src);
      std::fill(sigma.begin(), sigma.end(), std::uint64_t{0});
      std::fill(dist.begin(), dist.end(), std::int32_t{-1});
      std::fill(delta.begin(), delta.end(), Acc(0));
      order.clear();

      sigma[s] = 1;
      dist[s] = 0;
      std::deque<NodeId> queue{s};
      while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (const OutEdge& e : g.out_edges(v)) {
          const NodeId w = e.to;
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
          if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
      }

      // Dependency accumulation in reverse BFS order; predecessors of w are
      // exactly its in-neighbors one hop closer to s.
      for (std::size_t i = order.size(); i-- > 1;) {
        const NodeId w = order[i];
        const Acc coeff = (Acc(1) + delta[w]) / Acc(sigma[w]);
        for (const InEdge& e : g.in_edges(w)) {
          const NodeId v = e.from;
          if (dist[v] >= 0 && dist[v] + 1 == dist[w]) delta[v] += Acc(sigma[v]) * coeff;
        }
        acc[w] += delta[w];
      }
      // delta[s] stays out: endpoints are excluded.
    }
    partial[b] = std::move(acc);
  });

  std::vector<Acc> result(n, Acc(0));
  for (std::size_t b = 0; b < nblocks; ++b)
    if (!partial[b].empty())
      for (std::size_t v = 0; v < n; ++v) result[v] += partial[b][v];
  return result;
}

std::vector<double> betweenness_centrality(const DirectedGraph& g, unsigned threads = 0);

}  // namespace gsna
