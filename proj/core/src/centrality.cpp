#include "gsna/centrality.hpp"

#include <deque>

namespace gsna {

double degree(const DirectedGraph& g, NodeId v, Direction dir, bool weighted) {
  if (dir == Direction::Out) {
    auto edges = g.out_edges(v);
    if (!weighted) return static_cast<double>(edges.size());
    std::uint64_t sum = 0;
    for (const auto& e : edges) sum += e.weight;
    return static_cast<double>(sum);
  }
  auto edges = g.in_edges(v);
  if (!weighted) return static_cast<double>(edges.size());
  std::uint64_t sum = 0;
  for (const auto& e : edges) sum += e.weight;
  return static_cast<double>(sum);
}

namespace {

// BFS from s; returns (reachable count excl. s, total hop distance).
std::pair<std::size_t, std::uint64_t> bfs_distances(const DirectedGraph& g, NodeId s,
                                                    std::vector<std::int32_t>& dist,
                                                    std::deque<NodeId>& queue) {
  std::fill(dist.begin(), dist.end(), std::int32_t{-1});
  queue.clear();
  dist[s] = 0;
  queue.push_back(s);
  std::size_t reached = 0;
  std::uint64_t total = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (const OutEdge& e : g.out_edges(v)) {
      if (dist[e.to] >= 0) continue;
      dist[e.to] = dist[v] + 1;
      ++reached;
      total += static_cast<std::uint64_t>(dist[e.to]);
      queue.push_back(e.to);
    }
  }
  return {reached, total};
}

}  // namespace

std::size_t reachable_count(const DirectedGraph& g, NodeId v) {
  g.node_weight(v);  // bounds check
  std::vector<std::int32_t> dist(g.node_count());
  std::deque<NodeId> queue;
  return bfs_distances(g, v, dist, queue).first;
}

std::vector<double> closeness_centrality(const DirectedGraph& g, unsigned threads) {
  const std::size_t n = g.node_count();
  std::vector<double> result(n, 0.0);
  if (n <= 1) return result;
  parallel_blocks(n, detail::kSourceBlock, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::int32_t> dist(n);
    std::deque<NodeId> queue;
    for (std::size_t v = begin; v < end; ++v) {
      auto [reached, total] = bfs_distances(g, static_cast<NodeId>(v), dist, queue);
      if (reached == 0 || total == 0) continue;
      const double r = static_cast<double>(reached);
      result[v] = (r / static_cast<double>(n - 1)) * (r / static_cast<double>(total));
    }
  });
  return result;
}

std::vector<double> betweenness_centrality(const DirectedGraph& g, unsigned threads) {
  return betweenness_centrality_as<double>(g, threads);
}

}  // namespace gsna
