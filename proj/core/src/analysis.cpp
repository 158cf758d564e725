#include "gsna/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "gsna/util.hpp"

namespace gsna {

namespace {

double neighbor_degree(const DirectedGraph& g, NodeId v, Direction dir, bool weighted) {
  double sum = 0.0;
  if (dir == Direction::Out) {
    for (const OutEdge& e : g.out_edges(v))
      if (e.to != v) sum += weighted ? static_cast<double>(e.weight) : 1.0;
  } else {
    for (const InEdge& e : g.in_edges(v))
      if (e.from != v) sum += weighted ? static_cast<double>(e.weight) : 1.0;
  }
  return sum;
}

}  // namespace

CentralityTable centrality_suite(const DirectedGraph& g, bool weighted_degrees, unsigned threads) {
  const std::size_t n = g.node_count();
  CentralityTable t;
  t.weighted_degrees = weighted_degrees;
  t.in_degree.resize(n);
  t.out_degree.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    t.in_degree[v] = neighbor_degree(g, v, Direction::In, weighted_degrees);
    t.out_degree[v] = neighbor_degree(g, v, Direction::Out, weighted_degrees);
  }
  t.closeness = closeness_centrality(g, threads);
  t.betweenness = betweenness_centrality(g, threads);
  return t;
}

CentralityTable centrality_suite(const CellNetwork& net, bool weighted_degrees, unsigned threads) {
  return centrality_suite(net.graph, weighted_degrees, threads);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    // Ties share the average of the ranks they span (1-based).
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  if (a.size() < 2) throw std::invalid_argument("need at least two observations");
  const std::vector<double> ra = fractional_ranks(a);
  const std::vector<double> rb = fractional_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (double v : ra) ma += v;
  for (double v : rb) mb += v;
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - ma;
    const double db = rb[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) throw std::invalid_argument("constant input");
  return cov / std::sqrt(va * vb);
}

SpearmanMatrix spearman_matrix(const CentralityTable& table) {
  const std::array<const std::vector<double>*, 4> cols = {
      &table.in_degree, &table.out_degree, &table.closeness, &table.betweenness};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& c = *cols[i];
    if (c.size() != table.size()) throw std::invalid_argument("ragged centrality table");
    if (c.empty() || std::ranges::max(c) == std::ranges::min(c))
      throw std::invalid_argument("metric '" + std::string(kCentralityNames[i]) +
                                  "' is constant, correlation undefined");
  }
  SpearmanMatrix m;
  for (std::size_t i = 0; i < 4; ++i) {
    m.coeff[i][i] = 1.0;
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double r = spearman(*cols[i], *cols[j]);
      m.coeff[i][j] = r;
      m.coeff[j][i] = r;
    }
  }
  return m;
}

std::string_view to_string(BivClass c) {
  switch (c) {
    case BivClass::Low: return "low";
    case BivClass::Mid: return "mid";
    case BivClass::High: return "high";
  }
  return "unknown";
}

std::vector<BivClass> bivariate_classes(std::span<const double> values) {
  std::vector<double> nonzero;
  for (double v : values)
    if (v != 0.0) nonzero.push_back(v);
  std::vector<BivClass> cls(values.size(), BivClass::Low);
  if (nonzero.empty()) return cls;
  std::sort(nonzero.begin(), nonzero.end());
  const std::size_t h = nonzero.size() / 2;
  const double median =
      nonzero.size() % 2 == 1 ? nonzero[h] : (nonzero[h - 1] + nonzero[h]) / 2.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    cls[i] = values[i] < median ? BivClass::Mid : BivClass::High;
  }
  return cls;
}

namespace {

// Symmetrized weighted adjacency A = W + W^T, kept as loops (diagonal) plus
// off-diagonal neighbor lists. A directed self-loop of weight w becomes a
// diagonal entry 2w, consistent with k_i = sum_j A_ij.
struct SymGraph {
  std::vector<double> loops;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> k;
  double two_m = 0.0;

  static SymGraph from_directed(const DirectedGraph& g) {
    SymGraph s;
    const std::size_t n = g.node_count();
    s.loops.assign(n, 0.0);
    s.adj.resize(n);
    std::vector<std::unordered_map<std::uint32_t, double>> acc(n);
    g.for_each_edge([&](NodeId a, NodeId b, std::uint64_t w) {
      if (a == b) {
        s.loops[a] += 2.0 * static_cast<double>(w);
      } else {
        acc[a][b] += static_cast<double>(w);
        acc[b][a] += static_cast<double>(w);
      }
    });
    for (std::size_t v = 0; v < n; ++v) {
      auto& list = s.adj[v];
      list.assign(acc[v].begin(), acc[v].end());
      std::sort(list.begin(), list.end());
    }
    s.k.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      s.k[v] = s.loops[v];
      for (const auto& [u, w] : s.adj[v]) s.k[v] += w;
      s.two_m += s.k[v];
    }
    return s;
  }
};

double modularity_sym(const SymGraph& s, std::span<const std::uint32_t> community) {
  if (s.two_m == 0.0) return 0.0;
  std::uint32_t cmax = 0;
  for (std::uint32_t c : community) cmax = std::max(cmax, c);
  std::vector<double> intra(cmax + 1, 0.0), tot(cmax + 1, 0.0);
  for (std::size_t v = 0; v < s.loops.size(); ++v) {
    const std::uint32_t cv = community[v];
    tot[cv] += s.k[v];
    intra[cv] += s.loops[v];
    for (const auto& [u, w] : s.adj[v])
      if (community[u] == cv) intra[cv] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c <= cmax; ++c) {
    q += intra[c] / s.two_m - (tot[c] / s.two_m) * (tot[c] / s.two_m);
  }
  return q;
}

constexpr double kGainEps = 1e-9;

// One Louvain level: local moves until no move improves modularity by more
// than kGainEps. Returns the node -> community map (labels are compacted in
// first-appearance order) or an empty vector when nothing moved.
std::vector<std::uint32_t> local_moves(const SymGraph& s, std::mt19937_64& rng, bool* moved_any) {
  const std::size_t n = s.loops.size();
  std::vector<std::uint32_t> comm(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> tot(s.k.begin(), s.k.end());

  const std::vector<std::size_t> order = shuffled_indices(n, rng);
  std::vector<double> w_to(n, 0.0);  // scratch: weight from v to each community
  std::vector<std::uint32_t> touched;
  *moved_any = false;

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t idx : order) {
      const auto v = static_cast<std::uint32_t>(idx);
      const std::uint32_t old_c = comm[v];

      touched.clear();
      for (const auto& [u, w] : s.adj[v]) {
        const std::uint32_t c = comm[u];
        if (w_to[c] == 0.0 && c != old_c) touched.push_back(c);
        w_to[c] += w;
      }

      tot[old_c] -= s.k[v];
      // Gain of joining c relative to staying isolated:
      //   dQ(c) = w_to[c]/m - tot[c]*k_v/(2 m^2), with 2m = s.two_m.
      const double m = s.two_m / 2.0;
      auto gain = [&](std::uint32_t c) {
        return w_to[c] / m - tot[c] * s.k[v] / (2.0 * m * m);
      };
      const double stay = gain(old_c);
      std::uint32_t best_c = old_c;
      double best_gain = stay;
      for (std::uint32_t c : touched) {
        const double gc = gain(c);
        if (gc > best_gain) {
          best_gain = gc;
          best_c = c;
        }
      }
      if (best_c != old_c && best_gain - stay > kGainEps) {
        comm[v] = best_c;
        changed = true;
        *moved_any = true;
      }
      tot[comm[v]] += s.k[v];

      w_to[old_c] = 0.0;
      for (std::uint32_t c : touched) w_to[c] = 0.0;
    }
  }

  // Compact labels in first-appearance order so downstream levels are stable.
  std::vector<std::uint32_t> compact(n, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (compact[comm[v]] == std::numeric_limits<std::uint32_t>::max()) compact[comm[v]] = next++;
    comm[v] = compact[comm[v]];
  }
  return comm;
}

SymGraph aggregate_sym(const SymGraph& s, std::span<const std::uint32_t> comm,
                       std::uint32_t ncomm) {
  SymGraph out;
  out.loops.assign(ncomm, 0.0);
  out.adj.resize(ncomm);
  std::vector<std::unordered_map<std::uint32_t, double>> acc(ncomm);
  for (std::size_t v = 0; v < s.loops.size(); ++v) {
    const std::uint32_t cv = comm[v];
    out.loops[cv] += s.loops[v];
    for (const auto& [u, w] : s.adj[v]) {
      const std::uint32_t cu = comm[u];
      if (cu == cv)
        out.loops[cv] += w;  // both (v,u) and (u,v) pass through here once each
      else
        acc[cv][cu] += w;
    }
  }
  for (std::uint32_t c = 0; c < ncomm; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  out.k.assign(ncomm, 0.0);
  for (std::uint32_t c = 0; c < ncomm; ++c) {
    out.k[c] = out.loops[c];
    for (const auto& [u, w] : out.adj[c]) out.k[c] += w;
    out.two_m += out.k[c];
  }
  return out;
}

}  // namespace

double modularity(const DirectedGraph& g, std::span<const std::uint32_t> community) {
  if (community.size() != g.node_count()) throw std::invalid_argument("assignment size mismatch");
  return modularity_sym(SymGraph::from_directed(g), community);
}

CommunityResult louvain_communities(const DirectedGraph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("empty graph");

  std::mt19937_64 rng(seed);
  SymGraph level = SymGraph::from_directed(g);

  std::vector<std::uint32_t> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0u);

  if (level.two_m > 0.0) {
    double q_prev = modularity_sym(level, node_comm);
    for (;;) {
      bool moved = false;
      const std::vector<std::uint32_t> comm = local_moves(level, rng, &moved);
      if (!moved) break;
      std::uint32_t ncomm = 0;
      for (std::uint32_t c : comm) ncomm = std::max(ncomm, c + 1);
      for (std::size_t v = 0; v < n; ++v) node_comm[v] = comm[node_comm[v]];
      const double q_now = modularity_sym(level, comm);
      if (ncomm == level.loops.size() || q_now - q_prev <= kGainEps) break;
      q_prev = q_now;
      level = aggregate_sym(level, comm, ncomm);
    }
  }

  // Relabel 1..K by descending member count; ties keep the community whose
  // smallest node id is lower first.
  std::uint32_t raw_count = 0;
  for (std::uint32_t c : node_comm) raw_count = std::max(raw_count, c + 1);
  std::vector<std::size_t> size_of(raw_count, 0);
  std::vector<std::uint32_t> first_node(raw_count, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint32_t c = node_comm[v];
    ++size_of[c];
    first_node[c] = std::min(first_node[c], static_cast<std::uint32_t>(v));
  }
  std::vector<std::uint32_t> by_size(raw_count);
  std::iota(by_size.begin(), by_size.end(), 0u);
  std::sort(by_size.begin(), by_size.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (size_of[a] != size_of[b]) return size_of[a] > size_of[b];
    return first_node[a] < first_node[b];
  });
  std::vector<std::uint32_t> relabel(raw_count);
  for (std::uint32_t rank = 0; rank < raw_count; ++rank) relabel[by_size[rank]] = rank + 1;

  CommunityResult res;
  res.count = raw_count;
  res.community.resize(n);
  res.sizes.assign(raw_count, 0);
  for (std::size_t v = 0; v < n; ++v) {
    res.community[v] = relabel[node_comm[v]];
    ++res.sizes[res.community[v] - 1];
  }
  res.modularity = modularity(g, node_comm);
  return res;
}

CommunityResult louvain_communities(const CellNetwork& net, std::uint64_t seed) {
  return louvain_communities(net.graph, seed);
}

std::vector<std::map<std::string, double>> community_country_mix(
    const CommunityResult& communities, std::span<const std::string> country_of_node) {
  if (country_of_node.size() != communities.community.size())
    throw std::invalid_argument("label count mismatch");
  std::vector<std::map<std::string, std::size_t>> counts(communities.count);
  for (std::size_t v = 0; v < country_of_node.size(); ++v)
    ++counts[communities.community[v] - 1][country_of_node[v]];
  std::vector<std::map<std::string, double>> mix(communities.count);
  for (std::size_t c = 0; c < communities.count; ++c) {
    const double total = static_cast<double>(communities.sizes[c]);
    for (const auto& [code, cnt] : counts[c])
      mix[c][code] = 100.0 * static_cast<double>(cnt) / total;
  }
  return mix;
}

std::string_view to_string(HotClass c) {
  switch (c) {
    case HotClass::Cold99: return "cold99";
    case HotClass::Cold95: return "cold95";
    case HotClass::Cold90: return "cold90";
    case HotClass::NonSig: return "nonsig";
    case HotClass::Hot90: return "hot90";
    case HotClass::Hot95: return "hot95";
    case HotClass::Hot99: return "hot99";
  }
  return "unknown";
}

namespace {

HotClass classify_z(double z) {
  if (z >= 2.576) return HotClass::Hot99;
  if (z >= 1.960) return HotClass::Hot95;
  if (z >= 1.645) return HotClass::Hot90;
  if (z <= -2.576) return HotClass::Cold99;
  if (z <= -1.960) return HotClass::Cold95;
  if (z <= -1.645) return HotClass::Cold90;
  return HotClass::NonSig;
}

}  // namespace

HotspotResult getis_ord_gi_star(std::span<const double> values,
                                std::span<const GeoPoint> centroids, std::size_t k,
                                unsigned threads) {
  const std::size_t n = values.size();
  if (centroids.size() != n) throw std::invalid_argument("centroid count mismatch");
  if (n < 2) throw std::invalid_argument("need at least two cells");
  if (k < 1 || k >= n)
    throw std::invalid_argument("neighbor count k must satisfy 1 <= k < n (n = " +
                                std::to_string(n) + ", k = " + std::to_string(k) + ")");

  HotspotResult res;
  res.z.assign(n, 0.0);
  res.cls.assign(n, HotClass::NonSig);

  const auto [mn, mx] = std::ranges::minmax(values);
  if (mn == mx) return res;  // constant field: no deviation anywhere

  double mean = 0.0, sumsq = 0.0;
  for (double v : values) {
    mean += v;
    sumsq += v * v;
  }
  mean /= static_cast<double>(n);
  const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
  const double sdev = std::sqrt(var);

  parallel_blocks(n, 256, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        dist[j] = {i == j ? 0.0 : haversine_km(centroids[i], centroids[j]), j};
      std::sort(dist.begin(), dist.end());
      // dist[0] is the cell itself. Admit the k nearest others plus every
      // centroid tied with the k-th distance.
      const double kth = dist[k].first;
      double wsum = 0.0;  // total neighborhood weight W_i (self included)
      double xsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j > k && dist[j].first > kth) break;
        wsum += 1.0;
        xsum += values[dist[j].second];
      }
      const double denom_inner =
          (static_cast<double>(n) * wsum - wsum * wsum) / static_cast<double>(n - 1);
      const double denom = sdev * std::sqrt(std::max(0.0, denom_inner));
      const double z = denom == 0.0 ? 0.0 : (xsum - mean * wsum) / denom;
      res.z[i] = z;
      res.cls[i] = classify_z(z);
    }
  });
  return res;
}

}  // namespace gsna
