#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gsna/aggregate.hpp"
#include "gsna/centrality.hpp"
#include "gsna/geo.hpp"
#include "gsna/graph.hpp"

namespace gsna {

struct CentralityTable {
  std::vector<double> in_degree;
  std::vector<double> out_degree;
  std::vector<double> closeness;
  std::vector<double> betweenness;
  bool weighted_degrees = false;
  std::size_t size() const { return closeness.size(); }
};

inline constexpr std::array<std::string_view, 4> kCentralityNames = {
    "in_deg", "out_deg", "closeness", "betweenness"};

// Degrees here count distinct neighbors other than the node itself (or their
// weights): a cell whose users only follow each other keeps degree zero.
// Shortest-path measures treat edges as unit length.
CentralityTable centrality_suite(const DirectedGraph& g, bool weighted_degrees = false,
                                 unsigned threads = 0);
CentralityTable centrality_suite(const CellNetwork& net, bool weighted_degrees = false,
                                 unsigned threads = 0);

// Spearman rank correlation: fractional (average) ranks, then Pearson.
// Throws std::invalid_argument on constant input.
double spearman(std::span<const double> a, std::span<const double> b);

std::vector<double> fractional_ranks(std::span<const double> values);

struct SpearmanMatrix {
  std::array<std::array<double, 4>, 4> coeff{};  // order follows kCentralityNames
};

// Pairwise matrix over the four centrality columns; the diagonal is exactly 1.
// A constant column raises an error naming the offending metric.
SpearmanMatrix spearman_matrix(const CentralityTable& table);

enum class BivClass : std::uint8_t { Low = 0, Mid = 1, High = 2 };
std::string_view to_string(BivClass c);

// Three classes per variable: exact zero -> Low, below the median of the
// nonzero values -> Mid, at or above it -> High.
std::vector<BivClass> bivariate_classes(std::span<const double> values);

struct CommunityResult {
  std::vector<std::uint32_t> community;  // per node, ids 1..count by descending size
  std::size_t count = 0;
  std::vector<std::size_t> sizes;        // indexed by id-1
  double modularity = 0.0;
};

// Louvain with the directed graph symmetrized as A = W + W^T (a self-loop of
// weight w contributes 2w to the diagonal). Node visit order is shuffled from
// the seed; identical seeds give identical assignments.
CommunityResult louvain_communities(const DirectedGraph& g, std::uint64_t seed);
CommunityResult louvain_communities(const CellNetwork& net, std::uint64_t seed);

// Modularity of an arbitrary assignment under the same symmetrization.
double modularity(const DirectedGraph& g, std::span<const std::uint32_t> community);

// Per community: share (percent) of its cells per country label. Labels with
// no community sum to zero; each row sums to 100 for nonempty communities.
std::vector<std::map<std::string, double>> community_country_mix(
    const CommunityResult& communities, std::span<const std::string> country_of_node);

enum class HotClass : std::uint8_t {
  Cold99 = 0, Cold95 = 1, Cold90 = 2, NonSig = 3, Hot90 = 4, Hot95 = 5, Hot99 = 6
};
std::string_view to_string(HotClass c);

struct HotspotResult {
  std::vector<double> z;
  std::vector<HotClass> cls;
};

// Getis-Ord Gi* with binary weights over the k nearest centroids by haversine
// distance plus the cell itself; every centroid tied with the k-th distance
// is admitted. Requires k >= 1 and k < n. A constant field yields all-zero,
// non-significant scores. Confidence cutoffs: |z| >= 1.645 / 1.960 / 2.576.
HotspotResult getis_ord_gi_star(std::span<const double> values,
                                std::span<const GeoPoint> centroids, std::size_t k,
                                unsigned threads = 0);

}  // namespace gsna
