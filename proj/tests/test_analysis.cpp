#include <doctest.h>

#include <random>
#include <string>

#include "gsna/analysis.hpp"
#include "oracles.hpp"

using namespace gsna;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("suite degrees ignore self-loops") {
  GraphBuilder b(3);
  b.add_edge(0, 0, 50);  // cell whose users only follow each other
  b.add_edge(1, 2, 4);
  b.add_edge(2, 1, 6);
  const DirectedGraph g = b.build();

  const CentralityTable t = centrality_suite(g);
  CHECK(t.in_degree[0] == 0.0);
  CHECK(t.out_degree[0] == 0.0);
  CHECK(t.in_degree[1] == 1.0);
  CHECK(t.out_degree[1] == 1.0);

  const CentralityTable w = centrality_suite(g, true);
  CHECK(w.out_degree[0] == 0.0);
  CHECK(w.out_degree[1] == 4.0);
  CHECK(w.in_degree[1] == 6.0);
  CHECK(w.weighted_degrees);
}

TEST_CASE("fractional ranks average over ties") {
  const std::vector<double> v{3.0, 1.0, 4.0, 1.0, 5.0};
  const auto r = fractional_ranks(v);
  CHECK(r[1] == 1.5);
  CHECK(r[3] == 1.5);
  CHECK(r[0] == 3.0);
  CHECK(r[2] == 4.0);
  CHECK(r[4] == 5.0);
}

TEST_CASE("spearman agrees with rank-then-pearson, ties included") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 120; ++i) {
      // Coarse quantization forces plenty of ties.
      a.push_back(static_cast<double>(rng() % 12));
      b.push_back(static_cast<double>(rng() % 9) + (trial % 2 ? a.back() : 0.0));
    }
    const double want = oracle::spearman_reference(a, b);
    CHECK(spearman(a, b) == doctest::Approx(want).epsilon(1e-12));
  }
  const std::vector<double> up{1, 2, 3, 4, 5};
  const std::vector<double> down{9, 7, 5, 3, 1};
  CHECK(spearman(up, up) == doctest::Approx(1.0));
  CHECK(spearman(up, down) == doctest::Approx(-1.0));
  const std::vector<double> flat{2, 2, 2, 2, 2};
  CHECK_THROWS_AS((void)spearman(up, flat), std::invalid_argument);
}

TEST_CASE("spearman matrix has an exact unit diagonal and names bad columns") {
  CentralityTable t;
  std::mt19937_64 rng(53);
  for (int i = 0; i < 60; ++i) {
    t.in_degree.push_back(static_cast<double>(rng() % 20));
    t.out_degree.push_back(static_cast<double>(rng() % 20));
    t.closeness.push_back(uniform01(rng));
    t.betweenness.push_back(static_cast<double>(rng() % 8));
  }
  const SpearmanMatrix m = spearman_matrix(t);
  for (int i = 0; i < 4; ++i) {
    CHECK(m.coeff[i][i] == 1.0);  // exact, by construction
    for (int j = 0; j < 4; ++j) CHECK(m.coeff[i][j] == m.coeff[j][i]);
  }

  CentralityTable bad = t;
  bad.closeness.assign(bad.closeness.size(), 0.7);
  try {
    spearman_matrix(bad);
    FAIL("constant column must throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("closeness") != std::string::npos);
  }
}

TEST_CASE("bivariate classes split zero / below-median / rest") {
  const std::vector<double> v{0.0, 5.0, 1.0, 0.0, 2.0, 9.0};
  // Nonzero values 5,1,2,9; median (2+5)/2 = 3.5.
  const auto c = bivariate_classes(v);
  CHECK(c[0] == BivClass::Low);
  CHECK(c[3] == BivClass::Low);
  CHECK(c[2] == BivClass::Mid);
  CHECK(c[4] == BivClass::Mid);
  CHECK(c[1] == BivClass::High);
  CHECK(c[5] == BivClass::High);

  const std::vector<double> zeros{0.0, 0.0};
  const auto cz = bivariate_classes(zeros);
  CHECK(cz[0] == BivClass::Low);
  CHECK(cz[1] == BivClass::Low);

  // Odd count: median is the middle element and belongs to High.
  const std::vector<double> odd{3.0, 1.0, 2.0};
  const auto co = bivariate_classes(odd);
  CHECK(co[0] == BivClass::High);
  CHECK(co[1] == BivClass::Mid);
  CHECK(co[2] == BivClass::High);
}

namespace {

DirectedGraph two_cliques(std::size_t half, std::size_t bridges) {
  GraphBuilder b(2 * half);
  auto clique = [&](std::size_t base) {
    for (std::size_t i = 0; i < half; ++i)
      for (std::size_t j = 0; j < half; ++j)
        if (i != j) b.add_edge(static_cast<NodeId>(base + i), static_cast<NodeId>(base + j));
  };
  clique(0);
  clique(half);
  for (std::size_t k = 0; k < bridges; ++k)
    b.add_edge(static_cast<NodeId>(k % half), static_cast<NodeId>(half + (k % half)));
  return b.build();
}

}  // namespace

TEST_CASE("louvain: planted two-clique structure is recovered exactly") {
  const DirectedGraph g = two_cliques(6, 1);
  const CommunityResult got = louvain_communities(g, 42);
  REQUIRE(got.count == 2);
  for (std::size_t v = 0; v < 6; ++v) {
    CHECK(got.community[v] == got.community[0]);
    CHECK(got.community[6 + v] == got.community[6]);
  }
  CHECK(got.community[0] != got.community[6]);
  CHECK(got.sizes[0] == 6);
  CHECK(got.sizes[1] == 6);

  // The exhaustive optimum over all partitions is the same split, and the
  // reported modularity matches an independent recomputation.
  const oracle::BestPartition best = oracle::best_partition_reference(g);
  CHECK(oracle::adjusted_rand_index(best.assignment, got.community) == doctest::Approx(1.0));
  CHECK(got.modularity == doctest::Approx(best.modularity).epsilon(1e-12));
  CHECK(got.modularity ==
        doctest::Approx(oracle::modularity_reference(g, got.community)).epsilon(1e-12));
}

TEST_CASE("louvain never lands below the singleton partition") {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 15; ++trial) {
    const DirectedGraph g = oracle::random_digraph(20, 0.15, rng);
    if (g.edge_count() == 0) continue;
    const CommunityResult res = louvain_communities(g, 1000 + trial);
    std::vector<std::uint32_t> singleton(g.node_count());
    for (std::size_t v = 0; v < singleton.size(); ++v) singleton[v] = static_cast<std::uint32_t>(v);
    CHECK(res.modularity >= oracle::modularity_reference(g, singleton) - 1e-12);
    CHECK(res.modularity ==
          doctest::Approx(oracle::modularity_reference(g, res.community)).epsilon(1e-12));
  }
}

TEST_CASE("louvain is deterministic in the seed") {
  const DirectedGraph g = two_cliques(5, 2);
  const CommunityResult a = louvain_communities(g, 7);
  const CommunityResult b = louvain_communities(g, 7);
  CHECK(a.community == b.community);
  CHECK(a.modularity == b.modularity);
}

TEST_CASE("community ids rank by size") {
  // 4-clique plus a 2-cycle: ids must come out 1 (size 4) then 2 (size 2).
  GraphBuilder b(6);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) b.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
  b.add_edge(4, 5);
  b.add_edge(5, 4);
  const CommunityResult res = louvain_communities(b.build(), 3);
  REQUIRE(res.count == 2);
  CHECK(res.community[0] == 1);
  CHECK(res.community[4] == 2);
  CHECK(res.sizes == std::vector<std::size_t>{4, 2});
}

TEST_CASE("edgeless graphs get singleton communities and zero modularity") {
  GraphBuilder b(3);
  const CommunityResult res = louvain_communities(b.build(), 9);
  CHECK(res.count == 3);
  CHECK(res.modularity == 0.0);
}

TEST_CASE("community country mix rows sum to 100") {
  const DirectedGraph g = two_cliques(4, 1);
  const CommunityResult res = louvain_communities(g, 5);
  std::vector<std::string> countries = {"AT", "AT", "DE", "DE", "US", "US", "UK", "UK"};
  const auto mix = community_country_mix(res, countries);
  REQUIRE(mix.size() == res.count);
  for (const auto& row : mix) {
    double total = 0.0;
    for (const auto& [_, pct] : row) total += pct;
    CHECK(total == doctest::Approx(100.0).epsilon(1e-9));
  }
}

namespace {

std::vector<GeoPoint> random_centroids(std::size_t n, std::mt19937_64& rng) {
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(GeoPoint{35.0 + uniform01(rng) * 20.0, -5.0 + uniform01(rng) * 30.0});
  return pts;
}

}  // namespace

TEST_CASE("gi* matches the direct formula") {
  std::mt19937_64 rng(61);
  const std::size_t n = 100;
  const auto pts = random_centroids(n, rng);
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = haversine_km(pts[i], pts[j]);

  for (std::size_t k : {1ul, 8ul, 30ul, 99ul}) {
    if (k >= n) continue;
    std::vector<double> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(uniform01(rng) * 50.0);
    const HotspotResult got = getis_ord_gi_star(x, pts, k);
    const auto want = oracle::gi_star_reference(x, dist, k);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(got.z[i] == doctest::Approx(want.z[i]).epsilon(1e-9));
  }
}

TEST_CASE("gi* flags an obvious hot cluster") {
  std::mt19937_64 rng(67);
  std::vector<GeoPoint> pts;
  std::vector<double> x;
  // Background field of 10x10 cells valued ~1, one corner block boosted hard.
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) {
      pts.push_back(GeoPoint{40.0 + r * 0.5, 10.0 + c * 0.5});
      const bool hot = r < 3 && c < 3;
      x.push_back(hot ? 60.0 + uniform01(rng) : 1.0 + uniform01(rng));
    }
  const HotspotResult res = getis_ord_gi_star(x, pts, 8);
  CHECK(res.cls[0] == HotClass::Hot99);           // deep inside the block
  CHECK(res.cls[11] == HotClass::Hot99);
  CHECK(res.cls[99] != HotClass::Hot99);          // far corner stays cool
  CHECK(to_string(res.cls[0]) == "hot99");
}

TEST_CASE("gi* edge cases: constant fields, affine maps, bad k") {
  std::mt19937_64 rng(71);
  const auto pts = random_centroids(60, rng);

  std::vector<double> flat(60, 3.25);
  const HotspotResult fr = getis_ord_gi_star(flat, pts, 10);
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(fr.z[i] == 0.0);
    CHECK(fr.cls[i] == HotClass::NonSig);
  }

  // z is affine invariant: x -> a + b x with b > 0 keeps scores (binary
  // scale factors keep them bit-identical).
  std::vector<double> x, y;
  for (int i = 0; i < 60; ++i) x.push_back(uniform01(rng) * 9.0);
  for (double v : x) y.push_back(4.0 + v * 8.0);
  const HotspotResult zx = getis_ord_gi_star(x, pts, 12);
  const HotspotResult zy = getis_ord_gi_star(y, pts, 12);
  for (std::size_t i = 0; i < 60; ++i) CHECK(zy.z[i] == doctest::Approx(zx.z[i]).epsilon(1e-9));

  CHECK_THROWS_AS(getis_ord_gi_star(x, pts, 60), std::invalid_argument);
  CHECK_THROWS_AS(getis_ord_gi_star(x, pts, 0), std::invalid_argument);
  std::vector<double> two{1.0, 2.0};
  std::vector<GeoPoint> onept{GeoPoint{0, 0}};
  CHECK_THROWS_AS(getis_ord_gi_star(two, onept, 1), std::invalid_argument);
}

TEST_CASE("gi* admits every centroid tied with the k-th distance") {
  // A center cell with four equidistant neighbors: k = 2 must pull in all
  // four (plus self), never an arbitrary two.
  std::vector<GeoPoint> pts = {
      {0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {30.0, 30.0}, {30.0, 31.0}};
  std::vector<double> x = {10.0, 8.0, 8.0, 8.0, 8.0, 1.0, 1.0};
  const HotspotResult res = getis_ord_gi_star(x, pts, 2);

  // Independent recomputation with the full tie set.
  const std::size_t n = x.size();
  double mean = 0.0, sq = 0.0;
  for (double v : x) {
    mean += v;
    sq += v * v;
  }
  mean /= static_cast<double>(n);
  const double s = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  const double w = 5.0;  // self + four tied neighbors
  const double xsum = 10.0 + 8.0 * 4.0;
  const double inner = (static_cast<double>(n) * w - w * w) / static_cast<double>(n - 1);
  const double expect = (xsum - mean * w) / (s * std::sqrt(inner));
  CHECK(res.z[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_SUITE_END();
