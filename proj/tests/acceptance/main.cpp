// Acceptance gate: ten checks, one verdict line each, nonzero exit when any
// fails. Takes the bundled fixture directory as its only argument; everything
// else is generated on the fly under the system temp directory.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "gsna/aggregate.hpp"
#include "gsna/analysis.hpp"
#include "gsna/centrality.hpp"
#include "gsna/geo.hpp"
#include "gsna/graph.hpp"
#include "gsna/ingest.hpp"
#include "gsna/util.hpp"
#include "oracles.hpp"
#include "table1_fixture.hpp"

using namespace gsna;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path g_fixture;  // bundled 20k-user fixture directory (read-only)

fs::path scratch(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("gsna_accept_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cli_quiet(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gsna::cli::run(std::move(args), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::string read_file(const fs::path& p) { return read_text_file(p); }

struct Check {
  std::string detail;
  bool ok = true;

  // Records the first failure; later detail text still appends.
  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

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

// ---------------------------------------------------------------------------
// 1. Betweenness equals brute-force shortest-path enumeration exactly.
//    The production template runs on exact rationals so "exactly" means
//    symbolic equality, and the shipped double instantiation is held to 1e-9
//    against the same enumeration.

Check criterion_1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7001);
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const std::size_t n = 2 + rng() % 11;  // n <= 12
    const DirectedGraph g = oracle::random_digraph(n, 0.3, rng);
    const auto exact = betweenness_centrality_as<oracle::Rational>(g);
    const auto ref = oracle::betweenness_reference<oracle::Rational>(g);
    const auto shipped = betweenness_centrality(g);
    for (std::size_t v = 0; v < n; ++v) {
      c.require(exact[v] == ref[v], "rational mismatch, trial " + std::to_string(trial));
      const double refd = ref[v].numerator().convert_to<double>() /
                          ref[v].denominator().convert_to<double>();
      c.require(std::abs(shipped[v] - refd) <= 1e-9,
                "double drift, trial " + std::to_string(trial));
    }
  }
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 5.0, "too slow: " + format_double(elapsed) + " s");
  std::ostringstream d;
  d << "200 digraphs, exact rational equality, " << format_double(elapsed) << " s";
  c.note(d.str());
  return c;
}

// ---------------------------------------------------------------------------
// 2. Closeness matches an all-pairs BFS oracle within 1e-12 on the same
//    instance stream.

Check criterion_2() {
  Check c;
  std::mt19937_64 rng(7001);  // same stream as criterion 1
  double worst = 0.0;
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const DirectedGraph g = oracle::random_digraph(n, 0.3, rng);
    const auto got = closeness_centrality(g);
    const auto ref = oracle::closeness_reference(g);
    for (std::size_t v = 0; v < n; ++v) {
      worst = std::max(worst, std::abs(got[v] - ref[v]));
      c.require(std::abs(got[v] - ref[v]) <= 1e-12,
                "closeness off at trial " + std::to_string(trial) + ", node " +
                    std::to_string(v));
    }
  }
  c.note("200 digraphs, max |diff| = " + format_double(worst));
  return c;
}

// ---------------------------------------------------------------------------
// 3. Louvain: planted two-clique bipartition equals the exhaustive
//    max-modularity partition; on random instances Q >= singleton Q and the
//    returned Q matches an independent recomputation within 1e-12.

Check criterion_3() {
  Check c;
  const DirectedGraph planted = two_cliques(6, 1);
  const CommunityResult res = louvain_communities(planted, 1);
  const oracle::BestPartition best = oracle::best_partition_reference(planted);
  c.require(oracle::adjusted_rand_index(res.community, best.assignment) == 1.0,
            "planted bipartition missed");
  c.require(std::abs(res.modularity - best.modularity) <= 1e-12,
            "planted Q != exhaustive max Q");

  std::mt19937_64 rng(8101);
  for (int trial = 0; trial < 15 && c.ok; ++trial) {
    const std::size_t n = 5 + rng() % 36;
    GraphBuilder b(n);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) {
        if (s == t) continue;
        if ((rng() >> 11) * 0x1.0p-53 < 0.15)
          b.add_edge(static_cast<NodeId>(s), static_cast<NodeId>(t), 1 + rng() % 4);
      }
    const DirectedGraph g = b.build();
    if (g.edge_count() == 0) continue;
    const CommunityResult r = louvain_communities(g, 17 + static_cast<std::uint64_t>(trial));
    const double recomputed = oracle::modularity_reference(g, r.community);
    c.require(std::abs(r.modularity - recomputed) <= 1e-12,
              "reported Q drifts from recomputation, trial " + std::to_string(trial));
    std::vector<std::uint32_t> singletons(g.node_count());
    for (std::size_t v = 0; v < singletons.size(); ++v)
      singletons[v] = static_cast<std::uint32_t>(v);
    const double single_q = oracle::modularity_reference(g, singletons);
    c.require(recomputed >= single_q - 1e-12,
              "Q below singleton partition, trial " + std::to_string(trial));
  }
  c.note("bipartition == exhaustive optimum; 15 random instances recomputed");
  return c;
}

// ---------------------------------------------------------------------------
// 4. Getis-Ord Gi*: |z - oracle| <= 1e-9 on 100-cell fixtures; constant
//    fields come back all-nonsignificant; class labels are affine invariant.

Check criterion_4() {
  Check c;
  std::mt19937_64 rng(9202);
  auto random_centroids = [&](std::size_t n) {
    std::vector<GeoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(make_point(35.0 + (rng() >> 11) * 0x1.0p-53 * 20.0,
                               -10.0 + (rng() >> 11) * 0x1.0p-53 * 40.0));
    return pts;
  };

  double worst = 0.0;
  for (int trial = 0; trial < 10 && c.ok; ++trial) {
    const std::size_t n = 100;
    const auto pts = random_centroids(n);
    std::vector<double> x(n);
    for (double& v : x) v = (rng() >> 11) * 0x1.0p-53 * 50.0;
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dist[i][j] = haversine_km(pts[i], pts[j]);
    for (const std::size_t k : {std::size_t{5}, std::size_t{30}}) {
      const HotspotResult got = getis_ord_gi_star(x, pts, k);
      const oracle::GiStarReference ref = oracle::gi_star_reference(x, dist, k);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(got.z[i] - ref.z[i]));
        c.require(std::abs(got.z[i] - ref.z[i]) <= 1e-9,
                  "z drift at trial " + std::to_string(trial));
      }
    }
  }

  const auto pts = random_centroids(100);
  const std::vector<double> flat(100, 3.25);
  const HotspotResult fr = getis_ord_gi_star(flat, pts, 30);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    c.require(fr.cls[i] == HotClass::NonSig, "constant field not all-nonsig");
    c.require(fr.z[i] == 0.0, "constant field z != 0");
  }

  for (int trial = 0; trial < 50 && c.ok; ++trial) {
    const auto cpts = random_centroids(100);
    std::vector<double> x(100), y(100);
    const double a = 0.1 + (rng() >> 11) * 0x1.0p-53 * 9.9;
    const double b = -100.0 + (rng() >> 11) * 0x1.0p-53 * 200.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = (rng() >> 11) * 0x1.0p-53 * 10.0;
      y[i] = a * x[i] + b;
    }
    const HotspotResult hx = getis_ord_gi_star(x, cpts, 12);
    const HotspotResult hy = getis_ord_gi_star(y, cpts, 12);
    for (std::size_t i = 0; i < x.size(); ++i)
      c.require(hx.cls[i] == hy.cls[i], "affine transform moved a class");
  }
  c.note("max |z - oracle| = " + format_double(worst) +
         "; constant nonsig; 50 affine fields stable");
  return c;
}

// ---------------------------------------------------------------------------
// 5. Spearman equals the rank-then-Pearson oracle within 1e-12 with ties,
//    and self-correlation is exactly 1.

Check criterion_5() {
  Check c;
  std::mt19937_64 rng(10303);
  double worst = 0.0;
  for (int trial = 0; trial < 60 && c.ok; ++trial) {
    const std::size_t n = 2 + rng() % 150;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 7);  // heavy ties
      y[i] = static_cast<double>(rng() % 5);
    }
    bool xs = false, ys = false;  // skip degenerate constant draws
    for (std::size_t i = 1; i < n; ++i) {
      xs = xs || x[i] != x[0];
      ys = ys || y[i] != y[0];
    }
    if (!xs || !ys) continue;
    const double got = spearman(x, y);
    const double ref = oracle::spearman_reference(x, y);
    worst = std::max(worst, std::abs(got - ref));
    c.require(std::abs(got - ref) <= 1e-12, "trial " + std::to_string(trial));
    c.require(spearman(x, x) == 1.0, "self-correlation not exactly 1");
  }
  c.note("60 tied draws, max |diff| = " + format_double(worst) + ", self-corr == 1");
  return c;
}

// ---------------------------------------------------------------------------
// 6. Aggregation conserves users and edges exactly on the bundled fixture;
//    the full `report` pipeline finishes well inside 60 s.

Check criterion_6() {
  Check c;
  const auto users = load_users(g_fixture / "users.csv");
  const auto edges = load_edges(g_fixture / "edges.csv");
  const Gazetteer gaz = Gazetteer::load(g_fixture / "gazetteer.tsv");
  const PopulationRaster pop = PopulationRaster::load(g_fixture / "population.tsv");
  const IngestResult ing = filter_and_build(users, edges, gaz, pop);

  const std::uint64_t survivors = ing.network.user_ids.size();
  const std::uint64_t surviving_edges = ing.network.graph.edge_count();
  c.require(survivors >= 15000, "fixture unexpectedly small");

  const CellNetwork cells = aggregate_to_grid(ing.network, HexGrid(80000.0));
  c.require(cells.graph.total_node_weight() == survivors, "grid loses or invents users");
  c.require(cells.graph.total_edge_weight() == surviving_edges, "grid loses or invents edges");

  const CountryPolygons countries = CountryPolygons::load(g_fixture / "countries.geojson");
  const CellNetwork cnet = aggregate_to_countries(ing.network, countries);
  c.require(cnet.graph.total_node_weight() == survivors, "country map loses or invents users");
  c.require(cnet.graph.total_edge_weight() == surviving_edges,
            "country map loses or invents edges");

  const fs::path out = scratch("report");
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli_quiet(
      {"report", "--config", (g_fixture / "gsna.json").string(), "--out", out.string()});
  const double elapsed = seconds_since(t0);
  c.require(code == 0, "report exited " + std::to_string(code));
  c.require(elapsed < 60.0, "report took " + format_double(elapsed) + " s");
  std::ostringstream d;
  d << survivors << " users / " << surviving_edges << " edges conserved on both maps; report "
    << format_double(elapsed) << " s";
  c.note(d.str());
  return c;
}

// ---------------------------------------------------------------------------
// 7. Ingest accounting on the 1/1000-scale fixture reproduces the reference
//    funnel percentages to two decimals.

Check criterion_7() {
  Check c;
  const fs::path dir = scratch("table1");
  testfix::write_table1_fixture(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"users": "users.csv", "edges": "edges.csv",)"
        << R"( "gazetteer": "gazetteer.tsv", "population": "population.tsv"})";
  }
  const fs::path out = dir / "out";
  const int code = cli_quiet(
      {"ingest", "--config", (dir / "config.json").string(), "--out", out.string()});
  c.require(code == 0, "ingest exited " + std::to_string(code));
  if (!c.ok) return c;

  const json stats = json::parse(read_file(out / "stats.json"));
  const double located = stats.at("users").at("with_location").at("pct").get<double>();
  const double geocoded = stats.at("users").at("geocoded").at("pct").get<double>();
  // The reference table's edge row counts pairs between geocodable nodes.
  const double edges_kept = stats.at("edges").at("geocoded").at("pct").get<double>();
  c.require(located == 54.93, "located pct " + format_double(located));
  c.require(geocoded == 48.86, "geocodable pct " + format_double(geocoded));
  c.require(edges_kept == 27.34, "edges kept pct " + format_double(edges_kept));
  c.note("54.93 / 48.86 / 27.34 reproduced");
  return c;
}

// ---------------------------------------------------------------------------
// 8. Outflow tables: hand-computed raw and population-normalized shares on a
//    3-country fixture, plus invariance under uniform population rescaling.

Check criterion_8() {
  Check c;
  GraphBuilder b(3);
  b.set_node_weight(0, 30);  // AA
  b.set_node_weight(1, 20);  // BB
  b.set_node_weight(2, 10);  // CC
  b.add_edge(0, 0, 10);
  b.add_edge(0, 1, 6);
  b.add_edge(0, 2, 4);
  b.add_edge(1, 0, 3);
  CellNetwork net;
  net.kind = CellNetwork::Kind::Country;
  net.codes = {"AA", "BB", "CC"};
  net.graph = b.build();

  const std::map<std::string, double> pops = {{"AA", 2048.0}, {"BB", 1024.0}, {"CC", 512.0}};

  // Raw: AA's 20 outgoing pairs split 10/6/4 -> 50%, 30%, 20%.
  const auto raw = outflow_table(net, "AA", pops, false);
  c.require(raw.size() == 3, "raw row count");
  if (c.ok) {
    c.require(raw[0].dst == "AA" && raw[0].weight == 10 && raw[0].pct == 50.0, "raw AA row");
    c.require(raw[1].dst == "BB" && raw[1].weight == 6 && raw[1].pct == 30.0, "raw BB row");
    c.require(raw[2].dst == "CC" && raw[2].weight == 4 && raw[2].pct == 20.0, "raw CC row");
  }

  // Normalized: per-capita weights 10/2048, 6/1024, 4/512 are exact binary
  // fractions (10:12:16 over 2048), so the shares below are the same doubles
  // the library must produce.
  const auto norm = outflow_table(net, "AA", pops, true);
  const double total = 38.0 / 2048.0;
  c.require(norm.size() == 3, "normalized row count");
  if (c.ok) {
    c.require(norm[0].dst == "CC" && norm[0].pct == 100.0 * (16.0 / 2048.0) / total,
              "normalized CC share");
    c.require(norm[1].dst == "BB" && norm[1].pct == 100.0 * (12.0 / 2048.0) / total,
              "normalized BB share");
    c.require(norm[2].dst == "AA" && norm[2].pct == 100.0 * (10.0 / 2048.0) / total,
              "normalized AA share");
  }

  // Scaling every population by 4 shifts exponents only: identical doubles.
  std::map<std::string, double> scaled4 = pops;
  for (auto& [_, p] : scaled4) p *= 4.0;
  const auto norm4 = outflow_table(net, "AA", scaled4, true);
  for (std::size_t i = 0; c.ok && i < norm.size(); ++i)
    c.require(norm4[i].dst == norm[i].dst && norm4[i].pct == norm[i].pct,
              "x4 rescale changed shares");

  // A non-dyadic factor must still agree to rounding error.
  std::map<std::string, double> scaled3 = pops;
  for (auto& [_, p] : scaled3) p *= 3.0;
  const auto norm3 = outflow_table(net, "AA", scaled3, true);
  for (std::size_t i = 0; c.ok && i < norm.size(); ++i)
    c.require(norm3[i].dst == norm[i].dst && std::abs(norm3[i].pct - norm[i].pct) <= 1e-12,
              "x3 rescale drifted");

  // Missing population must be a hard, named error.
  std::map<std::string, double> partial = pops;
  partial.erase("CC");
  bool threw = false;
  try {
    outflow_table(net, "AA", partial, true);
  } catch (const std::exception& e) {
    threw = std::string(e.what()).find("CC") != std::string::npos;
  }
  c.require(threw, "missing population not rejected by name");
  c.note("raw 50/30/20, per-capita reorder CC>BB>AA, rescale invariant");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Calibrated qualitative reproduction on the bundled fixture: FD histogram
//    shape, within-nation share, and community/language alignment.

Check criterion_9() {
  Check c;
  const json cfg = json::parse(read_file(g_fixture / "gsna.json"));
  const double grid_area = cfg.at("grid_area_km2").get<double>();
  const std::uint64_t seed = cfg.at("louvain_seed").get<std::uint64_t>();

  const auto users = load_users(g_fixture / "users.csv");
  const auto edges = load_edges(g_fixture / "edges.csv");
  const Gazetteer gaz = Gazetteer::load(g_fixture / "gazetteer.tsv");
  const PopulationRaster pop = PopulationRaster::load(g_fixture / "population.tsv");
  const IngestResult ing = filter_and_build(users, edges, gaz, pop);

  // (a) Edge-length histogram: right-skewed with an intra-continental peak.
  std::vector<double> lengths;
  lengths.reserve(ing.network.graph.edge_count());
  ing.network.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t) {
    lengths.push_back(haversine_km(ing.network.points[s], ing.network.points[t]));
  });
  const Histogram h = fd_histogram(lengths);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < h.share.size(); ++i)
    if (h.share[i] > h.share[peak]) peak = i;
  const double peak_mid = h.origin + (static_cast<double>(peak) + 0.5) * h.bin_width;
  c.require(peak_mid < 2000.0, "peak at " + format_double(peak_mid) + " km");

  std::vector<double> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  double mean = 0.0;
  for (double v : lengths) mean += v;
  mean /= static_cast<double>(lengths.size());
  c.require(mean > median, "not right-skewed: mean <= median");
  double far_share = 0.0;
  for (double v : lengths)
    if (v >= 5000.0) far_share += 1.0;
  far_share /= static_cast<double>(lengths.size());
  c.require(far_share > 0.01, "no trans-continental tail");

  // (b) Within-nation share of edges, on the country aggregation.
  const CountryPolygons countries = CountryPolygons::load(g_fixture / "countries.geojson");
  const CellNetwork cnet = aggregate_to_countries(ing.network, countries);
  std::uint64_t within = 0;
  cnet.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t w) {
    if (s == t && cnet.unit_name(s) != kUnassignedCode) within += w;
  });
  const double within_pct = 100.0 * static_cast<double>(within) /
                            static_cast<double>(cnet.graph.total_edge_weight());
  c.require(within_pct >= 39.0 && within_pct <= 49.0,
            "within-nation share " + format_double(within_pct) + "%");

  // (c) Louvain on the grid versus the planted language groups.
  const CellNetwork cells = aggregate_to_grid(ing.network, HexGrid(grid_area));
  const CommunityResult comm = louvain_communities(cells, seed);

  const json truth = json::parse(read_file(g_fixture / "ground_truth.json"));
  std::map<std::string, std::uint32_t> lang_id;
  std::map<std::string, std::string> region_lang;
  for (const auto& [rid, r] : truth.at("regions").items()) {
    const std::string lang = r.at("language_group").get<std::string>();
    region_lang[rid] = lang;
    lang_id.emplace(lang, static_cast<std::uint32_t>(lang_id.size()));
  }
  const HexGrid grid(grid_area);
  std::map<CellId, std::map<std::uint32_t, std::size_t>> votes;
  const json& users_truth = truth.at("users");
  for (std::size_t i = 0; i < ing.network.user_ids.size(); ++i) {
    const std::string& region =
        users_truth.at(ing.network.user_ids[i]).at("region").get_ref<const std::string&>();
    const CellId cell = grid.cell_for_point(ing.network.points[i]);
    ++votes[cell][lang_id.at(region_lang.at(region))];
  }
  std::vector<std::uint32_t> planted(cells.size(), 0);
  for (NodeId v = 0; v < cells.size(); ++v) {
    const auto& tally = votes.at(cells.cells[v]);
    std::uint32_t best = 0;
    std::size_t best_n = 0;
    for (const auto& [lang, count] : tally)
      if (count > best_n) {
        best_n = count;
        best = lang;
      }
    planted[v] = best;
  }
  const double ari = oracle::adjusted_rand_index(comm.community, planted);
  c.require(ari >= 0.8, "ARI " + format_double(ari));

  std::ostringstream d;
  d << "peak bin " << format_double(peak_mid) << " km, within-nation "
    << format_double(within_pct) << "%, ARI " << format_double(ari);
  c.note(d.str());
  return c;
}

// ---------------------------------------------------------------------------
// 10. Rerunning every subcommand, at different --threads, yields
//     byte-identical artifacts.

Check criterion_10() {
  Check c;
  const std::string cfg = (g_fixture / "gsna.json").string();
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::vector<std::vector<std::string>> stages = {
      {"synth"},
      {"ingest"},
      {"aggregate", "--grid"},
      {"aggregate", "--countries"},
      {"subnet"},
      {"centrality"},
      {"spearman"},
      {"bivariate"},
      {"communities"},
      {"hotspots"},
      {"flows"},
      {"histogram"},
      {"report"},
  };
  for (const auto& [dir, threads] : {std::pair{a, "1"}, std::pair{b, "3"}}) {
    for (std::vector<std::string> args : stages) {
      const std::string name = args[0];
      args.insert(args.end(), {"--config", cfg, "--out", dir.string(), "--threads", threads});
      const int code = cli_quiet(std::move(args));
      c.require(code == 0, name + " exited " + std::to_string(code));
      if (!c.ok) return c;
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    const fs::path twin = b / rel;
    c.require(fs::exists(twin), rel.generic_string() + " missing from rerun");
    if (!c.ok) return c;
    c.require(read_file(entry.path()) == read_file(twin), rel.generic_string() + " differs");
    ++compared;
  }
  c.require(compared >= 20, "artifact sweep too small");
  c.note(std::to_string(compared) + " artifacts byte-identical at --threads 1 vs 3");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gsna_acceptance <fixture-dir>\n";
    return 2;
  }
  g_fixture = argv[1];
  if (!fs::exists(g_fixture / "gsna.json")) {
    std::cerr << "fixture dir lacks gsna.json: " << g_fixture << "\n";
    return 2;
  }

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"betweenness equals exhaustive enumeration", criterion_1},
      {"closeness matches all-pairs BFS oracle", criterion_2},
      {"louvain recovers planted partition, Q verified", criterion_3},
      {"gi* matches oracle, nonsig + affine invariants", criterion_4},
      {"spearman matches rank-then-pearson with ties", criterion_5},
      {"aggregation conserves mass, report under budget", criterion_6},
      {"ingest funnel reproduces reference percentages", criterion_7},
      {"outflow tables match hand computation", criterion_8},
      {"calibrated fixture reproduces qualitative results", criterion_9},
      {"artifacts byte-stable across reruns and threads", criterion_10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += c.ok ? 0 : 1;
    std::cout << (c.ok ? "PASS" : "FAIL") << "  " << std::setw(2) << i + 1 << ". "
              << criteria[i].first << " — " << c.detail << "\n";
  }
  if (failures != 0) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
