#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsna/geo.hpp"
#include "gsna/graph.hpp"
#include "gsna/ingest.hpp"

namespace gsna {

inline constexpr std::string_view kUnassignedCode = "unassigned";

// Spatially aggregated network. Nodes are hex cells or countries in a fixed
// canonical order (ascending (row, col) / code), so equal inputs serialize to
// equal bytes no matter how they were assembled. Node weights count users,
// edge weights count follower pairs; self-loops carry the within-unit pairs.
struct CellNetwork {
  enum class Kind : std::uint8_t { Hex = 0, Country = 1 };

  Kind kind = Kind::Hex;
  double cell_area_km2 = 0.0;          // Kind::Hex only
  DirectedGraph graph;
  std::vector<CellId> cells;           // Kind::Hex: node id -> cell
  std::vector<std::string> codes;      // Kind::Country: node id -> code

  std::size_t size() const { return graph.node_count(); }
  std::string unit_name(NodeId v) const;           // "row:col" or country code
  GeoPoint unit_centroid(NodeId v, const HexGrid& grid) const;
};

CellNetwork aggregate_to_grid(const UserNetwork& net, const HexGrid& grid);

// Country outlines with per-country population, loaded from a GeoJSON
// FeatureCollection of Polygon/MultiPolygon features carrying "code" and
// "population" properties.
class CountryPolygons {
 public:
  using Ring = std::vector<GeoPoint>;  // closed, first == last

  static CountryPolygons load(const std::filesystem::path& geojson);

  void add_country(const std::string& code, double population, std::vector<Ring> rings);

  // Even-odd rule over all rings of a country; boundary points count as
  // inside. Countries are tested in code order, first hit wins.
  std::optional<std::string> country_for(const GeoPoint& p) const;

  const std::map<std::string, double>& populations() const { return populations_; }
  std::size_t size() const { return order_.size(); }

 private:
  struct Entry {
    std::string code;
    std::vector<Ring> rings;
  };
  std::vector<Entry> order_;  // sorted by code
  std::map<std::string, double> populations_;
};

// Users whose point falls in no polygon land in an "unassigned" node, kept so
// that user and edge totals are conserved.
CellNetwork aggregate_to_countries(const UserNetwork& net, const CountryPolygons& countries);

// Users inside the box (inclusive bounds), edges with both endpoints kept.
UserNetwork subnetwork_by_bbox(const UserNetwork& net, const BoundingBox& box);

struct Flow {
  std::string src;
  std::string dst;
  std::uint64_t weight = 0;
  double pct = 0.0;
};

// All inter-unit flows sorted by weight descending (ties by src, dst), with
// pct relative to the total edge weight of the network. Flows touching the
// unassigned bucket are skipped. k == 0 means all.
std::vector<Flow> top_flows(const CellNetwork& net, std::size_t k);

// Destination mix of one origin's out-edges, self-loop included, as
// percentages of the origin's total out-weight. When `normalize_by_population`
// is set, weights are divided by the destination population first; a missing
// or zero population raises an error naming the country.
std::vector<Flow> outflow_table(const CellNetwork& net, const std::string& origin,
                                const std::map<std::string, double>& populations,
                                bool normalize_by_population);

}  // namespace gsna
