#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsna/geo.hpp"
#include "gsna/graph.hpp"

namespace gsna {

enum class Precision { Point, City, Region, Country, Continent };

std::string_view to_string(Precision p);
std::optional<Precision> parse_precision(std::string_view text);

struct RawUserRecord {
  std::string user_id;
  std::optional<std::string> location;  // nullopt when the profile field is empty
};

struct GeocodeResult {
  GeoPoint point;
  Precision precision;
};

// Offline location-string lookup. Keys are matched after trimming and ASCII
// case folding; no fuzzy matching.
class Gazetteer {
 public:
  // TSV: location <TAB> lat <TAB> lon <TAB> precision, one header line.
  static Gazetteer load(const std::filesystem::path& path);

  void insert(std::string_view location, const GeoPoint& point, Precision precision);
  std::optional<GeocodeResult> lookup(std::string_view location) const;
  std::size_t size() const { return entries_.size(); }

  static std::string normalize_key(std::string_view raw);

 private:
  std::unordered_map<std::string, GeocodeResult> entries_;
};

// Sparse lat/lon raster of population counts. Points outside the stored
// coverage read as zero.
class PopulationRaster {
 public:
  PopulationRaster() = default;
  explicit PopulationRaster(double cell_size_deg);

  // Line 1: "# cell_size_deg=<s>", line 2 header "lat,lon,count", then rows
  // giving the south-west corner of each populated cell.
  static PopulationRaster load(const std::filesystem::path& path);

  double cell_size_deg() const { return cell_size_deg_; }
  void add(double lat, double lon, std::uint64_t count);
  std::uint64_t population_at(const GeoPoint& p) const;

 private:
  std::uint64_t key_for(double lat, double lon) const;
  double cell_size_deg_ = 1.0;
  std::unordered_map<std::uint64_t, std::uint64_t> cells_;
};

struct CountPct {
  std::uint64_t count = 0;
  double pct = 0.0;  // share of the category total, rounded to two decimals
};

// Mirrors the funnel accounting of the ingest filter chain.
struct IngestStats {
  CountPct users_total, users_with_location, users_geocoded, users_after_filters;
  CountPct edges_total, edges_geocoded, edges_after_filters;
  CountPct locations_total, locations_geocoded;
};

// Geocoded, filtered follower graph. Edge direction src -> dst means dst
// follows src, i.e. edges point along information flow.
struct UserNetwork {
  DirectedGraph graph;  // node weight 1 per user
  std::vector<std::string> user_ids;
  std::vector<GeoPoint> points;
  std::unordered_map<std::string, NodeId> index;
};

// users.csv: header "user_id,location"; the location field may be quoted and
// may contain commas. Empty location -> nullopt.
std::vector<RawUserRecord> load_users(const std::filesystem::path& path);

using EdgeRecord = std::pair<std::string, std::string>;  // (src, dst)

// edges.csv: header "src,dst". Duplicate pairs collapse to the first
// occurrence; order is otherwise preserved.
std::vector<EdgeRecord> load_edges(const std::filesystem::path& path);

struct IngestResult {
  UserNetwork network;
  IngestStats stats;
};

// Filter chain, applied in this order: missing location, geocode miss,
// precision coarser than region, zero population at the geocoded point.
// Edges survive when both endpoints do; edges_geocoded counts pairs where
// both endpoints pass the geocode stage (before precision/population).
IngestResult filter_and_build(std::span<const RawUserRecord> users,
                              std::span<const EdgeRecord> edges, const Gazetteer& gazetteer,
                              const PopulationRaster& population);

// Round-trippable network files: "user_id,lat,lon" and "src,dst".
void write_user_network(const UserNetwork& net, const std::filesystem::path& users_csv,
                        const std::filesystem::path& edges_csv);
UserNetwork read_user_network(const std::filesystem::path& users_csv,
                              const std::filesystem::path& edges_csv);

}  // namespace gsna
