#include "gsna/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "gsna/util.hpp"

namespace gsna {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, const char* what) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error(std::string("invalid number for ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  s = trim(s);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error(std::string("invalid count for ") + what + ": '" + std::string(s) + "'");
  return v;
}

// Reads logical lines, tolerating a trailing newline-free last line.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open file: " + path.string());
  }
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno_;
    return true;
  }
  std::size_t lineno() const { return lineno_; }
  std::string context() const { return path_.string() + ":" + std::to_string(lineno_); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  std::size_t lineno_ = 0;
};

void expect_header(LineReader& reader, std::string_view expected) {
  std::string line;
  if (!reader.next(line) || trim(line) != expected)
    throw std::runtime_error(reader.context() + ": expected header '" + std::string(expected) + "'");
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

CountPct make_count(std::uint64_t count, std::uint64_t base) {
  CountPct c;
  c.count = count;
  c.pct = base == 0 ? 0.0 : round2(100.0 * static_cast<double>(count) / static_cast<double>(base));
  return c;
}

}  // namespace

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::Point: return "point";
    case Precision::City: return "city";
    case Precision::Region: return "region";
    case Precision::Country: return "country";
    case Precision::Continent: return "continent";
  }
  return "unknown";
}

std::optional<Precision> parse_precision(std::string_view text) {
  const std::string key = Gazetteer::normalize_key(text);
  if (key == "point") return Precision::Point;
  if (key == "city") return Precision::City;
  if (key == "region") return Precision::Region;
  if (key == "country") return Precision::Country;
  if (key == "continent") return Precision::Continent;
  return std::nullopt;
}

std::string Gazetteer::normalize_key(std::string_view raw) {
  std::string_view t = trim(raw);
  std::string out;
  out.reserve(t.size());
  for (char c : t) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

void Gazetteer::insert(std::string_view location, const GeoPoint& point, Precision precision) {
  entries_[normalize_key(location)] = GeocodeResult{point, precision};
}

std::optional<GeocodeResult> Gazetteer::lookup(std::string_view location) const {
  auto it = entries_.find(normalize_key(location));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  Gazetteer gaz;
  LineReader reader(path);
  expect_header(reader, "location\tlat\tlon\tprecision");
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    std::string_view rest = line;
    std::array<std::string_view, 4> field;
    for (int i = 0; i < 3; ++i) {
      auto tab = rest.find('\t');
      if (tab == std::string_view::npos)
        throw std::runtime_error(reader.context() + ": expected 4 tab-separated fields");
      field[static_cast<std::size_t>(i)] = rest.substr(0, tab);
      rest.remove_prefix(tab + 1);
    }
    field[3] = rest;
    auto precision = parse_precision(field[3]);
    if (!precision)
      throw std::runtime_error(reader.context() + ": unknown precision '" + std::string(trim(field[3])) + "'");
    GeoPoint point;
    try {
      point = make_point(parse_double(field[1], "lat"), parse_double(field[2], "lon"));
    } catch (const std::exception& e) {
      throw std::runtime_error(reader.context() + ": " + e.what());
    }
    gaz.insert(field[0], point, *precision);
  }
  return gaz;
}

PopulationRaster::PopulationRaster(double cell_size_deg) : cell_size_deg_(cell_size_deg) {
  if (!(cell_size_deg > 0.0)) throw std::invalid_argument("raster cell size must be positive");
}

std::uint64_t PopulationRaster::key_for(double lat, double lon) const {
  const auto row = static_cast<std::int32_t>(std::floor(lat / cell_size_deg_));
  const auto col = static_cast<std::int32_t>(std::floor(lon / cell_size_deg_));
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(row)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(col));
}

void PopulationRaster::add(double lat, double lon, std::uint64_t count) {
  cells_[key_for(lat, lon)] += count;
}

std::uint64_t PopulationRaster::population_at(const GeoPoint& p) const {
  auto it = cells_.find(key_for(p.lat, p.lon));
  return it == cells_.end() ? 0 : it->second;
}

PopulationRaster PopulationRaster::load(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw std::runtime_error(path.string() + ": empty raster file");
  std::string_view head = trim(line);
  constexpr std::string_view kPrefix = "# cell_size_deg=";
  if (!head.starts_with(kPrefix))
    throw std::runtime_error(reader.context() + ": expected '" + std::string(kPrefix) + "<size>'");
  PopulationRaster raster(parse_double(head.substr(kPrefix.size()), "cell_size_deg"));
  expect_header(reader, "lat,lon,count");
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    std::string_view rest = line;
    auto c1 = rest.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : rest.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos || rest.find(',', c2 + 1) != std::string_view::npos)
      throw std::runtime_error(reader.context() + ": expected 'lat,lon,count'");
    const double lat = parse_double(rest.substr(0, c1), "lat");
    const double lon = parse_double(rest.substr(c1 + 1, c2 - c1 - 1), "lon");
    raster.add(lat, lon, parse_u64(rest.substr(c2 + 1), "count"));
  }
  return raster;
}

std::vector<RawUserRecord> load_users(const std::filesystem::path& path) {
  LineReader reader(path);
  expect_header(reader, "user_id,location");
  std::vector<RawUserRecord> users;
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(reader.context() + ": expected 'user_id,location'");
    std::string_view id = trim(std::string_view(line).substr(0, comma));
    if (id.empty()) throw std::runtime_error(reader.context() + ": empty user_id");
    std::string_view loc = trim(std::string_view(line).substr(comma + 1));
    RawUserRecord rec;
    rec.user_id = std::string(id);
    if (!loc.empty()) {
      std::string value;
      if (loc.size() >= 2 && loc.front() == '"' && loc.back() == '"') {
        loc = loc.substr(1, loc.size() - 2);
        for (std::size_t i = 0; i < loc.size(); ++i) {
          if (loc[i] == '"' && i + 1 < loc.size() && loc[i + 1] == '"') ++i;
          value.push_back(loc[i]);
        }
      } else {
        value = std::string(loc);
      }
      if (!value.empty()) rec.location = std::move(value);
    }
    users.push_back(std::move(rec));
  }
  return users;
}

std::vector<EdgeRecord> load_edges(const std::filesystem::path& path) {
  LineReader reader(path);
  expect_header(reader, "src,dst");
  std::vector<EdgeRecord> edges;
  std::unordered_set<std::string> seen;
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw std::runtime_error(reader.context() + ": expected 'src,dst'");
    std::string src(trim(std::string_view(line).substr(0, comma)));
    std::string dst(trim(std::string_view(line).substr(comma + 1)));
    if (src.empty() || dst.empty())
      throw std::runtime_error(reader.context() + ": empty endpoint id");
    std::string key = src + '\t' + dst;
    if (!seen.insert(std::move(key)).second) continue;
    edges.emplace_back(std::move(src), std::move(dst));
  }
  return edges;
}

IngestResult filter_and_build(std::span<const RawUserRecord> users,
                              std::span<const EdgeRecord> edges, const Gazetteer& gazetteer,
                              const PopulationRaster& population) {
  IngestResult result;
  IngestStats& st = result.stats;
  UserNetwork& net = result.network;

  std::unordered_set<std::string> geocoded_users;
  std::set<std::string> locations_seen;      // normalized strings of located users
  std::set<std::string> locations_geocoded;  // subset with a gazetteer hit

  std::uint64_t with_location = 0, geocoded = 0;
  for (const RawUserRecord& u : users) {
    if (!u.location) continue;
    ++with_location;
    const std::string norm = Gazetteer::normalize_key(*u.location);
    locations_seen.insert(norm);
    auto hit = gazetteer.lookup(*u.location);
    if (!hit) continue;
    ++geocoded;
    locations_geocoded.insert(norm);
    geocoded_users.insert(u.user_id);
    if (hit->precision == Precision::Country || hit->precision == Precision::Continent) continue;
    if (population.population_at(hit->point) == 0) continue;
    if (net.index.contains(u.user_id))
      throw std::runtime_error("duplicate user_id: " + u.user_id);
    net.index.emplace(u.user_id, static_cast<NodeId>(net.user_ids.size()));
    net.user_ids.push_back(u.user_id);
    net.points.push_back(hit->point);
  }

  GraphBuilder builder(net.user_ids.size());
  std::uint64_t edges_geocoded = 0, edges_kept = 0;
  for (const auto& [src, dst] : edges) {
    if (geocoded_users.contains(src) && geocoded_users.contains(dst)) ++edges_geocoded;
    auto si = net.index.find(src);
    auto di = net.index.find(dst);
    if (si == net.index.end() || di == net.index.end()) continue;
    ++edges_kept;
    builder.add_edge(si->second, di->second);
  }
  net.graph = builder.build();

  const std::uint64_t users_total = users.size();
  const std::uint64_t edges_total = edges.size();
  const std::uint64_t locs_total = locations_seen.size();
  st.users_total = make_count(users_total, users_total);
  st.users_with_location = make_count(with_location, users_total);
  st.users_geocoded = make_count(geocoded, users_total);
  st.users_after_filters = make_count(net.user_ids.size(), users_total);
  st.edges_total = make_count(edges_total, edges_total);
  st.edges_geocoded = make_count(edges_geocoded, edges_total);
  st.edges_after_filters = make_count(edges_kept, edges_total);
  st.locations_total = make_count(locs_total, locs_total);
  st.locations_geocoded = make_count(locations_geocoded.size(), locs_total);
  return result;
}

void write_user_network(const UserNetwork& net, const std::filesystem::path& users_csv,
                        const std::filesystem::path& edges_csv) {
  std::ofstream uf(users_csv, std::ios::binary);
  if (!uf) throw std::runtime_error("cannot write " + users_csv.string());
  uf << "user_id,lat,lon\n";
  for (std::size_t i = 0; i < net.user_ids.size(); ++i)
    uf << net.user_ids[i] << ',' << format_double(net.points[i].lat) << ','
       << format_double(net.points[i].lon) << '\n';

  std::ofstream ef(edges_csv, std::ios::binary);
  if (!ef) throw std::runtime_error("cannot write " + edges_csv.string());
  ef << "src,dst\n";
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t) {
    ef << net.user_ids[s] << ',' << net.user_ids[t] << '\n';
  });
}

UserNetwork read_user_network(const std::filesystem::path& users_csv,
                              const std::filesystem::path& edges_csv) {
  UserNetwork net;
  {
    LineReader reader(users_csv);
    expect_header(reader, "user_id,lat,lon");
    std::string line;
    while (reader.next(line)) {
      if (trim(line).empty()) continue;
      std::string_view rest = line;
      auto c1 = rest.find(',');
      auto c2 = c1 == std::string_view::npos ? c1 : rest.find(',', c1 + 1);
      if (c1 == std::string_view::npos || c2 == std::string_view::npos)
        throw std::runtime_error(reader.context() + ": expected 'user_id,lat,lon'");
      std::string id(trim(rest.substr(0, c1)));
      const double lat = parse_double(rest.substr(c1 + 1, c2 - c1 - 1), "lat");
      const double lon = parse_double(rest.substr(c2 + 1), "lon");
      if (net.index.contains(id)) throw std::runtime_error(reader.context() + ": duplicate user_id");
      net.index.emplace(id, static_cast<NodeId>(net.user_ids.size()));
      net.user_ids.push_back(std::move(id));
      net.points.push_back(make_point(lat, lon));
    }
  }
  GraphBuilder builder(net.user_ids.size());
  {
    LineReader reader(edges_csv);
    expect_header(reader, "src,dst");
    std::string line;
    while (reader.next(line)) {
      if (trim(line).empty()) continue;
      auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error(reader.context() + ": expected 'src,dst'");
      auto si = net.index.find(std::string(trim(std::string_view(line).substr(0, comma))));
      auto di = net.index.find(std::string(trim(std::string_view(line).substr(comma + 1))));
      if (si == net.index.end() || di == net.index.end())
        throw std::runtime_error(reader.context() + ": edge references unknown user");
      builder.add_edge(si->second, di->second);
    }
  }
  net.graph = builder.build();
  return net;
}

}  // namespace gsna
