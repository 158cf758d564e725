#include "gsna/aggregate.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gsna/util.hpp"

namespace gsna {

std::string CellNetwork::unit_name(NodeId v) const {
  if (kind == Kind::Country) return codes.at(v);
  const CellId& c = cells.at(v);
  return std::to_string(c.row) + ":" + std::to_string(c.col);
}

GeoPoint CellNetwork::unit_centroid(NodeId v, const HexGrid& grid) const {
  if (kind != Kind::Hex) throw std::logic_error("centroid lookup needs a hex network");
  return grid.cell_centroid(cells.at(v));
}

namespace {

// Shared by both aggregations: map each user to a unit index, then collapse.
CellNetwork collapse(const UserNetwork& net, const std::vector<NodeId>& unit_of,
                     std::size_t unit_count) {
  GraphBuilder builder(unit_count, 0);
  std::vector<std::uint64_t> users_per_unit(unit_count, 0);
  for (NodeId u : unit_of) ++users_per_unit[u];
  for (NodeId v = 0; v < unit_count; ++v) builder.set_node_weight(v, users_per_unit[v]);
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t w) {
    builder.add_edge(unit_of[s], unit_of[t], w);
  });
  CellNetwork out;
  out.graph = builder.build();
  return out;
}

}  // namespace

CellNetwork aggregate_to_grid(const UserNetwork& net, const HexGrid& grid) {
  const std::size_t n = net.points.size();
  std::vector<CellId> point_cell(n);
  for (std::size_t i = 0; i < n; ++i) point_cell[i] = grid.cell_for_point(net.points[i]);

  std::vector<CellId> cells(point_cell);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::vector<NodeId> unit_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(cells.begin(), cells.end(), point_cell[i]);
    unit_of[i] = static_cast<NodeId>(it - cells.begin());
  }

  CellNetwork out = collapse(net, unit_of, cells.size());
  out.kind = CellNetwork::Kind::Hex;
  out.cell_area_km2 = grid.cell_area_km2();
  out.cells = std::move(cells);
  return out;
}

void CountryPolygons::add_country(const std::string& code, double population,
                                  std::vector<Ring> rings) {
  if (populations_.contains(code)) throw std::runtime_error("duplicate country code: " + code);
  for (const Ring& r : rings) {
    if (r.size() < 4 || !(r.front() == r.back()))
      throw std::runtime_error("country " + code + ": rings must be closed with >= 4 points");
  }
  populations_[code] = population;
  Entry e{code, std::move(rings)};
  auto pos = std::lower_bound(order_.begin(), order_.end(), code,
                              [](const Entry& a, const std::string& c) { return a.code < c; });
  order_.insert(pos, std::move(e));
}

namespace {

bool on_segment(double px, double py, double x1, double y1, double x2, double y2) {
  const double cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
  if (cross != 0.0) return false;
  return px >= std::min(x1, x2) && px <= std::max(x1, x2) && py >= std::min(y1, y2) &&
         py <= std::max(y1, y2);
}

}  // namespace

std::optional<std::string> CountryPolygons::country_for(const GeoPoint& p) const {
  const double px = p.lon;
  const double py = p.lat;
  for (const Entry& entry : order_) {
    bool inside = false;
    bool boundary = false;
    for (const Ring& ring : entry.rings) {
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double x1 = ring[i].lon, y1 = ring[i].lat;
        const double x2 = ring[i + 1].lon, y2 = ring[i + 1].lat;
        if (on_segment(px, py, x1, y1, x2, y2)) {
          boundary = true;
          break;
        }
        if ((y1 > py) != (y2 > py)) {
          const double xint = x1 + (py - y1) / (y2 - y1) * (x2 - x1);
          if (px < xint) inside = !inside;
        }
      }
      if (boundary) break;
    }
    if (boundary || inside) return entry.code;
  }
  return std::nullopt;
}

CountryPolygons CountryPolygons::load(const std::filesystem::path& geojson) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(geojson));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(geojson.string() + ": invalid JSON: " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection")
    throw std::runtime_error(geojson.string() + ": expected a FeatureCollection");

  auto parse_ring = [&](const nlohmann::json& arr) {
    Ring ring;
    for (const auto& pos : arr) {
      if (!pos.is_array() || pos.size() < 2)
        throw std::runtime_error(geojson.string() + ": positions must be [lon, lat]");
      ring.push_back(make_point(pos[1].get<double>(), pos[0].get<double>()));
    }
    return ring;
  };

  CountryPolygons out;
  for (const auto& feature : doc.at("features")) {
    const auto& props = feature.at("properties");
    if (!props.contains("code"))
      throw std::runtime_error(geojson.string() + ": feature without 'code' property");
    const std::string code = props.at("code").get<std::string>();
    const double population = props.value("population", 0.0);
    const auto& geom = feature.at("geometry");
    const std::string type = geom.value("type", "");
    std::vector<Ring> rings;
    if (type == "Polygon") {
      for (const auto& r : geom.at("coordinates")) rings.push_back(parse_ring(r));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : geom.at("coordinates"))
        for (const auto& r : poly) rings.push_back(parse_ring(r));
    } else {
      throw std::runtime_error(geojson.string() + ": unsupported geometry '" + type + "' for " + code);
    }
    out.add_country(code, population, std::move(rings));
  }
  return out;
}

CellNetwork aggregate_to_countries(const UserNetwork& net, const CountryPolygons& countries) {
  const std::size_t n = net.points.size();
  std::vector<std::string> assigned(n);
  for (std::size_t i = 0; i < n; ++i)
    assigned[i] = countries.country_for(net.points[i]).value_or(std::string(kUnassignedCode));

  std::vector<std::string> codes(assigned);
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

  std::vector<NodeId> unit_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(codes.begin(), codes.end(), assigned[i]);
    unit_of[i] = static_cast<NodeId>(it - codes.begin());
  }

  CellNetwork out = collapse(net, unit_of, codes.size());
  out.kind = CellNetwork::Kind::Country;
  out.codes = std::move(codes);
  return out;
}

UserNetwork subnetwork_by_bbox(const UserNetwork& net, const BoundingBox& box) {
  UserNetwork sub;
  std::vector<NodeId> remap(net.user_ids.size(), static_cast<NodeId>(-1));
  for (std::size_t i = 0; i < net.user_ids.size(); ++i) {
    if (!box.contains(net.points[i])) continue;
    remap[i] = static_cast<NodeId>(sub.user_ids.size());
    sub.index.emplace(net.user_ids[i], remap[i]);
    sub.user_ids.push_back(net.user_ids[i]);
    sub.points.push_back(net.points[i]);
  }
  GraphBuilder builder(sub.user_ids.size());
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t w) {
    if (remap[s] == static_cast<NodeId>(-1) || remap[t] == static_cast<NodeId>(-1)) return;
    builder.add_edge(remap[s], remap[t], w);
  });
  sub.graph = builder.build();
  return sub;
}

std::vector<Flow> top_flows(const CellNetwork& net, std::size_t k) {
  std::vector<Flow> flows;
  const double total = static_cast<double>(net.graph.total_edge_weight());
  // Self-loops stay in: within-unit flows are part of the ranking.
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t w) {
    std::string src = net.unit_name(s);
    std::string dst = net.unit_name(t);
    if (src == kUnassignedCode || dst == kUnassignedCode) return;
    flows.push_back(Flow{std::move(src), std::move(dst), w,
                         total == 0.0 ? 0.0 : 100.0 * static_cast<double>(w) / total});
  });
  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });
  if (k > 0 && flows.size() > k) flows.resize(k);
  return flows;
}

std::vector<Flow> outflow_table(const CellNetwork& net, const std::string& origin,
                                const std::map<std::string, double>& populations,
                                bool normalize_by_population) {
  NodeId src = 0;
  bool found = false;
  for (NodeId v = 0; v < net.size(); ++v) {
    if (net.unit_name(v) == origin) {
      src = v;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("origin '" + origin + "' not present in the network");

  struct Row {
    std::string dst;
    std::uint64_t weight;
    double value;
  };
  std::vector<Row> rows;
  for (const OutEdge& e : net.graph.out_edges(src)) {
    std::string dst = net.unit_name(e.to);
    if (dst == kUnassignedCode) continue;
    double value = static_cast<double>(e.weight);
    if (normalize_by_population) {
      auto it = populations.find(dst);
      if (it == populations.end() || !(it->second > 0.0))
        throw std::runtime_error("no population for destination country '" + dst + "'");
      value /= it->second;
    }
    rows.push_back(Row{std::move(dst), e.weight, value});
  }
  double total = 0.0;
  for (const Row& r : rows) total += r.value;
  std::vector<Flow> flows;
  flows.reserve(rows.size());
  for (Row& r : rows)
    flows.push_back(Flow{origin, std::move(r.dst), r.weight,
                         total == 0.0 ? 0.0 : 100.0 * r.value / total});
  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    if (a.pct != b.pct) return a.pct > b.pct;
    return a.dst < b.dst;
  });
  return flows;
}

}  // namespace gsna
