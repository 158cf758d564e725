#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gsna/aggregate.hpp"
#include "gsna/analysis.hpp"
#include "gsna/cellnet_io.hpp"
#include "gsna/geo.hpp"
#include "gsna/ingest.hpp"
#include "gsna/synth.hpp"
#include "gsna/util.hpp"

namespace gsna::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

// Bad config / flags / missing inputs; anything else that throws mid-run is a
// runtime error (exit 1).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string usage() {
  return
      "usage: gsna <subcommand> [options]\n"
      "\n"
      "subcommands:\n"
      "  synth        generate a synthetic follower network\n"
      "  ingest       geocode + filter raw users/edges, emit funnel stats\n"
      "  aggregate    collapse the user network onto hex cells or countries\n"
      "  subnet       clip the user network to a bounding box\n"
      "  centrality   degree / closeness / betweenness per spatial unit\n"
      "  spearman     rank correlation matrix of the centrality columns\n"
      "  bivariate    3x3 two-metric classification as GeoJSON\n"
      "  communities  Louvain community per spatial unit\n"
      "  hotspots     Getis-Ord Gi* hot/cold classes as GeoJSON\n"
      "  flows        ranked unit-to-unit flow table + chord matrix\n"
      "  histogram    Freedman-Diaconis edge length distribution\n"
      "  report       full pipeline, bundled into one JSON\n"
      "\n"
      "common options: --config FILE, --out DIR, --threads N, --manifest\n"
      "'gsna <subcommand> --help' lists the per-subcommand options.\n";
}

std::string hex16(std::uint64_t v) {
  char buf[17] = {};
  const auto res = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string fmt(double v) { return format_double(v); }

void write_file(const fs::path& path, std::string_view content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("short write on " + path.string());
}

// ---------------------------------------------------------------------------
// pipeline config

struct PipelineConfig {
  fs::path users, edges, gazetteer, population, countries, synth;
  fs::path out_dir = "out";
  double grid_area_km2 = 80000.0;
  double aoi_grid_area_km2 = 100.0;
  BoundingBox aoi_bbox = kEuropeBBox;
  std::uint64_t gi_k = 30;
  std::uint64_t louvain_seed = 1;
  std::uint64_t top_flows = 15;
  bool weighted_degrees = false;
  unsigned threads = 0;
};

void validate_numbers(const PipelineConfig& cfg) {
  if (!(cfg.grid_area_km2 > 0.0) || !(cfg.aoi_grid_area_km2 > 0.0))
    throw ValidationError("grid areas must be positive");
  if (cfg.gi_k < 1) throw ValidationError("gi_k must be at least 1");
  if (cfg.top_flows < 1) throw ValidationError("top_flows must be at least 1");
  if (cfg.aoi_bbox.lat_min > cfg.aoi_bbox.lat_max ||
      cfg.aoi_bbox.lon_min > cfg.aoi_bbox.lon_max ||
      std::abs(cfg.aoi_bbox.lat_min) > 90.0 || std::abs(cfg.aoi_bbox.lat_max) > 90.0)
    throw ValidationError("aoi_bbox must satisfy min <= max with latitudes in [-90, 90]");
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("config file not found: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  PipelineConfig cfg;
  const fs::path base = path.parent_path();
  auto path_of = [&](const char* key) -> fs::path {
    if (!doc.contains(key)) return {};
    fs::path p = doc.at(key).get<std::string>();
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;  // relative paths hang off the config file
  };
  try {
    cfg.users = path_of("users");
    cfg.edges = path_of("edges");
    cfg.gazetteer = path_of("gazetteer");
    cfg.population = path_of("population");
    cfg.countries = path_of("countries");
    cfg.synth = path_of("synth");
    if (doc.contains("out_dir")) cfg.out_dir = path_of("out_dir");
    cfg.grid_area_km2 = doc.value("grid_area_km2", cfg.grid_area_km2);
    cfg.aoi_grid_area_km2 = doc.value("aoi_grid_area_km2", cfg.aoi_grid_area_km2);
    if (doc.contains("aoi_bbox")) {
      const auto& b = doc.at("aoi_bbox");
      if (!b.is_array() || b.size() != 4)
        throw ValidationError("aoi_bbox must be [lat_min, lat_max, lon_min, lon_max]");
      cfg.aoi_bbox = BoundingBox{b.at(0).get<double>(), b.at(1).get<double>(),
                                 b.at(2).get<double>(), b.at(3).get<double>()};
    }
    cfg.gi_k = doc.value("gi_k", cfg.gi_k);
    cfg.louvain_seed = doc.value("louvain_seed", cfg.louvain_seed);
    cfg.top_flows = doc.value("top_flows", cfg.top_flows);
    cfg.weighted_degrees = doc.value("weighted_degrees", cfg.weighted_degrees);
    cfg.threads = doc.value("threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  validate_numbers(cfg);
  return cfg;
}

BoundingBox parse_bbox(const std::string& text) {
  std::array<double, 4> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t comma = text.find(',', pos);
    const std::string part =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      v[static_cast<std::size_t>(i)] = std::stod(part);
    } catch (const std::exception&) {
      throw ValidationError("bad bbox '" + text + "', expected lat_min,lat_max,lon_min,lon_max");
    }
    if (i < 3) {
      if (comma == std::string::npos)
        throw ValidationError("bad bbox '" + text + "', expected 4 comma-separated numbers");
      pos = comma + 1;
    } else if (comma != std::string::npos) {
      throw ValidationError("bad bbox '" + text + "', expected 4 comma-separated numbers");
    }
  }
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty())
    throw ValidationError(std::string(what) + " path not configured (config key or flag)");
  if (!fs::exists(p))
    throw ValidationError(std::string(what) + " file not found: " + p.string());
}

// ---------------------------------------------------------------------------
// run manifest

class Manifest {
 public:
  Manifest(std::string subcommand, fs::path out_dir) : base_(std::move(out_dir)) {
    doc_["tool"] = "gsna";
    doc_["version"] = std::string(kVersion);
    doc_["subcommand"] = std::move(subcommand);
    doc_["params"] = ordered_json::object();
    doc_["inputs"] = ordered_json::object();
    doc_["outputs"] = ordered_json::object();
  }

  template <class T>
  void param(const char* key, const T& value) {
    doc_["params"][key] = value;
  }
  void input(const fs::path& p) { doc_["inputs"][key_for(p)] = hash_tag(p); }
  void output(const fs::path& p) { doc_["outputs"][key_for(p)] = hash_tag(p); }

  void write(const fs::path& path, bool echo, std::ostream& out) const {
    const std::string text = doc_.dump(2) + "\n";
    write_file(path, text);
    if (echo) out << text;
  }

 private:
  // Files under the output directory are keyed by their relative name, so
  // equal runs into differently named directories stay byte-identical.
  std::string key_for(const fs::path& p) const {
    const fs::path rel = p.lexically_relative(base_);
    if (rel.empty() || rel.begin()->string() == "..") return p.generic_string();
    return rel.generic_string();
  }
  static std::string hash_tag(const fs::path& p) { return "fnv1a64:" + hex16(fnv1a64_file(p)); }
  fs::path base_;
  ordered_json doc_;
};

// ---------------------------------------------------------------------------
// shared flags

struct Common {
  std::string config_path;
  std::string out_override;
  unsigned threads = 0;
  bool echo_manifest = false;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "pipeline config JSON");
    app.add_option("--out", out_override, "output directory (overrides config)");
    threads_opt = app.add_option("--threads", threads, "worker cap, 0 = all cores");
    app.add_flag("--manifest", echo_manifest, "echo the run manifest to stdout");
    app.set_version_flag("--version,-V", std::string("gsna ") + std::string(kVersion));
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads_opt != nullptr && threads_opt->count() > 0) cfg.threads = threads;
    return cfg;
  }
};

template <class Body>
int with_app(const char* name, const char* desc, std::vector<std::string> rest, std::ostream& out,
             std::ostream& err, const Body& make_body) {
  CLI::App app{desc};
  app.name(std::string("gsna ") + name);
  Common common;
  common.attach(app);
  auto body = make_body(app, common);
  try {
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "gsna " << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    body(out);
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

// ---------------------------------------------------------------------------
// artifact builders

ordered_json count_pct(const CountPct& c) {
  return ordered_json{{"count", c.count}, {"pct", c.pct}};
}

ordered_json stats_json(const IngestStats& s) {
  ordered_json j;
  j["users"] = {{"total", count_pct(s.users_total)},
                {"with_location", count_pct(s.users_with_location)},
                {"geocoded", count_pct(s.users_geocoded)},
                {"after_filters", count_pct(s.users_after_filters)}};
  j["edges"] = {{"total", count_pct(s.edges_total)},
                {"geocoded", count_pct(s.edges_geocoded)},
                {"after_filters", count_pct(s.edges_after_filters)}};
  j["locations"] = {{"total", count_pct(s.locations_total)},
                    {"geocoded", count_pct(s.locations_geocoded)}};
  return j;
}

std::string centralities_csv(const CellNetwork& net, const CentralityTable& t) {
  std::string csv = "cell,in_deg,out_deg,closeness,betweenness\n";
  for (NodeId v = 0; v < net.size(); ++v) {
    csv += net.unit_name(v);
    csv += ',';
    csv += fmt(t.in_degree[v]);
    csv += ',';
    csv += fmt(t.out_degree[v]);
    csv += ',';
    csv += fmt(t.closeness[v]);
    csv += ',';
    csv += fmt(t.betweenness[v]);
    csv += '\n';
  }
  return csv;
}

std::string spearman_csv(const SpearmanMatrix& m) {
  std::string csv = "metric";
  for (const auto name : kCentralityNames) {
    csv += ',';
    csv += name;
  }
  csv += '\n';
  for (std::size_t i = 0; i < 4; ++i) {
    csv += kCentralityNames[i];
    for (std::size_t j = 0; j < 4; ++j) {
      csv += ',';
      csv += fmt(m.coeff[i][j]);
    }
    csv += '\n';
  }
  return csv;
}

std::string flows_csv(const std::vector<Flow>& flows) {
  std::string csv = "src,dst,weight,pct\n";
  for (const Flow& f : flows) {
    csv += f.src;
    csv += ',';
    csv += f.dst;
    csv += ',';
    csv += std::to_string(f.weight);
    csv += ',';
    csv += fmt(f.pct);
    csv += '\n';
  }
  return csv;
}

ordered_json chord_json(const std::vector<Flow>& flows) {
  std::set<std::string> used;
  for (const Flow& f : flows) {
    used.insert(f.src);
    used.insert(f.dst);
  }
  const std::vector<std::string> codes(used.begin(), used.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < codes.size(); ++i) index[codes[i]] = i;
  std::vector<std::vector<std::uint64_t>> matrix(codes.size(),
                                                 std::vector<std::uint64_t>(codes.size(), 0));
  for (const Flow& f : flows) matrix[index[f.src]][index[f.dst]] = f.weight;
  ordered_json j;
  j["codes"] = codes;
  j["matrix"] = matrix;
  return j;
}

ordered_json ring_coordinates(const std::vector<GeoPoint>& ring) {
  ordered_json arr = ordered_json::array();
  for (const GeoPoint& p : ring) arr.push_back(ordered_json::array({p.lon, p.lat}));
  return arr;
}

// GeoJSON skeleton for per-cell results; property values appended per cell by
// the caller via `props(v)`.
template <class Props>
ordered_json cell_feature_collection(const CellNetwork& net, const HexGrid& grid,
                                     const Props& props) {
  ordered_json features = ordered_json::array();
  for (NodeId v = 0; v < net.size(); ++v) {
    ordered_json f;
    f["type"] = "Feature";
    f["properties"] = props(v);
    ordered_json geom;
    geom["type"] = "Polygon";
    geom["coordinates"] = ordered_json::array({ring_coordinates(grid.cell_polygon(net.cells[v]))});
    f["geometry"] = std::move(geom);
    features.push_back(std::move(f));
  }
  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = std::move(features);
  return fc;
}

std::string histogram_csv(const Histogram& h) {
  std::string csv = "bin_lo,bin_hi,share\n";
  for (std::size_t i = 0; i < h.share.size(); ++i) {
    const double lo = h.origin + static_cast<double>(i) * h.bin_width;
    csv += fmt(lo);
    csv += ',';
    csv += fmt(lo + h.bin_width);
    csv += ',';
    csv += fmt(h.share[i]);
    csv += '\n';
  }
  return csv;
}

// ---------------------------------------------------------------------------
// shared loading steps

UserNetwork load_network_files(const fs::path& users_csv, const fs::path& edges_csv) {
  require_file(users_csv, "network users");
  require_file(edges_csv, "network edges");
  return read_user_network(users_csv, edges_csv);
}

CellNetwork load_cellnet(const fs::path& p) {
  require_file(p, "cell network");
  return read_cellnet(p);
}

const std::set<std::string>& value_fields() {
  static const std::set<std::string> fields = {"users", "in_deg", "out_deg", "closeness",
                                               "betweenness"};
  return fields;
}

std::vector<double> value_column(const CellNetwork& net, const std::string& field,
                                 std::optional<CentralityTable>& table, bool weighted,
                                 unsigned threads) {
  if (field == "users") {
    std::vector<double> v(net.size());
    for (NodeId i = 0; i < net.size(); ++i)
      v[i] = static_cast<double>(net.graph.node_weight(i));
    return v;
  }
  if (!table) table = centrality_suite(net, weighted, threads);
  if (field == "in_deg") return table->in_degree;
  if (field == "out_deg") return table->out_degree;
  if (field == "closeness") return table->closeness;
  return table->betweenness;
}

std::vector<double> edge_length_samples(const UserNetwork& net) {
  std::vector<double> samples;
  samples.reserve(net.graph.edge_count());
  net.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t) {
    samples.push_back(haversine_km(net.points[s], net.points[t]));
  });
  return samples;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_synth(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("synth", "Generate a synthetic snowball follower network", std::move(rest), out,
                  err, [](CLI::App& app, Common& common) {
    auto spec = std::make_shared<std::string>();
    app.add_option("--spec", *spec, "synth config JSON (overrides config key 'synth')");
    return [&common, spec](std::ostream& o) {
      PipelineConfig cfg = common.resolve();
      if (!spec->empty()) cfg.synth = *spec;
      require_file(cfg.synth, "synth config");
      SynthConfig sc;
      try {
        sc = load_synth_config(cfg.synth);
      } catch (const std::exception& e) {
        throw ValidationError(e.what());
      }
      const SynthNetwork net = generate_network(sc);
      write_network(net, sc, cfg.out_dir);

      Manifest m("synth", cfg.out_dir);
      m.param("rng_seed", sc.rng_seed);
      m.param("iterations", sc.iterations);
      m.param("geo_homophily", sc.geo_homophily);
      m.param("regions", sc.regions.size());
      m.param("seeds", sc.seeds.size());
      m.input(cfg.synth);
      for (const char* name :
           {"users.csv", "edges.csv", "gazetteer.tsv", "population.tsv", "ground_truth.json"})
        m.output(cfg.out_dir / name);
      m.write(cfg.out_dir / "synth.manifest.json", common.echo_manifest, o);
      o << "generated " << net.users.size() << " users, " << net.edges.size() << " edges into "
        << cfg.out_dir.generic_string() << "\n";
    };
  });
}

int cmd_ingest(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("ingest", "Geocode and filter the raw network", std::move(rest), out, err,
                  [](CLI::App&, Common& common) {
    return [&common](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      require_file(cfg.users, "users");
      require_file(cfg.edges, "edges");
      require_file(cfg.gazetteer, "gazetteer");
      require_file(cfg.population, "population");

      const auto users = load_users(cfg.users);
      const auto edges = load_edges(cfg.edges);
      const Gazetteer gaz = Gazetteer::load(cfg.gazetteer);
      const PopulationRaster pop = PopulationRaster::load(cfg.population);
      const IngestResult res = filter_and_build(users, edges, gaz, pop);

      const fs::path users_out = cfg.out_dir / "network.users.csv";
      const fs::path edges_out = cfg.out_dir / "network.edges.csv";
      const fs::path stats_out = cfg.out_dir / "stats.json";
      fs::create_directories(cfg.out_dir);
      write_user_network(res.network, users_out, edges_out);
      write_file(stats_out, stats_json(res.stats).dump(2) + "\n");

      Manifest m("ingest", cfg.out_dir);
      for (const fs::path& p : {cfg.users, cfg.edges, cfg.gazetteer, cfg.population}) m.input(p);
      for (const fs::path& p : {users_out, edges_out, stats_out}) m.output(p);
      m.write(cfg.out_dir / "ingest.manifest.json", common.echo_manifest, o);

      const IngestStats& s = res.stats;
      o << "users: " << s.users_total.count << " total, " << s.users_with_location.count
        << " with location (" << fmt(s.users_with_location.pct) << "%), "
        << s.users_geocoded.count << " geocoded (" << fmt(s.users_geocoded.pct) << "%), "
        << s.users_after_filters.count << " kept (" << fmt(s.users_after_filters.pct) << "%)\n";
      o << "edges: " << s.edges_total.count << " total, " << s.edges_geocoded.count
        << " geocoded (" << fmt(s.edges_geocoded.pct) << "%), " << s.edges_after_filters.count
        << " kept (" << fmt(s.edges_after_filters.pct) << "%)\n";
      o << "locations: " << s.locations_total.count << " total, " << s.locations_geocoded.count
        << " geocoded (" << fmt(s.locations_geocoded.pct) << "%)\n";
    };
  });
}

int cmd_aggregate(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("aggregate", "Collapse the user network onto spatial units", std::move(rest),
                  out, err, [](CLI::App& app, Common& common) {
    struct Flags {
      bool grid = false;
      bool countries = false;
      double area = 0.0;
      std::string users_file, edges_file, output;
    };
    auto f = std::make_shared<Flags>();
    app.add_flag("--grid", f->grid, "aggregate onto the equal-area hex grid");
    app.add_flag("--countries", f->countries, "aggregate onto country polygons");
    auto* area_opt =
        app.add_option("--area", f->area, "hex cell area in km2 (default: config grid_area_km2)");
    app.add_option("--input-users", f->users_file, "filtered users csv (default: out/network.users.csv)");
    app.add_option("--input-edges", f->edges_file, "filtered edges csv (default: out/network.edges.csv)");
    app.add_option("--output", f->output, "output container name (default: cells.bin / countries.bin)");
    return [&common, f, area_opt](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      if (f->grid == f->countries)
        throw ValidationError("pick exactly one of --grid or --countries");
      const fs::path users_csv =
          f->users_file.empty() ? cfg.out_dir / "network.users.csv" : fs::path(f->users_file);
      const fs::path edges_csv =
          f->edges_file.empty() ? cfg.out_dir / "network.edges.csv" : fs::path(f->edges_file);
      const UserNetwork net = load_network_files(users_csv, edges_csv);

      if (f->grid) {
        const double area = area_opt->count() > 0 ? f->area : cfg.grid_area_km2;
        if (!(area > 0.0)) throw ValidationError("--area must be positive");
        const HexGrid grid(area);
        const CellNetwork cells = aggregate_to_grid(net, grid);
        const fs::path out_path = cfg.out_dir / (f->output.empty() ? "cells.bin" : f->output);
        write_cellnet(cells, out_path);

        Manifest m("aggregate-grid", cfg.out_dir);
        m.param("cell_area_km2", area);
        m.input(users_csv);
        m.input(edges_csv);
        m.output(out_path);
        m.write(cfg.out_dir / "aggregate-grid.manifest.json", common.echo_manifest, o);
        o << "wrote " << out_path.generic_string() << " (" << cells.size() << " cells)\n";
      } else {
        require_file(cfg.countries, "countries");
        const CountryPolygons countries = CountryPolygons::load(cfg.countries);
        const CellNetwork cnet = aggregate_to_countries(net, countries);
        const fs::path out_path = cfg.out_dir / (f->output.empty() ? "countries.bin" : f->output);
        write_cellnet(cnet, out_path);

        Manifest m("aggregate-countries", cfg.out_dir);
        m.input(users_csv);
        m.input(edges_csv);
        m.input(cfg.countries);
        m.output(out_path);
        m.write(cfg.out_dir / "aggregate-countries.manifest.json", common.echo_manifest, o);
        o << "wrote " << out_path.generic_string() << " (" << cnet.size() << " countries)\n";
      }
    };
  });
}

int cmd_subnet(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("subnet", "Clip the user network to a bounding box", std::move(rest), out, err,
                  [](CLI::App& app, Common& common) {
    struct Flags {
      std::string bbox, users_file, edges_file;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--bbox", f->bbox, "lat_min,lat_max,lon_min,lon_max (default: config aoi_bbox)");
    app.add_option("--input-users", f->users_file, "filtered users csv (default: out/network.users.csv)");
    app.add_option("--input-edges", f->edges_file, "filtered edges csv (default: out/network.edges.csv)");
    return [&common, f](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const BoundingBox box = f->bbox.empty() ? cfg.aoi_bbox : parse_bbox(f->bbox);
      if (box.lat_min > box.lat_max || box.lon_min > box.lon_max)
        throw ValidationError("bbox must satisfy min <= max per axis");
      const fs::path users_csv =
          f->users_file.empty() ? cfg.out_dir / "network.users.csv" : fs::path(f->users_file);
      const fs::path edges_csv =
          f->edges_file.empty() ? cfg.out_dir / "network.edges.csv" : fs::path(f->edges_file);
      const UserNetwork net = load_network_files(users_csv, edges_csv);
      const UserNetwork sub = subnetwork_by_bbox(net, box);

      const fs::path users_out = cfg.out_dir / "subnet.users.csv";
      const fs::path edges_out = cfg.out_dir / "subnet.edges.csv";
      fs::create_directories(cfg.out_dir);
      write_user_network(sub, users_out, edges_out);

      Manifest m("subnet", cfg.out_dir);
      m.param("bbox", std::vector<double>{box.lat_min, box.lat_max, box.lon_min, box.lon_max});
      m.input(users_csv);
      m.input(edges_csv);
      m.output(users_out);
      m.output(edges_out);
      m.write(cfg.out_dir / "subnet.manifest.json", common.echo_manifest, o);
      o << "kept " << sub.user_ids.size() << " of " << net.user_ids.size() << " users\n";
    };
  });
}

int cmd_centrality(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("centrality", "Centrality suite over a cell network", std::move(rest), out, err,
                  [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input, output;
      bool weighted = false;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/cells.bin)");
    app.add_option("--output", f->output, "csv name (default: centralities.csv)");
    app.add_flag("--weighted", f->weighted, "weight degrees by edge weight");
    return [&common, f](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const fs::path in_path = f->input.empty() ? cfg.out_dir / "cells.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      const bool weighted = f->weighted || cfg.weighted_degrees;
      const CentralityTable table = centrality_suite(net, weighted, cfg.threads);
      const fs::path out_path =
          cfg.out_dir / (f->output.empty() ? "centralities.csv" : f->output);
      write_file(out_path, centralities_csv(net, table));

      Manifest m("centrality", cfg.out_dir);
      m.param("weighted_degrees", weighted);
      m.input(in_path);
      m.output(out_path);
      m.write(cfg.out_dir / "centrality.manifest.json", common.echo_manifest, o);
      o << "wrote " << out_path.generic_string() << " (" << net.size() << " rows)\n";
    };
  });
}

int cmd_spearman(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("spearman", "Rank correlations between centrality columns", std::move(rest),
                  out, err, [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input;
      bool weighted = false;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/cells.bin)");
    app.add_flag("--weighted", f->weighted, "weight degrees by edge weight");
    return [&common, f](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const fs::path in_path = f->input.empty() ? cfg.out_dir / "cells.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      const bool weighted = f->weighted || cfg.weighted_degrees;
      const CentralityTable table = centrality_suite(net, weighted, cfg.threads);
      const SpearmanMatrix matrix = spearman_matrix(table);
      const fs::path out_path = cfg.out_dir / "spearman.csv";
      write_file(out_path, spearman_csv(matrix));

      Manifest m("spearman", cfg.out_dir);
      m.param("weighted_degrees", weighted);
      m.input(in_path);
      m.output(out_path);
      m.write(cfg.out_dir / "spearman.manifest.json", common.echo_manifest, o);
      o << "wrote " << out_path.generic_string() << "\n";
    };
  });
}

int cmd_bivariate(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("bivariate", "Two-metric 3x3 classification as GeoJSON", std::move(rest), out,
                  err, [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input;
      std::string a = "in_deg";
      std::string b = "out_deg";
      bool weighted = false;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/cells.bin)");
    app.add_option("--a", f->a, "first metric: users|in_deg|out_deg|closeness|betweenness");
    app.add_option("--b", f->b, "second metric");
    app.add_flag("--weighted", f->weighted, "weight degrees by edge weight");
    return [&common, f](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      for (const std::string& field : {f->a, f->b})
        if (!value_fields().contains(field))
          throw ValidationError("unknown metric '" + field +
                                "' (users, in_deg, out_deg, closeness, betweenness)");
      const fs::path in_path = f->input.empty() ? cfg.out_dir / "cells.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      if (net.kind != CellNetwork::Kind::Hex)
        throw ValidationError("bivariate export needs a hex cell network");
      const bool weighted = f->weighted || cfg.weighted_degrees;
      std::optional<CentralityTable> table;
      const auto va = value_column(net, f->a, table, weighted, cfg.threads);
      const auto vb = value_column(net, f->b, table, weighted, cfg.threads);
      const auto ca = bivariate_classes(va);
      const auto cb = bivariate_classes(vb);

      const HexGrid grid(net.cell_area_km2);
      const ordered_json fc = cell_feature_collection(net, grid, [&](NodeId v) {
        ordered_json props;
        props["cell"] = net.unit_name(v);
        props["class_a"] = std::string(to_string(ca[v]));
        props["class_b"] = std::string(to_string(cb[v]));
        return props;
      });
      const fs::path out_path = cfg.out_dir / "bivariate.geojson";
      write_file(out_path, fc.dump(2) + "\n");

      Manifest m("bivariate", cfg.out_dir);
      m.param("a", f->a);
      m.param("b", f->b);
      m.param("weighted_degrees", weighted);
      m.input(in_path);
      m.output(out_path);
      m.write(cfg.out_dir / "bivariate.manifest.json", common.echo_manifest, o);
      o << "wrote " << out_path.generic_string() << "\n";
    };
  });
}

int cmd_communities(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("communities", "Louvain communities of a cell network", std::move(rest), out,
                  err, [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input;
      std::uint64_t seed = 0;
      bool seed_set = false;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/cells.bin)");
    auto* seed_opt = app.add_option("--seed", f->seed, "visit-order seed (default: config louvain_seed)");
    return [&common, f, seed_opt](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const std::uint64_t seed = seed_opt->count() > 0 ? f->seed : cfg.louvain_seed;
      const fs::path in_path = f->input.empty() ? cfg.out_dir / "cells.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      const CommunityResult res = louvain_communities(net, seed);

      std::string csv = "cell,community\n";
      for (NodeId v = 0; v < net.size(); ++v)
        csv += net.unit_name(v) + ',' + std::to_string(res.community[v]) + '\n';
      const fs::path out_path = cfg.out_dir / "communities.csv";
      write_file(out_path, csv);

      Manifest m("communities", cfg.out_dir);
      m.param("seed", seed);
      m.input(in_path);
      m.output(out_path);
      m.write(cfg.out_dir / "communities.manifest.json", common.echo_manifest, o);
      o << "found " << res.count << " communities, modularity " << fmt(res.modularity) << "\n";
    };
  });
}

int cmd_hotspots(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("hotspots", "Getis-Ord Gi* classes as GeoJSON", std::move(rest), out, err,
                  [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input;
      std::string value = "users";
      std::uint64_t k = 0;
      bool weighted = false;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/cells.bin)");
    app.add_option("--value", f->value, "analysis field: users|in_deg|out_deg|closeness|betweenness");
    auto* k_opt = app.add_option("--k", f->k, "nearest neighbors (default: config gi_k)");
    app.add_flag("--weighted", f->weighted, "weight degrees by edge weight");
    return [&common, f, k_opt](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      if (!value_fields().contains(f->value))
        throw ValidationError("unknown metric '" + f->value +
                              "' (users, in_deg, out_deg, closeness, betweenness)");
      const std::uint64_t k = k_opt->count() > 0 ? f->k : cfg.gi_k;
      if (k < 1) throw ValidationError("--k must be at least 1");
      const fs::path in_path = f->input.empty() ? cfg.out_dir / "cells.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      if (net.kind != CellNetwork::Kind::Hex)
        throw ValidationError("hotspot export needs a hex cell network");
      if (k >= net.size())
        throw ValidationError("--k must be below the cell count (" + std::to_string(net.size()) +
                              ")");
      const bool weighted = f->weighted || cfg.weighted_degrees;
      std::optional<CentralityTable> table;
      const auto values = value_column(net, f->value, table, weighted, cfg.threads);

      const HexGrid grid(net.cell_area_km2);
      std::vector<GeoPoint> centroids(net.size());
      for (NodeId v = 0; v < net.size(); ++v) centroids[v] = grid.cell_centroid(net.cells[v]);
      const HotspotResult res =
          getis_ord_gi_star(values, centroids, static_cast<std::size_t>(k), cfg.threads);

      const ordered_json fc = cell_feature_collection(net, grid, [&](NodeId v) {
        ordered_json props;
        props["cell"] = net.unit_name(v);
        props["value"] = values[v];
        props["z"] = res.z[v];
        props["class"] = std::string(to_string(res.cls[v]));
        return props;
      });
      const fs::path out_path = cfg.out_dir / "hotspots.geojson";
      write_file(out_path, fc.dump(2) + "\n");

      Manifest m("hotspots", cfg.out_dir);
      m.param("k", k);
      m.param("value", f->value);
      if (f->value != "users") m.param("weighted_degrees", weighted);
      m.input(in_path);
      m.output(out_path);
      m.write(cfg.out_dir / "hotspots.manifest.json", common.echo_manifest, o);
      o << "wrote " << out_path.generic_string() << "\n";
    };
  });
}

int cmd_flows(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("flows", "Ranked unit-to-unit flows and chord matrix", std::move(rest), out,
                  err, [](CLI::App& app, Common& common) {
    struct Flags {
      std::string input;
      std::uint64_t top = 0;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input", f->input, "cell network container (default: out/countries.bin)");
    auto* top_opt = app.add_option("--top", f->top, "ranked flows to keep (default: config top_flows)");
    return [&common, f, top_opt](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const std::uint64_t top = top_opt->count() > 0 ? f->top : cfg.top_flows;
      if (top < 1) throw ValidationError("--top must be at least 1");
      const fs::path in_path =
          f->input.empty() ? cfg.out_dir / "countries.bin" : fs::path(f->input);
      const CellNetwork net = load_cellnet(in_path);
      const std::vector<Flow> flows = top_flows(net, static_cast<std::size_t>(top));

      const fs::path csv_path = cfg.out_dir / "flows.csv";
      const fs::path chord_path = cfg.out_dir / "chord.json";
      write_file(csv_path, flows_csv(flows));
      write_file(chord_path, chord_json(flows).dump(2) + "\n");

      Manifest m("flows", cfg.out_dir);
      m.param("top", top);
      m.input(in_path);
      m.output(csv_path);
      m.output(chord_path);
      m.write(cfg.out_dir / "flows.manifest.json", common.echo_manifest, o);
      o << "wrote " << csv_path.generic_string() << " (" << flows.size() << " flows)\n";
    };
  });
}

int cmd_histogram(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("histogram", "Freedman-Diaconis edge length distribution", std::move(rest), out,
                  err, [](CLI::App& app, Common& common) {
    struct Flags {
      std::string users_file, edges_file;
    };
    auto f = std::make_shared<Flags>();
    app.add_option("--input-users", f->users_file, "filtered users csv (default: out/network.users.csv)");
    app.add_option("--input-edges", f->edges_file, "filtered edges csv (default: out/network.edges.csv)");
    return [&common, f](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      const fs::path users_csv =
          f->users_file.empty() ? cfg.out_dir / "network.users.csv" : fs::path(f->users_file);
      const fs::path edges_csv =
          f->edges_file.empty() ? cfg.out_dir / "network.edges.csv" : fs::path(f->edges_file);
      const UserNetwork net = load_network_files(users_csv, edges_csv);
      const Histogram h = fd_histogram(edge_length_samples(net));

      const fs::path out_path = cfg.out_dir / "histogram.csv";
      write_file(out_path, histogram_csv(h));

      Manifest m("histogram", cfg.out_dir);
      m.input(users_csv);
      m.input(edges_csv);
      m.output(out_path);
      m.write(cfg.out_dir / "histogram.manifest.json", common.echo_manifest, o);
      o << "bin width " << fmt(h.bin_width) << " km, " << h.share.size() << " bins\n";
    };
  });
}

int cmd_report(std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  return with_app("report", "Full pipeline bundled into one JSON", std::move(rest), out, err,
                  [](CLI::App&, Common& common) {
    return [&common](std::ostream& o) {
      const PipelineConfig cfg = common.resolve();
      require_file(cfg.users, "users");
      require_file(cfg.edges, "edges");
      require_file(cfg.gazetteer, "gazetteer");
      require_file(cfg.population, "population");

      const auto users = load_users(cfg.users);
      const auto edges = load_edges(cfg.edges);
      const Gazetteer gaz = Gazetteer::load(cfg.gazetteer);
      const PopulationRaster pop = PopulationRaster::load(cfg.population);
      const IngestResult ing = filter_and_build(users, edges, gaz, pop);

      ordered_json report;
      report["version"] = std::string(kVersion);
      report["ingest"] = stats_json(ing.stats);

      const Histogram h = fd_histogram(edge_length_samples(ing.network));
      report["edge_length"] = {{"bin_width_km", h.bin_width},
                               {"origin_km", h.origin},
                               {"share", h.share}};

      const HexGrid grid(cfg.grid_area_km2);
      const CellNetwork cells = aggregate_to_grid(ing.network, grid);
      const CentralityTable table = centrality_suite(cells, cfg.weighted_degrees, cfg.threads);
      std::size_t zero_b = 0, zero_out = 0;
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (table.betweenness[i] == 0.0) ++zero_b;
        if (table.out_degree[i] == 0.0) ++zero_out;
      }
      const double n_cells = static_cast<double>(cells.size());
      report["grid"] = {{"cell_area_km2", cfg.grid_area_km2},
                        {"cells", cells.size()},
                        {"zero_betweenness_pct", 100.0 * static_cast<double>(zero_b) / n_cells},
                        {"zero_out_degree_pct", 100.0 * static_cast<double>(zero_out) / n_cells}};

      const SpearmanMatrix sm = spearman_matrix(table);
      ordered_json matrix = ordered_json::array();
      for (const auto& row : sm.coeff) matrix.push_back(row);
      report["spearman"] = {{"metrics", kCentralityNames}, {"matrix", std::move(matrix)}};

      const CommunityResult comm = louvain_communities(cells, cfg.louvain_seed);
      report["communities"] = {{"count", comm.count},
                               {"modularity", comm.modularity},
                               {"sizes", comm.sizes}};

      if (!cfg.countries.empty()) {
        require_file(cfg.countries, "countries");
        const CountryPolygons countries = CountryPolygons::load(cfg.countries);
        const CellNetwork cnet = aggregate_to_countries(ing.network, countries);
        std::uint64_t within = 0;
        cnet.graph.for_each_edge([&](NodeId s, NodeId t, std::uint64_t w) {
          if (s == t && cnet.unit_name(s) != kUnassignedCode) within += w;
        });
        const std::uint64_t total = cnet.graph.total_edge_weight();
        const std::vector<Flow> flows =
            top_flows(cnet, static_cast<std::size_t>(cfg.top_flows));
        ordered_json flows_json = ordered_json::array();
        for (const Flow& f : flows)
          flows_json.push_back({{"src", f.src}, {"dst", f.dst}, {"weight", f.weight},
                                {"pct", f.pct}});
        report["countries"] = {
            {"within_country_pct",
             total == 0 ? 0.0 : 100.0 * static_cast<double>(within) / static_cast<double>(total)},
            {"flows", std::move(flows_json)}};
      }

      const fs::path out_path = cfg.out_dir / "report.json";
      write_file(out_path, report.dump(2) + "\n");

      Manifest m("report", cfg.out_dir);
      m.param("grid_area_km2", cfg.grid_area_km2);
      m.param("louvain_seed", cfg.louvain_seed);
      m.param("top_flows", cfg.top_flows);
      m.param("weighted_degrees", cfg.weighted_degrees);
      for (const fs::path& p : {cfg.users, cfg.edges, cfg.gazetteer, cfg.population})
        m.input(p);
      if (!cfg.countries.empty()) m.input(cfg.countries);
      m.output(out_path);
      m.write(cfg.out_dir / "report.manifest.json", common.echo_manifest, o);
      o << "wrote " << out_path.generic_string() << "\n";
    };
  });
}

using Handler = int (*)(std::vector<std::string>, std::ostream&, std::ostream&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"synth", cmd_synth},           {"ingest", cmd_ingest},
      {"aggregate", cmd_aggregate},   {"subnet", cmd_subnet},
      {"centrality", cmd_centrality}, {"spearman", cmd_spearman},
      {"bivariate", cmd_bivariate},   {"communities", cmd_communities},
      {"hotspots", cmd_hotspots},     {"flows", cmd_flows},
      {"histogram", cmd_histogram},   {"report", cmd_report},
  };
  return table;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitValidation;
  }
  const std::string& first = args.front();
  if (first == "--version" || first == "-V") {
    out << "gsna " << kVersion << "\n";
    return kExitOk;
  }
  if (first == "--help" || first == "-h" || first == "help") {
    out << usage();
    return kExitOk;
  }
  if (!first.empty() && first.front() == '-') {
    err << "error: expected a subcommand first\n" << usage();
    return kExitValidation;
  }
  const auto it = handlers().find(first);
  if (it == handlers().end()) {
    err << "error: unknown subcommand '" << first << "'\n" << usage();
    return kExitUsage;
  }
  return it->second(std::vector<std::string>(args.begin() + 1, args.end()), out, err);
}

}  // namespace gsna::cli
