#include "gsna/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "gsna/util.hpp"

namespace gsna {

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Few: return "few";
    case Tier::Medium: return "medium";
    case Tier::Many: return "many";
  }
  return "unknown";
}

std::optional<Tier> parse_tier(std::string_view text) {
  if (text == "few") return Tier::Few;
  if (text == "medium") return Tier::Medium;
  if (text == "many") return Tier::Many;
  return std::nullopt;
}

namespace {

void validate(const SynthConfig& cfg) {
  if (cfg.regions.empty()) throw std::invalid_argument("synth config: no regions");
  if (cfg.seeds.empty()) throw std::invalid_argument("synth config: no seeds");
  if (cfg.locations_per_region == 0)
    throw std::invalid_argument("synth config: locations_per_region must be positive");
  std::unordered_set<std::string> ids;
  for (const SynthRegion& r : cfg.regions) {
    if (r.id.empty() || !ids.insert(r.id).second)
      throw std::invalid_argument("synth config: region ids must be unique and nonempty");
    if (!(r.radius_km > 0.0)) throw std::invalid_argument("synth config: radius_km must be positive");
    if (!(r.population > 0.0)) throw std::invalid_argument("synth config: population must be positive");
  }
  for (const SeedSpec& s : cfg.seeds)
    if (!ids.contains(s.region_id))
      throw std::invalid_argument("synth config: seed references unknown region '" + s.region_id + "'");
  for (const TierRange& tr : cfg.tier_ranges)
    if (tr.lo < 1 || tr.hi < tr.lo)
      throw std::invalid_argument("synth config: tier ranges need 1 <= lo <= hi");
  for (double p : {cfg.geo_homophily, cfg.same_language_prob, cfg.new_follower_prob})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("synth config: probabilities must be in [0, 1]");
  double psum = 0.0;
  for (double p : cfg.tier_probs) {
    if (p < 0.0) throw std::invalid_argument("synth config: tier probabilities must be nonnegative");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-6)
    throw std::invalid_argument("synth config: tier probabilities must sum to 1");
}

// Weighted pick over a fixed index list using precomputed cumulative sums.
struct WeightedPick {
  std::vector<std::uint32_t> items;
  std::vector<double> cum;

  void build(const std::vector<std::uint32_t>& idx, const std::vector<double>& weight) {
    items = idx;
    cum.clear();
    double run = 0.0;
    for (std::uint32_t i : idx) {
      run += weight[i];
      cum.push_back(run);
    }
  }
  bool empty() const { return items.empty(); }
  std::uint32_t draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cum.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t pos = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                                  items.size() - 1);
    return items[pos];
  }
};

std::uint32_t draw_follower_target(const SynthConfig& cfg, Tier tier, std::mt19937_64& rng) {
  const TierRange& tr = cfg.tier_ranges[static_cast<std::size_t>(tier)];
  if (tr.lo == tr.hi) return tr.lo;
  const double lo = std::log(static_cast<double>(tr.lo));
  const double hi = std::log(static_cast<double>(tr.hi));
  const double v = std::exp(lo + uniform01(rng) * (hi - lo));
  const auto count = static_cast<std::uint32_t>(std::llround(v));
  return std::clamp(count, tr.lo, tr.hi);
}

Tier draw_tier(const SynthConfig& cfg, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  if (u < cfg.tier_probs[0]) return Tier::Few;
  if (u < cfg.tier_probs[0] + cfg.tier_probs[1]) return Tier::Medium;
  return Tier::Many;
}

std::string zero_pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SynthNetwork generate_network(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.rng_seed);
  SynthNetwork net;

  const std::size_t nregions = cfg.regions.size();

  // Location pools, one disc of uniformly sampled points per region.
  std::vector<std::vector<std::uint32_t>> region_locations(nregions);
  for (std::uint32_t r = 0; r < nregions; ++r) {
    const SynthRegion& region = cfg.regions[r];
    for (std::uint32_t j = 0; j < cfg.locations_per_region; ++j) {
      const double dist = region.radius_km * std::sqrt(uniform01(rng));
      const double bearing = 360.0 * uniform01(rng);
      SynthLocation loc;
      loc.name = region.id + "_" + zero_pad(j, 2);
      loc.point = destination_point(region.center, bearing, dist);
      loc.region = r;
      region_locations[r].push_back(static_cast<std::uint32_t>(net.locations.size()));
      net.locations.push_back(std::move(loc));
    }
  }

  // Follower routing tables: same-language and any-other region, both
  // excluding the origin region and weighted by population.
  std::vector<double> weights(nregions);
  for (std::size_t r = 0; r < nregions; ++r) weights[r] = cfg.regions[r].population;
  std::vector<WeightedPick> same_lang(nregions), others(nregions);
  for (std::uint32_t r = 0; r < nregions; ++r) {
    std::vector<std::uint32_t> lang_idx, other_idx;
    for (std::uint32_t s = 0; s < nregions; ++s) {
      if (s == r) continue;
      other_idx.push_back(s);
      if (cfg.regions[s].language_group == cfg.regions[r].language_group) lang_idx.push_back(s);
    }
    same_lang[r].build(lang_idx, weights);
    others[r].build(other_idx, weights);
  }

  std::vector<std::vector<std::uint32_t>> users_in_region(nregions);
  std::vector<std::uint32_t> follower_target;

  auto create_user = [&](std::uint32_t region, Tier tier, std::uint32_t depth) {
    const auto uid = static_cast<std::uint32_t>(net.users.size());
    SynthUser u;
    u.id = "u" + zero_pad(uid + 1, 6);
    const auto& pool = region_locations[region];
    u.location = pool[uniform_below(rng, pool.size())];
    u.region = region;
    u.depth = depth;
    u.tier = tier;
    net.users.push_back(std::move(u));
    users_in_region[region].push_back(uid);
    follower_target.push_back(draw_follower_target(cfg, tier, rng));
    return uid;
  };

  std::unordered_map<std::string, std::uint32_t> region_index;
  for (std::uint32_t r = 0; r < nregions; ++r) region_index[cfg.regions[r].id] = r;

  std::vector<std::uint32_t> frontier;
  for (const SeedSpec& seed : cfg.seeds)
    frontier.push_back(create_user(region_index.at(seed.region_id), seed.tier, 0));

  std::unordered_set<std::uint64_t> edge_seen;
  auto add_edge = [&](std::uint32_t followed, std::uint32_t follower) {
    const std::uint64_t key = (static_cast<std::uint64_t>(followed) << 32) | follower;
    if (edge_seen.insert(key).second) net.edges.emplace_back(followed, follower);
  };

  for (std::uint32_t wave = 1; wave <= cfg.iterations; ++wave) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t u : frontier) {
      const std::uint32_t home = net.users[u].region;
      for (std::uint32_t slot = 0; slot < follower_target[u]; ++slot) {
        std::uint32_t target_region = home;
        if (uniform01(rng) >= cfg.geo_homophily) {
          // Route away from home: same-language regions first, any other as
          // fallback; single-region configs collapse back to home.
          const bool want_lang = uniform01(rng) < cfg.same_language_prob;
          if (want_lang && !same_lang[home].empty())
            target_region = same_lang[home].draw(rng);
          else if (!others[home].empty())
            target_region = others[home].draw(rng);
        }
        const auto& pool = users_in_region[target_region];
        const bool mint = pool.empty() || uniform01(rng) < cfg.new_follower_prob;
        std::uint32_t follower;
        if (mint) {
          follower = create_user(target_region, draw_tier(cfg, rng), wave);
          next.push_back(follower);
        } else {
          follower = pool[uniform_below(rng, pool.size())];
          if (follower == u) continue;  // nobody follows themselves
        }
        add_edge(u, follower);
      }
    }
    frontier = std::move(next);
  }
  return net;
}

void write_network(const SynthNetwork& net, const SynthConfig& cfg,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream f(out_dir / "users.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write users.csv");
    f << "user_id,location\n";
    for (const SynthUser& u : net.users)
      f << u.id << ',' << net.locations[u.location].name << '\n';
  }
  {
    std::ofstream f(out_dir / "edges.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write edges.csv");
    f << "src,dst\n";
    for (const auto& [src, dst] : net.edges)
      f << net.users[src].id << ',' << net.users[dst].id << '\n';
  }
  {
    std::ofstream f(out_dir / "gazetteer.tsv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write gazetteer.tsv");
    f << "location\tlat\tlon\tprecision\n";
    for (const SynthLocation& loc : net.locations)
      f << loc.name << '\t' << format_double(loc.point.lat) << '\t'
        << format_double(loc.point.lon) << "\tcity\n";
  }
  {
    // 1-degree raster of user counts keyed by cell corner, sorted for
    // reproducible bytes.
    std::map<std::pair<std::int32_t, std::int32_t>, std::uint64_t> counts;
    for (const SynthUser& u : net.users) {
      const GeoPoint& p = net.locations[u.location].point;
      const auto lat = static_cast<std::int32_t>(std::floor(p.lat));
      const auto lon = static_cast<std::int32_t>(std::floor(p.lon));
      ++counts[{lat, lon}];
    }
    std::ofstream f(out_dir / "population.tsv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write population.tsv");
    f << "# cell_size_deg=1\n";
    f << "lat,lon,count\n";
    for (const auto& [cell, count] : counts)
      f << cell.first << ',' << cell.second << ',' << count << '\n';
  }
  {
    nlohmann::ordered_json gt;
    gt["rng_seed"] = cfg.rng_seed;
    nlohmann::ordered_json regions;
    for (const SynthRegion& r : cfg.regions) {
      regions[r.id] = {{"country", r.country}, {"language_group", r.language_group}};
    }
    gt["regions"] = std::move(regions);
    nlohmann::ordered_json locations;
    for (const SynthLocation& loc : net.locations)
      locations[loc.name] = cfg.regions[loc.region].id;
    gt["locations"] = std::move(locations);
    nlohmann::ordered_json users;
    for (const SynthUser& u : net.users) {
      users[u.id] = {{"region", cfg.regions[u.region].id},
                     {"depth", u.depth},
                     {"tier", std::string(to_string(u.tier))}};
    }
    gt["users"] = std::move(users);
    std::ofstream f(out_dir / "ground_truth.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write ground_truth.json");
    f << gt.dump(2) << '\n';
  }
}

SynthConfig load_synth_config(const std::filesystem::path& json_path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(json_path.string() + ": invalid JSON: " + e.what());
  }
  SynthConfig cfg;
  try {
    for (const auto& rj : doc.at("regions")) {
      SynthRegion r;
      r.id = rj.at("id").get<std::string>();
      r.country = rj.at("country").get<std::string>();
      r.language_group = rj.at("language_group").get<std::string>();
      const auto& c = rj.at("center");
      r.center = make_point(c.at(0).get<double>(), c.at(1).get<double>());
      r.radius_km = rj.at("radius_km").get<double>();
      r.population = rj.at("population").get<double>();
      cfg.regions.push_back(std::move(r));
    }
    for (const auto& sj : doc.at("seeds")) {
      SeedSpec s;
      s.region_id = sj.at("region").get<std::string>();
      const std::string tier = sj.at("tier").get<std::string>();
      auto t = parse_tier(tier);
      if (!t) throw std::runtime_error("unknown tier '" + tier + "'");
      s.tier = *t;
      cfg.seeds.push_back(std::move(s));
    }
    cfg.iterations = doc.value("iterations", cfg.iterations);
    if (doc.contains("tier_ranges")) {
      const auto& tr = doc.at("tier_ranges");
      const std::array<const char*, 3> names = {"few", "medium", "many"};
      for (std::size_t i = 0; i < 3; ++i) {
        if (!tr.contains(names[i])) continue;
        cfg.tier_ranges[i].lo = tr.at(names[i]).at(0).get<std::uint32_t>();
        cfg.tier_ranges[i].hi = tr.at(names[i]).at(1).get<std::uint32_t>();
      }
    }
    if (doc.contains("tier_probs")) {
      const auto& tp = doc.at("tier_probs");
      cfg.tier_probs[0] = tp.value("few", cfg.tier_probs[0]);
      cfg.tier_probs[1] = tp.value("medium", cfg.tier_probs[1]);
      cfg.tier_probs[2] = tp.value("many", cfg.tier_probs[2]);
    }
    cfg.geo_homophily = doc.value("geo_homophily", cfg.geo_homophily);
    cfg.same_language_prob = doc.value("same_language_prob", cfg.same_language_prob);
    cfg.new_follower_prob = doc.value("new_follower_prob", cfg.new_follower_prob);
    cfg.locations_per_region = doc.value("locations_per_region", cfg.locations_per_region);
    cfg.rng_seed = doc.value("rng_seed", cfg.rng_seed);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(json_path.string() + ": " + e.what());
  }
  validate(cfg);
  return cfg;
}

}  // namespace gsna
