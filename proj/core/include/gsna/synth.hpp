#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsna/geo.hpp"

namespace gsna {

enum class Tier { Few, Medium, Many };
std::string_view to_string(Tier t);
std::optional<Tier> parse_tier(std::string_view text);

struct SynthRegion {
  std::string id;              // lower-case slug, also prefixes location names
  std::string country;         // planted country code for the ground truth
  std::string language_group;
  GeoPoint center;
  double radius_km = 0.0;      // locations are sampled inside this disc
  double population = 0.0;     // relative weight when routing followers
};

struct SeedSpec {
  std::string region_id;
  Tier tier = Tier::Medium;
};

struct TierRange {
  std::uint32_t lo = 1;
  std::uint32_t hi = 1;  // follower targets are log-uniform in [lo, hi]
};

struct SynthConfig {
  std::vector<SynthRegion> regions;
  std::vector<SeedSpec> seeds;
  std::uint32_t iterations = 2;
  std::array<TierRange, 3> tier_ranges = {TierRange{1, 500}, TierRange{500, 5000},
                                          TierRange{5000, 20000}};  // few, medium, many
  std::array<double, 3> tier_probs = {0.85, 0.14, 0.01};            // tier mix of non-seed users
  double geo_homophily = 0.45;      // chance a follower lives in the followed user's region
  double same_language_prob = 0.8;  // otherwise: same-language region (vs. any other)
  double new_follower_prob = 0.35;  // chance a follower slot mints a new user
  std::uint32_t locations_per_region = 30;
  std::uint64_t rng_seed = 1;
};

SynthConfig load_synth_config(const std::filesystem::path& json_path);

struct SynthLocation {
  std::string name;
  GeoPoint point;
  std::uint32_t region = 0;
};

struct SynthUser {
  std::string id;
  std::uint32_t location = 0;  // index into SynthNetwork::locations
  std::uint32_t region = 0;
  std::uint32_t depth = 0;     // snowball wave that created the user
  Tier tier = Tier::Few;
};

struct SynthNetwork {
  std::vector<SynthLocation> locations;
  std::vector<SynthUser> users;
  // (followed, follower) index pairs: edges point along information flow.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

// Breadth-first snowball crawl simulation. Seeds are wave 0; each wave's
// users receive a log-uniform number of followers routed by region homophily
// and language, and a follower slot either mints a new user (who joins the
// next wave) or links an existing one from the chosen region. A single
// mt19937_64 stream drives every draw, so equal configs give equal networks.
SynthNetwork generate_network(const SynthConfig& cfg);

// Emits users.csv, edges.csv, gazetteer.tsv, population.tsv (1-degree raster
// of user counts) and ground_truth.json into out_dir.
void write_network(const SynthNetwork& net, const SynthConfig& cfg,
                   const std::filesystem::path& out_dir);

}  // namespace gsna
