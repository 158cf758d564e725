#include "table1_fixture.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testfix {

namespace {

std::string pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write fixture file " + p.string());
  return f;
}

}  // namespace

void write_table1_fixture(const std::filesystem::path& dir) {
  const Table1Counts n;
  std::filesystem::create_directories(dir);

  const std::uint64_t no_location = n.users_total - n.users_with_location;     // 713
  const std::uint64_t located_bad = n.users_with_location - n.users_geocoded;  // 96
  const std::uint64_t bad_locs = n.locations_total - n.locations_geocoded;     // 85

  auto loc_name = [&](std::uint64_t k) { return "loc" + pad(k, 3); };
  auto loc_lat = [&](std::uint64_t k) {
    return k >= 155 && k < 160 ? -50.5 - static_cast<double>(k - 155) : 5.5 + static_cast<double>(k % 40);
  };
  auto loc_lon = [&](std::uint64_t k) {
    return k >= 155 && k < 160 ? -120.5 : 10.5 + 3.0 * static_cast<double>(k / 40);
  };
  auto precision_of = [&](std::uint64_t k) {
    if (k >= 140 && k < 150) return "country";
    if (k >= 150 && k < 155) return "continent";
    return "city";
  };

  // Users: a block without location, then the geocodable block spread
  // round-robin over the 160 gazetteer locations, then users at the 85
  // strings the gazetteer does not know.
  std::vector<std::string> uid(n.users_total);
  for (std::uint64_t i = 0; i < n.users_total; ++i) uid[i] = "t" + pad(i + 1, 4);
  {
    auto f = open(dir / "users.csv");
    f << "user_id,location\n";
    std::uint64_t row = 0;
    for (std::uint64_t i = 0; i < no_location; ++i) f << uid[row++] << ",\n";
    for (std::uint64_t g = 0; g < n.users_geocoded; ++g)
      f << uid[row++] << ',' << loc_name(g % n.locations_geocoded) << '\n';
    for (std::uint64_t i = 0; i < located_bad; ++i)
      f << uid[row++] << ',' << loc_name(n.locations_geocoded + i % bad_locs) << '\n';
  }

  // Edges: the first block connects geocodable users only; the second block
  // runs over everyone else, so no pair of geocodable endpoints appears.
  {
    auto f = open(dir / "edges.csv");
    f << "src,dst\n";
    auto geo_uid = [&](std::uint64_t g) { return uid[no_location + g]; };
    std::uint64_t emitted = 0;
    for (std::uint64_t j = 1; emitted < n.edges_geocoded; ++j)
      for (std::uint64_t i = 0; i < n.users_geocoded && emitted < n.edges_geocoded; ++i, ++emitted)
        f << geo_uid(i) << ',' << geo_uid((i + j) % n.users_geocoded) << '\n';

    std::vector<std::string> rest;
    for (std::uint64_t i = 0; i < no_location; ++i) rest.push_back(uid[i]);
    for (std::uint64_t i = 0; i < located_bad; ++i)
      rest.push_back(uid[no_location + n.users_geocoded + i]);
    const std::uint64_t other_edges = n.edges_total - n.edges_geocoded;
    emitted = 0;
    for (std::uint64_t j = 1; emitted < other_edges; ++j)
      for (std::uint64_t i = 0; i < rest.size() && emitted < other_edges; ++i, ++emitted)
        f << rest[i] << ',' << rest[(i + j) % rest.size()] << '\n';
  }

  {
    auto f = open(dir / "gazetteer.tsv");
    f << "location\tlat\tlon\tprecision\n";
    for (std::uint64_t k = 0; k < n.locations_geocoded; ++k)
      f << loc_name(k) << '\t' << loc_lat(k) << '\t' << loc_lon(k) << '\t' << precision_of(k)
        << '\n';
  }

  // Raster rows for every gazetteer location except the five deliberately
  // unpopulated ones.
  {
    auto f = open(dir / "population.tsv");
    f << "# cell_size_deg=1\n";
    f << "lat,lon,count\n";
    for (std::uint64_t k = 0; k < 155; ++k)
      f << static_cast<int>(loc_lat(k)) << ',' << static_cast<int>(loc_lon(k)) << ",100\n";
  }
}

}  // namespace testfix
