#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace gsna {

inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, normalized to [-180, 180)
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Wraps into [-180, 180).
double normalize_lon(double lon_deg);

// Validates the latitude range, normalizes the longitude. Throws
// std::invalid_argument on non-finite input or |lat| > 90.
GeoPoint make_point(double lat_deg, double lon_deg);

// Great-circle distance on the R = 6371 km sphere.
double haversine_km(const GeoPoint& p, const GeoPoint& q);

// Point reached from origin after distance_km along an initial bearing
// (degrees clockwise from north), same sphere.
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_km);

struct BoundingBox {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;
  bool contains(const GeoPoint& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
};

// Default area of interest used by the pipeline: Europe.
inline constexpr BoundingBox kEuropeBBox{34.0, 72.0, -25.0, 45.0};

struct CellId {
  std::int32_t row = 0;
  std::int32_t col = 0;
  friend auto operator<=>(const CellId&, const CellId&) = default;
};

// Flat-topped hexagon tiling of the Lambert cylindrical equal-area plane
// (x = R*lon, y = R*sin lat). The projection is area preserving, so every
// cell covers the same spherical area. Cells are the Voronoi regions of the
// hex centers; a point on a boundary goes to the lowest (row, col) among the
// nearest centers.
class HexGrid {
 public:
  explicit HexGrid(double cell_area_km2);

  double cell_area_km2() const { return area_; }
  double circumradius_km() const { return size_; }

  CellId cell_for_point(const GeoPoint& p) const;
  // Same lookup for callers that already live in the projected plane.
  CellId cell_for_projected(double x_km, double y_km) const;
  GeoPoint cell_centroid(const CellId& cell) const;
  // Closed ring (7 points, first == last) of the cell corners on the sphere.
  std::vector<GeoPoint> cell_polygon(const CellId& cell) const;

 private:
  struct XY {
    double x;
    double y;
  };
  static XY project(const GeoPoint& p);
  static GeoPoint unproject(double x, double y);
  XY center_xy(const CellId& cell) const;

  double area_;
  double size_;  // hexagon circumradius in projected km
};

struct Histogram {
  double bin_width = 0.0;
  double origin = 0.0;             // left edge of the first bin (= sample minimum)
  std::vector<double> share;       // per-bin share of samples, sums to 1
};

// Freedman-Diaconis binning: width 2*IQR*n^(-1/3), quartiles by linear
// interpolation between order statistics. The last bin is closed so the
// maximum is counted. Throws std::invalid_argument when n < 2 or IQR == 0.
Histogram fd_histogram(std::span<const double> samples);

}  // namespace gsna
