#include "gsna/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gsna {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;

double to_rad(double deg) { return deg * kPi / 180.0; }
double to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace

double normalize_lon(double lon_deg) {
  double lon = std::fmod(lon_deg, 360.0);
  if (lon < -180.0) lon += 360.0;
  if (lon >= 180.0) lon -= 360.0;
  return lon;
}

GeoPoint make_point(double lat_deg, double lon_deg) {
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg))
    throw std::invalid_argument("coordinates must be finite");
  if (lat_deg < -90.0 || lat_deg > 90.0)
    throw std::invalid_argument("latitude out of range [-90, 90]");
  return GeoPoint{lat_deg, normalize_lon(lon_deg)};
}

double haversine_km(const GeoPoint& p, const GeoPoint& q) {
  const double dlat = to_rad(q.lat - p.lat);
  const double dlon = to_rad(q.lon - p.lon);
  const double sl = std::sin(dlat / 2.0);
  const double so = std::sin(dlon / 2.0);
  double h = sl * sl + std::cos(to_rad(p.lat)) * std::cos(to_rad(q.lat)) * so * so;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_km) {
  const double delta = distance_km / kEarthRadiusKm;
  const double theta = to_rad(bearing_deg);
  const double phi1 = to_rad(origin.lat);
  const double lam1 = to_rad(origin.lon);
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                        std::cos(delta) - std::sin(phi1) * sin_phi2);
  return GeoPoint{to_deg(phi2), normalize_lon(to_deg(lam2))};
}

HexGrid::HexGrid(double cell_area_km2) : area_(cell_area_km2) {
  if (!std::isfinite(cell_area_km2) || cell_area_km2 <= 0.0)
    throw std::invalid_argument("cell area must be positive");
  // Regular hexagon area = (3*sqrt(3)/2) * a^2 with circumradius a.
  size_ = std::sqrt(2.0 * cell_area_km2 / (3.0 * kSqrt3));
}

HexGrid::XY HexGrid::project(const GeoPoint& p) {
  return XY{kEarthRadiusKm * to_rad(p.lon), kEarthRadiusKm * std::sin(to_rad(p.lat))};
}

GeoPoint HexGrid::unproject(double x, double y) {
  const double s = std::clamp(y / kEarthRadiusKm, -1.0, 1.0);
  return GeoPoint{to_deg(std::asin(s)), normalize_lon(to_deg(x / kEarthRadiusKm))};
}

HexGrid::XY HexGrid::center_xy(const CellId& cell) const {
  // Axial coordinates, flat-topped orientation: q = col, r = row.
  const double q = static_cast<double>(cell.col);
  const double r = static_cast<double>(cell.row);
  return XY{size_ * 1.5 * q, size_ * (kSqrt3 / 2.0 * q + kSqrt3 * r)};
}

CellId HexGrid::cell_for_point(const GeoPoint& p) const {
  const XY xy = project(p);
  return cell_for_projected(xy.x, xy.y);
}

CellId HexGrid::cell_for_projected(double x_km, double y_km) const {
  const XY xy{x_km, y_km};
  const double fq = (2.0 / 3.0) * xy.x / size_;
  const double fr = (-1.0 / 3.0 * xy.x + kSqrt3 / 3.0 * xy.y) / size_;
  const double fs = -fq - fr;

  double rq = std::round(fq);
  double rr = std::round(fr);
  double rs = std::round(fs);
  const double dq = std::abs(rq - fq);
  const double dr = std::abs(rr - fr);
  const double ds = std::abs(rs - fs);
  if (dq > dr && dq > ds)
    rq = -rr - rs;
  else if (dr > ds)
    rr = -rq - rs;

  CellId best{static_cast<std::int32_t>(rr), static_cast<std::int32_t>(rq)};
  // The cube-rounded cell is nearest up to floating point noise; scanning its
  // neighbors makes the choice exact and applies the boundary tie-break.
  auto dist2 = [&](const CellId& c) {
    const XY cc = center_xy(c);
    const double dx = cc.x - xy.x;
    const double dy = cc.y - xy.y;
    return dx * dx + dy * dy;
  };
  double best_d = dist2(best);
  static constexpr int kDirs[6][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, -1}, {-1, 1}};
  const CellId base = best;
  for (const auto& d : kDirs) {
    CellId cand{base.row + d[0], base.col + d[1]};
    const double cd = dist2(cand);
    if (cd < best_d || (cd == best_d && cand < best)) {
      best = cand;
      best_d = cd;
    }
  }
  return best;
}

GeoPoint HexGrid::cell_centroid(const CellId& cell) const {
  const XY c = center_xy(cell);
  return unproject(c.x, c.y);
}

std::vector<GeoPoint> HexGrid::cell_polygon(const CellId& cell) const {
  const XY c = center_xy(cell);
  std::vector<GeoPoint> ring;
  ring.reserve(7);
  for (int k = 0; k < 6; ++k) {
    const double ang = kPi / 3.0 * k;  // flat-topped: first corner due east
    ring.push_back(unproject(c.x + size_ * std::cos(ang), c.y + size_ * std::sin(ang)));
  }
  ring.push_back(ring.front());
  return ring;
}

namespace {

// Quantile with linear interpolation between order statistics (the common
// spreadsheet/NumPy default).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double pos = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Histogram fd_histogram(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("histogram needs at least two samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (iqr <= 0.0) throw std::invalid_argument("zero interquartile range, bin width undefined");
  const double width = 2.0 * iqr * std::pow(static_cast<double>(n), -1.0 / 3.0);

  Histogram h;
  h.bin_width = width;
  h.origin = sorted.front();
  const double span = sorted.back() - sorted.front();
  const std::size_t bins = static_cast<std::size_t>(std::floor(span / width)) + 1;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : sorted) {
    auto idx = static_cast<std::size_t>((v - h.origin) / width);
    if (idx >= bins) idx = bins - 1;
    ++counts[idx];
  }
  h.share.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    h.share[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return h;
}

}  // namespace gsna
