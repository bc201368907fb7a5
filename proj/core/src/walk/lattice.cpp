#include "lwb/walk/lattice.hpp"

#include <algorithm>
#include <limits>

namespace lwb::walk {

std::vector<Point> disk_points(const Disk& d) { return annulus_points(d.center, 0.0, d.radius); }

std::vector<Point> annulus_points(Point center, double r_in, double r_out) {
  std::vector<Point> out;
  if (r_out <= 0.0) return out;
  const auto m = static_cast<std::int64_t>(std::ceil(r_out));
  const double in2 = r_in * r_in;
  const double out2 = r_out * r_out;
  for (std::int64_t y = -m; y <= m; ++y) {
    for (std::int64_t x = -m; x <= m; ++x) {
      const auto q = static_cast<double>(x * x + y * y);
      if (q < out2 && q >= in2) out.push_back({center.x + x, center.y + y});
    }
  }
  return out;
}

double distance_to_disk(Point y, const Disk& d) {
  if (d.contains(y)) return 0.0;
  const Point v = y - d.center;
  const double ny = norm(v);
  // A lattice point within sqrt(2)/2 of c + (r-1) v/|v| lies in the disk, so
  // the distance is at most ny - r + 1 + sqrt(2)/2.
  const double ub = std::max(ny - d.radius + 1.0 + 0.7072, 1.0);
  const auto m = static_cast<std::int64_t>(std::ceil(ub));
  double best2 = std::numeric_limits<double>::infinity();
  for (std::int64_t dy = -m; dy <= m; ++dy) {
    for (std::int64_t dx = -m; dx <= m; ++dx) {
      const auto q = static_cast<double>(dx * dx + dy * dy);
      if (q >= best2) continue;
      if (d.contains({y.x + dx, y.y + dy})) best2 = q;
    }
  }
  return std::sqrt(best2);
}

bool in_band(Point y, const Disk& d, double s) {
  if (d.contains(y)) return false;
  return norm(y - d.center) - d.radius <= s;
}

}  // namespace lwb::walk
