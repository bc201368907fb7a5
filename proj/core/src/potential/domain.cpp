#include "lwb/potential/domain.hpp"

#include <algorithm>

namespace lwb::potential {

Domain::Domain(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  xmin_ = xmax_ = points_[0].x;
  ymin_ = ymax_ = points_[0].y;
  for (const auto& p : points_) {
    xmin_ = std::min(xmin_, p.x);
    xmax_ = std::max(xmax_, p.x);
    ymin_ = std::min(ymin_, p.y);
    ymax_ = std::max(ymax_, p.y);
  }
  width_ = xmax_ - xmin_ + 1;
  map_.assign(static_cast<std::size_t>(width_ * (ymax_ - ymin_ + 1)), -1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    map_[static_cast<std::size_t>((p.y - ymin_) * width_ + (p.x - xmin_))] = static_cast<std::int32_t>(i);
  }
}

Domain Domain::disk(const walk::Disk& d) { return Domain(walk::disk_points(d)); }

Domain Domain::annulus(Point center, double r_in, double r_out) {
  return Domain(walk::annulus_points(center, r_in, r_out));
}

}  // namespace lwb::potential
