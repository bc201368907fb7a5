#pragma once

#include <cstdint>
#include <vector>

#include "lwb/walk/lattice.hpp"

namespace lwb::potential {

using walk::Point;

// Finite lattice set with a dense index over its bounding box.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Point> points);

  static Domain disk(const walk::Disk& d);
  // r_in <= |y - c| < r_out.
  static Domain annulus(Point center, double r_in, double r_out);

  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  // Index of p or -1.
  std::int64_t index(Point p) const {
    if (p.x < xmin_ || p.x > xmax_ || p.y < ymin_ || p.y > ymax_) return -1;
    return map_[static_cast<std::size_t>((p.y - ymin_) * width_ + (p.x - xmin_))];
  }
  bool contains(Point p) const { return index(p) >= 0; }

  std::int64_t xmin() const { return xmin_; }
  std::int64_t ymin() const { return ymin_; }
  std::int64_t width() const { return width_; }
  std::int64_t height() const { return ymax_ - ymin_ + 1; }

 private:
  std::vector<Point> points_;
  std::vector<std::int32_t> map_;
  std::int64_t xmin_ = 0, xmax_ = -1, ymin_ = 0, ymax_ = -1, width_ = 0;
};

}  // namespace lwb::potential
