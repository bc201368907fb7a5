#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace lwb::walk {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator-(Point a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
  friend constexpr auto operator<=>(Point a, Point b) = default;
};

inline constexpr std::int64_t norm2(Point p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point p) { return std::sqrt(static_cast<double>(norm2(p))); }

// Packs both coordinates into one word; valid for |x|,|y| < 2^31.
inline constexpr std::uint64_t pack(Point p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint32_t>(p.y);
}

struct PointHash {
  std::size_t operator()(Point p) const noexcept {
    std::uint64_t z = pack(p) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

// D(c,r) = {y : |y-c| < r}, strict.
struct Disk {
  Point center{};
  double radius = 1.0;

  bool contains(Point p) const {
    const double r2 = radius * radius;
    return static_cast<double>(norm2(p - center)) < r2;
  }
};

// Lattice points of the disk in row-major order (y outer, x inner).
std::vector<Point> disk_points(const Disk& d);

// Exact Euclidean distance from y to the lattice set of the disk; 0 inside.
double distance_to_disk(Point y, const Disk& d);

// y lies in the s-band: outside the disk and r <= |y - c| <= r + s (distance to
// the Euclidean disk, so D(c, r+s) \ D(c, r) is always inside the band).
bool in_band(Point y, const Disk& d, double s);

// Annulus {r_in <= |y-c| < r_out} as lattice points; r_in = 0 gives the disk.
std::vector<Point> annulus_points(Point center, double r_in, double r_out);

}  // namespace lwb::walk
