#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadstrip {

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline Complex to_complex(const Vec2& v) { return {v.x, v.y}; }
inline Vec2 to_vec2(const Complex& z) { return {z.real(), z.imag()}; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Axis-aligned bounding box.
struct Box2 {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

  void absorb(const Vec2& p) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  void pad(double m) { lo.x -= m; lo.y -= m; hi.x += m; hi.y += m; }
  bool contains(const Vec2& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool overlaps(const Box2& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
  }
  /// Squared distance from p to this box (0 if inside).
  double dist2(const Vec2& p) const {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return dx * dx + dy * dy;
  }
};

/// Static 2D kd-tree for nearest-neighbor queries over a fixed point set.
class KdTree2 {
 public:
  KdTree2() = default;
  explicit KdTree2(std::vector<Vec2> points) { build(std::move(points)); }

  void build(std::vector<Vec2> points);
  bool empty() const { return pts_.empty(); }
  std::size_t size() const { return pts_.size(); }
  const Vec2& point(std::size_t i) const { return pts_[i]; }

  /// Index of the point nearest to q. Requires a non-empty tree.
  std::size_t nearest(const Vec2& q) const;
  double nearest_dist(const Vec2& q) const { return dist(pts_[nearest(q)], q); }

  /// Indices of all points within radius r of q.
  std::vector<std::size_t> radius_query(const Vec2& q, double r) const;

 private:
  struct Node {
    Box2 bounds;
    std::uint32_t begin = 0, end = 0;  // range into order_
    std::int32_t left = -1, right = -1;
  };
  void build_node(int node, std::uint32_t begin, std::uint32_t end, int depth);
  void nearest_rec(int node, const Vec2& q, double& best2, std::size_t& best) const;

  std::vector<Vec2> pts_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Even-odd crossing test of point p against a closed polyline.
bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p);

/// Squared distance from p to segment [a,b].
double segment_dist2(const Vec2& a, const Vec2& b, const Vec2& p);

/// True if segment [a,b] intersects the axis-aligned rectangle.
bool segment_intersects_box(const Vec2& a, const Vec2& b, const Box2& box);

}  // namespace quadstrip
