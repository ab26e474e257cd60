#include "quadstrip/util.hpp"

#include <algorithm>
#include <numeric>

namespace quadstrip {

void KdTree2::build(std::vector<Vec2> points) {
  pts_ = std::move(points);
  order_.resize(pts_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.clear();
  if (pts_.empty()) return;
  nodes_.reserve(2 * pts_.size() / 8 + 4);
  nodes_.push_back({});
  build_node(0, 0, static_cast<std::uint32_t>(pts_.size()), 0);
}

void KdTree2::build_node(int node, std::uint32_t begin, std::uint32_t end, int depth) {
  Box2 b;
  for (std::uint32_t i = begin; i < end; ++i) b.absorb(pts_[order_[i]]);
  nodes_[node].bounds = b;
  nodes_[node].begin = begin;
  nodes_[node].end = end;
  if (end - begin <= 8) return;

  const bool split_x = (depth % 2 == 0) ? (b.hi.x - b.lo.x >= b.hi.y - b.lo.y)
                                        : (b.hi.x - b.lo.x > b.hi.y - b.lo.y);
  const std::uint32_t mid = (begin + end) / 2;
  auto cmp_x = [&](std::uint32_t a, std::uint32_t c) { return pts_[a].x < pts_[c].x; };
  auto cmp_y = [&](std::uint32_t a, std::uint32_t c) { return pts_[a].y < pts_[c].y; };
  if (split_x)
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, cmp_x);
  else
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, cmp_y);

  const int left = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  const int right = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[node].left = left;
  nodes_[node].right = right;
  build_node(left, begin, mid, depth + 1);
  build_node(right, mid, end, depth + 1);
}

std::size_t KdTree2::nearest(const Vec2& q) const {
  if (pts_.empty()) throw std::logic_error("KdTree2::nearest on empty tree");
  double best2 = std::numeric_limits<double>::max();
  std::size_t best = 0;
  nearest_rec(0, q, best2, best);
  return best;
}

void KdTree2::nearest_rec(int node, const Vec2& q, double& best2, std::size_t& best) const {
  const Node& nd = nodes_[node];
  if (nd.bounds.dist2(q) >= best2) return;
  if (nd.left < 0) {
    for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
      const double d2 = (pts_[order_[i]] - q).norm2();
      if (d2 < best2) {
        best2 = d2;
        best = order_[i];
      }
    }
    return;
  }
  const double dl = nodes_[nd.left].bounds.dist2(q);
  const double dr = nodes_[nd.right].bounds.dist2(q);
  if (dl < dr) {
    nearest_rec(nd.left, q, best2, best);
    nearest_rec(nd.right, q, best2, best);
  } else {
    nearest_rec(nd.right, q, best2, best);
    nearest_rec(nd.left, q, best2, best);
  }
}

std::vector<std::size_t> KdTree2::radius_query(const Vec2& q, double r) const {
  std::vector<std::size_t> out;
  if (pts_.empty()) return out;
  const double r2 = r * r;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[stack.back()];
    stack.pop_back();
    if (nd.bounds.dist2(q) > r2) continue;
    if (nd.left < 0) {
      for (std::uint32_t i = nd.begin; i < nd.end; ++i)
        if ((pts_[order_[i]] - q).norm2() <= r2) out.push_back(order_[i]);
    } else {
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double segment_dist2(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) return (p - a).norm2();
  double t = (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm2();
}

bool segment_intersects_box(const Vec2& a, const Vec2& b, const Box2& box) {
  if (box.contains(a) || box.contains(b)) return true;
  // Separating-axis test for segment vs axis-aligned rectangle.
  const Vec2 c{0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y)};
  const Vec2 h{0.5 * (box.hi.x - box.lo.x), 0.5 * (box.hi.y - box.lo.y)};
  const Vec2 m = (a + b) * 0.5 - c;
  const Vec2 d = (b - a) * 0.5;
  const double adx = std::abs(d.x), ady = std::abs(d.y);
  if (std::abs(m.x) > h.x + adx) return false;
  if (std::abs(m.y) > h.y + ady) return false;
  return std::abs(m.x * d.y - m.y * d.x) <= h.x * ady + h.y * adx + 1e-300;
}

}  // namespace quadstrip
