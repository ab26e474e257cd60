#include "quadstrip/quadtree.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace quadstrip {

namespace {

/// Values at the (p+1)^2 second-kind Chebyshev grid -> coefficient matrix
/// C(my, mx); cached per order.
const Eigen::MatrixXd& analysis_matrix(int p) {
  static std::map<int, Eigen::MatrixXd> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, chebyshev_analysis(p)).first;
  return it->second;
}

Eigen::MatrixXd sample_grid(const ScalarField& f, const Box2& box, int p,
                            const Panelization* zero_outside, double* fmax) {
  const Eigen::VectorXd pts = chebyshev_points(p);
  Eigen::MatrixXd V(p + 1, p + 1);
  const double cx = 0.5 * (box.lo.x + box.hi.x), cy = 0.5 * (box.lo.y + box.hi.y);
  const double hx = 0.5 * (box.hi.x - box.lo.x), hy = 0.5 * (box.hi.y - box.lo.y);
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix) {
      const Vec2 q{cx + hx * pts[ix], cy + hy * pts[iy]};
      double v = 0.0;
      if (zero_outside == nullptr || zero_outside->inside(q)) v = f(q);
      V(iy, ix) = v;
      if (fmax != nullptr) *fmax = std::max(*fmax, std::abs(v));
    }
  return V;
}

/// The paper's 1D tail ratio applied to each direction of an upsampled
/// (2p+2)^2 coefficient matrix, AND-ed. The head energy is guarded by the
/// global field scale so that boxes where f is locally negligible resolve.
bool resolved_2d(const Eigen::MatrixXd& C, int p, double eps, double fmax) {
  const int n = static_cast<int>(C.rows());  // 2p+2
  double head_x = 0.0, tail_x = 0.0, head_y = 0.0, tail_y = 0.0;
  for (int my = 0; my < n; ++my)
    for (int mx = 0; mx < n; ++mx) {
      const double c2 = C(my, mx) * C(my, mx);
      (mx < p ? head_x : tail_x) += c2;
      (my < p ? head_y : tail_y) += c2;
    }
  const double guard = fmax * fmax;
  // All-zero denominator counts as resolved (mirrors the 1D convention).
  const bool ok_x =
      tail_x == 0.0 || std::sqrt(tail_x / (p * std::max(head_x, guard))) < eps;
  const bool ok_y =
      tail_y == 0.0 || std::sqrt(tail_y / (p * std::max(head_y, guard))) < eps;
  return ok_x && ok_y;
}

}  // namespace

Region classify_box(const Box2& box, const Panelization& curve) {
  const auto& poly = curve.classify_polyline();
  const std::size_t m = poly.size();
  bool any_overlap = false;
  for (int k = 0; k < curve.panel_count(); ++k) {
    Box2 pb = curve.panel(k).bbox;
    // Panel bbox slightly padded: the polyline interpolates past the node hull.
    pb.pad(0.05 * curve.panel(k).arclen);
    if (!pb.overlaps(box)) continue;
    any_overlap = true;
    const int per = static_cast<int>(m) / curve.panel_count();
    const std::size_t start = static_cast<std::size_t>(k) * per;
    for (int i = 0; i < per; ++i) {
      const Vec2& a = poly[start + i];
      const Vec2& b = poly[(start + i + 1) % m];
      if (box.contains(a) || segment_intersects_box(a, b, box)) return Region::cut;
    }
  }
  (void)any_overlap;
  const Vec2 c{0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y)};
  return curve.inside(c) ? Region::inside : Region::outside;
}

Eigen::MatrixXd cheb_coeffs_2d(const ScalarField& f, const Box2& box, int p,
                               const Panelization* zero_outside) {
  const Eigen::MatrixXd V = sample_grid(f, box, p, zero_outside, nullptr);
  const Eigen::MatrixXd& A = analysis_matrix(p);
  return A * V * A.transpose();
}

int TruncatedQuadtree::contributing_leaf_count() const {
  int n = 0;
  for (int id : leaf_ids) n += nodes[id].contributes() ? 1 : 0;
  return n;
}

int TruncatedQuadtree::find_leaf(const Vec2& p) const {
  if (nodes.empty()) return -1;
  const Box2 rb = nodes[0].box();
  if (!rb.contains(p)) return -1;
  int cur = 0;
  while (!nodes[cur].is_leaf()) {
    const BoxNode& nd = nodes[cur];
    const int dx = p.x >= nd.center.x ? 1 : 0;
    const int dy = p.y >= nd.center.y ? 1 : 0;
    cur = nd.child0 + 2 * dy + dx;
  }
  return cur;
}

int TruncatedQuadtree::max_adjacent_leaf_level(int node, int level, std::int64_t ix,
                                               std::int64_t iy) const {
  const BoxNode& nd = nodes[node];
  // Cell range of the query at the node's level (conservative overlap test
  // on integer coordinates).
  auto touches = [&](const BoxNode& b) {
    // Compare at the finer of the two levels.
    const int L = std::max(b.level, level);
    const std::int64_t bx0 = b.ix << (L - b.level), by0 = b.iy << (L - b.level);
    const std::int64_t bs = std::int64_t{1} << (L - b.level);
    const std::int64_t qx0 = ix << (L - level), qy0 = iy << (L - level);
    const std::int64_t qs = std::int64_t{1} << (L - level);
    return bx0 <= qx0 + qs && qx0 <= bx0 + bs && by0 <= qy0 + qs && qy0 <= by0 + bs;
  };
  if (!touches(nd)) return -1;
  if (nd.is_leaf()) return nd.level;
  int best = -1;
  for (int c = 0; c < 4; ++c)
    best = std::max(best, max_adjacent_leaf_level(nd.child0 + c, level, ix, iy));
  return best;
}

namespace {

struct Builder {
  const ScalarField& f;
  const StripRegion& strip;
  const TreeConfig& cfg;
  TruncatedQuadtree& tree;

  void classify(BoxNode& b) const {
    const Box2 bb = b.box();
    b.tag_gamma = classify_box(bb, strip.gamma);
    b.tag_tilde = classify_box(bb, strip.gamma_tilde);
  }

  /// Algorithm refinement predicate; fills nothing.
  bool needs_split(const BoxNode& b) {
    if (b.level < cfg.min_depth) return true;
    if (b.tag_gamma == Region::outside) return false;

    // Function resolution on boxes fully inside the domain.
    if (b.tag_gamma == Region::inside) {
      const int p2 = 2 * cfg.order + 1;
      const Eigen::MatrixXd V = sample_grid(f, b.box(), p2, nullptr, &tree.fmax);
      const Eigen::MatrixXd& A = analysis_matrix(p2);
      const Eigen::MatrixXd C = A * V * A.transpose();
      if (!resolved_2d(C, cfg.order, cfg.eps, tree.fmax)) return true;
    }

    if (!cfg.strip_criterion) return false;

    // Truncation separation: a box meeting both the bulk and the exterior
    // always splits; a strip-touching box splits until its diagonal is
    // under half the local strip width.
    const bool meets_bulk = b.tag_tilde != Region::outside;
    const bool meets_exterior = b.tag_gamma != Region::inside;
    if (meets_bulk && meets_exterior) return true;
    const bool meets_strip =
        (b.tag_gamma != Region::outside) && (b.tag_tilde != Region::inside);
    if (meets_strip) {
      const double s = strip.local_width(b.center);
      if (b.diag() >= 0.5 * s) return true;
    }
    return false;
  }

  void fill_leaf(BoxNode& b) const {
    if (b.tag_gamma == Region::outside) return;  // pruned: no coefficients
    const Panelization* zero = b.tag_gamma == Region::cut ? &strip.gamma : nullptr;
    b.coeff = cheb_coeffs_2d(f, b.box(), cfg.order, zero);
  }

  void split(int id) {
    BoxNode& parent = tree.nodes[id];
    parent.child0 = static_cast<int>(tree.nodes.size());
    const double h2 = 0.5 * parent.half;
    const Vec2 c = parent.center;
    const int lvl = parent.level;
    const std::int64_t px = parent.ix, py = parent.iy;
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        BoxNode child;
        child.center = {c.x + (dx ? h2 : -h2), c.y + (dy ? h2 : -h2)};
        child.half = h2;
        child.level = lvl + 1;
        child.ix = 2 * px + dx;
        child.iy = 2 * py + dy;
        child.parent = id;
        tree.nodes.push_back(child);
      }
  }

  void run(const Box2& root_box) {
    BoxNode root;
    root.center = {0.5 * (root_box.lo.x + root_box.hi.x), 0.5 * (root_box.lo.y + root_box.hi.y)};
    root.half = 0.5 * std::max(root_box.hi.x - root_box.lo.x, root_box.hi.y - root_box.lo.y);
    tree.nodes.push_back(root);

    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      classify(tree.nodes[id]);
      if (needs_split(tree.nodes[id])) {
        if (tree.nodes[id].level >= cfg.max_depth) {
          std::ostringstream os;
          os << "quadtree: refinement past max depth " << cfg.max_depth << " at ("
             << tree.nodes[id].center.x << ", " << tree.nodes[id].center.y << ")";
          throw std::runtime_error(os.str());
        }
        split(id);
        const int c0 = tree.nodes[id].child0;
        for (int c = 3; c >= 0; --c) stack.push_back(c0 + c);  // pop order 0..3
      } else {
        fill_leaf(tree.nodes[id]);
      }
    }
  }
};

}  // namespace

TruncatedQuadtree build_truncated_tree(const ScalarField& f, const StripRegion& strip,
                                       const TreeConfig& cfg, std::optional<Box2> root_box) {
  TruncatedQuadtree tree;
  tree.order = cfg.order;
  tree.eps = cfg.eps;

  Box2 rb;
  if (root_box.has_value()) {
    rb = *root_box;
  } else {
    // Smallest power-of-two square over the 20%-expanded boundary bounding
    // box, center snapped so translation jitter does not move the grid.
    Box2 gb = strip.gamma.bbox();
    const double w = gb.hi.x - gb.lo.x, h = gb.hi.y - gb.lo.y;
    const double side = std::exp2(std::ceil(std::log2(1.2 * std::max(w, h))));
    const double snap = side / 8.0;
    const double cx = snap * std::round((0.5 * (gb.lo.x + gb.hi.x)) / snap);
    const double cy = snap * std::round((0.5 * (gb.lo.y + gb.hi.y)) / snap);
    rb = {{cx - side / 2, cy - side / 2}, {cx + side / 2, cy + side / 2}};
  }
  {
    // Require the 10% margin around the domain.
    Box2 gb = strip.gamma.bbox();
    const double diam = std::max(gb.hi.x - gb.lo.x, gb.hi.y - gb.lo.y);
    Box2 need = gb;
    need.pad(0.1 * diam);
    if (!(rb.lo.x <= need.lo.x && rb.lo.y <= need.lo.y && rb.hi.x >= need.hi.x &&
          rb.hi.y >= need.hi.y))
      throw std::invalid_argument("root box must contain the domain with >= 10% margin");
  }

  Builder builder{f, strip, cfg, tree};
  builder.run(rb);
  balance_2to1(tree, f, strip);
  return tree;
}

void balance_2to1(TruncatedQuadtree& tree, const ScalarField& f, const StripRegion& strip) {
  TreeConfig cfg;
  cfg.order = tree.order;
  cfg.eps = tree.eps;
  Builder builder{f, strip, cfg, tree};

  bool changed = true;
  while (changed) {
    changed = false;
    for (int id = 0; id < static_cast<int>(tree.nodes.size()); ++id) {
      if (!tree.nodes[id].is_leaf()) continue;
      const BoxNode& b = tree.nodes[id];
      // Any adjacent leaf more than one level deeper forces a split.
      const int adj = tree.max_adjacent_leaf_level(0, b.level, b.ix, b.iy);
      if (adj > b.level + 1) {
        builder.split(id);
        const int c0 = tree.nodes[id].child0;
        for (int c = 0; c < 4; ++c) {
          builder.classify(tree.nodes[c0 + c]);
          builder.fill_leaf(tree.nodes[c0 + c]);
        }
        tree.nodes[id].coeff.resize(0, 0);
        changed = true;
      }
    }
  }

  tree.leaf_ids.clear();
  for (int id = 0; id < static_cast<int>(tree.nodes.size()); ++id)
    if (tree.nodes[id].is_leaf()) tree.leaf_ids.push_back(id);
}

void dump_tree_csv(const TruncatedQuadtree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int p = tree.order;
  out << "cx,cy,half,level,tag_gamma,tag_tilde";
  for (int my = 0; my <= p; ++my)
    for (int mx = 0; mx <= p; ++mx) out << ",c" << my << "_" << mx;
  out << "\n";
  char buf[64];
  auto tag = [](Region r) { return r == Region::inside ? "in" : (r == Region::outside ? "out" : "cut"); };
  for (int id : tree.leaf_ids) {
    const BoxNode& b = tree.nodes[id];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", b.center.x, b.center.y, b.half);
    out << buf << b.level << "," << tag(b.tag_gamma) << "," << tag(b.tag_tilde);
    if (b.coeff.size() > 0) {
      for (int my = 0; my <= p; ++my)
        for (int mx = 0; mx <= p; ++mx) {
          std::snprintf(buf, sizeof buf, ",%.17g", b.coeff(my, mx));
          out << buf;
        }
    } else {
      for (int i = 0; i < (p + 1) * (p + 1); ++i) out << ",0";
    }
    out << "\n";
  }
}

}  // namespace quadstrip
