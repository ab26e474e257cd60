#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "quadstrip/quadtree.hpp"

using namespace quadstrip;

namespace {
std::shared_ptr<const SpectralKit> kit16() {
  static auto kit = std::make_shared<const SpectralKit>(build_spectral_kit(16));
  return kit;
}

StripRegion circle_strip() {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-8);
  return build_fictitious_curve(pan, build_width_function(pan));
}

// Brute-force adjacency between two leaves by integer cell ranges.
bool leaves_touch(const BoxNode& a, const BoxNode& b) {
  const int L = std::max(a.level, b.level);
  const std::int64_t ax = a.ix << (L - a.level), ay = a.iy << (L - a.level);
  const std::int64_t as = std::int64_t{1} << (L - a.level);
  const std::int64_t bx = b.ix << (L - b.level), by = b.iy << (L - b.level);
  const std::int64_t bs = std::int64_t{1} << (L - b.level);
  return ax <= bx + bs && bx <= ax + as && ay <= by + bs && by <= ay + as;
}

void check_balanced_and_strip(const TruncatedQuadtree& tree, const StripRegion& strip) {
  for (std::size_t i = 0; i < tree.leaf_ids.size(); ++i)
    for (std::size_t j = i + 1; j < tree.leaf_ids.size(); ++j) {
      const BoxNode& a = tree.nodes[tree.leaf_ids[i]];
      const BoxNode& b = tree.nodes[tree.leaf_ids[j]];
      if (leaves_touch(a, b)) CHECK(std::abs(a.level - b.level) <= 1);
    }
  for (int id : tree.leaf_ids) {
    const BoxNode& b = tree.nodes[id];
    const bool meets_strip = (b.tag_gamma != Region::outside) && (b.tag_tilde != Region::inside);
    if (meets_strip) CHECK(b.diag() < 0.5 * strip.local_width(b.center));
  }
}
}  // namespace

TEST_CASE("box classification against the unit circle") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-8);
  CHECK(classify_box({{5.0, 5.0}, {6.0, 6.0}}, pan) == Region::outside);
  CHECK(classify_box({{-2.0, -2.0}, {2.0, 2.0}}, pan) == Region::cut);
  CHECK(classify_box({{-0.1, -0.1}, {0.1, 0.1}}, pan) == Region::inside);
  CHECK(classify_box({{0.9, -0.05}, {1.1, 0.05}}, pan) == Region::cut);
}

TEST_CASE("2d chebyshev coefficients: constants, coordinates, gaussian oracle") {
  const Box2 unit{{-1.0, -1.0}, {1.0, 1.0}};
  Eigen::MatrixXd C = cheb_coeffs_2d([](Vec2) { return 1.0; }, unit, 8);
  for (int my = 0; my <= 8; ++my)
    for (int mx = 0; mx <= 8; ++mx)
      CHECK(std::abs(C(my, mx) - ((my == 0 && mx == 0) ? 1.0 : 0.0)) < 1e-14);

  C = cheb_coeffs_2d([](Vec2 q) { return q.x; }, unit, 8);
  for (int my = 0; my <= 8; ++my)
    for (int mx = 0; mx <= 8; ++mx)
      CHECK(std::abs(C(my, mx) - ((my == 0 && mx == 1) ? 1.0 : 0.0)) < 1e-14);

  // Gaussian on the unit box vs slow projection through the Chebyshev
  // orthogonality integral (x = cos theta substitution, tensor GL in theta).
  auto gauss = [](Vec2 q) { return std::exp(-(q.x * q.x + q.y * q.y) / (2 * 0.25)); };
  const int p = 16;
  C = cheb_coeffs_2d(gauss, unit, p);
  Eigen::VectorXd qx, qw;
  gauss_legendre(120, qx, qw);
  for (int my = 0; my <= p; my += 5)
    for (int mx = 0; mx <= p; mx += 5) {
      double proj = 0.0;
      for (int i = 0; i < 120; ++i)
        for (int j = 0; j < 120; ++j) {
          const double tx = 0.5 * M_PI * (qx[j] + 1.0);
          const double ty = 0.5 * M_PI * (qx[i] + 1.0);
          proj += 0.25 * M_PI * M_PI * qw[i] * qw[j] *
                  gauss({std::cos(tx), std::cos(ty)}) * std::cos(mx * tx) * std::cos(my * ty);
        }
      proj *= (mx == 0 ? 1.0 : 2.0) * (my == 0 ? 1.0 : 2.0) / (M_PI * M_PI);
      CHECK(std::abs(C(my, mx) - proj) < 1e-11);  // interpolation aliases the 1e-12 tail
    }
}

TEST_CASE("zero source: refinement is purely strip-driven") {
  const StripRegion strip = circle_strip();
  TreeConfig cfg;
  cfg.eps = 1e-8;
  const TruncatedQuadtree tree = build_truncated_tree([](Vec2) { return 0.0; }, strip, cfg);
  CHECK(tree.leaf_count() > 4);
  check_balanced_and_strip(tree, strip);
  // No spanning leaves.
  for (int id : tree.leaf_ids) {
    const BoxNode& b = tree.nodes[id];
    CHECK(!(b.tag_tilde != Region::outside && b.tag_gamma != Region::inside));
  }
}

TEST_CASE("narrow gaussian drives depth near its center only") {
  const StripRegion strip = circle_strip();
  const double sigma = 1e-3;
  auto f = [=](Vec2 q) {
    return std::exp(-((q.x - 0.013) * (q.x - 0.013) + q.y * q.y) / (2 * sigma * sigma));
  };
  TreeConfig cfg;
  cfg.eps = 1e-8;
  const TruncatedQuadtree tree = build_truncated_tree(f, strip, cfg);
  const int at_center = tree.find_leaf({0.013, 0.0});
  REQUIRE(at_center >= 0);
  // Leaf size near the spike must resolve sigma; far leaves stay coarse.
  CHECK(tree.nodes[at_center].half < 8.0 * sigma);
  const int far = tree.find_leaf({-0.52, 0.1});
  CHECK(tree.nodes[far].half > 20.0 * sigma);
  check_balanced_and_strip(tree, strip);

  // Reconstruction on interior leaves: coefficients reproduce f to 10 eps.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int id : tree.leaf_ids) {
    const BoxNode& b = tree.nodes[id];
    if (b.tag_gamma != Region::inside || b.tag_tilde != Region::inside) continue;
    for (int s = 0; s < 5; ++s) {
      const Vec2 loc{U(rng), U(rng)};
      const Vec2 q{b.center.x + b.half * loc.x, b.center.y + b.half * loc.y};
      double acc = 0.0;
      Eigen::VectorXd tx(tree.order + 1), ty(tree.order + 1);
      for (int m = 0; m <= tree.order; ++m) {
        tx[m] = std::cos(m * std::acos(std::clamp(loc.x, -1.0, 1.0)));
        ty[m] = std::cos(m * std::acos(std::clamp(loc.y, -1.0, 1.0)));
      }
      for (int my = 0; my <= tree.order; ++my)
        for (int mx = 0; mx <= tree.order; ++mx) acc += b.coeff(my, mx) * ty[my] * tx[mx];
      CHECK(std::abs(acc - f(q)) <= 10.0 * cfg.eps * std::max(tree.fmax, 1.0));
    }
  }
}

TEST_CASE("balance is idempotent and repairs imposed gaps") {
  const StripRegion strip = circle_strip();
  auto f = [](Vec2 q) { return std::sin(3.0 * q.x) * q.y; };
  TreeConfig cfg;
  cfg.eps = 1e-6;
  TruncatedQuadtree tree = build_truncated_tree(f, strip, cfg);
  const std::size_t before = tree.nodes.size();
  balance_2to1(tree, f, strip);
  CHECK(tree.nodes.size() == before);
  check_balanced_and_strip(tree, strip);
}

TEST_CASE("determinism: identical inputs give identical trees") {
  const StripRegion strip = circle_strip();
  auto f = [](Vec2 q) { return std::exp(-q.norm2()); };
  TreeConfig cfg;
  cfg.eps = 1e-8;
  const TruncatedQuadtree t1 = build_truncated_tree(f, strip, cfg);
  const TruncatedQuadtree t2 = build_truncated_tree(f, strip, cfg);
  REQUIRE(t1.nodes.size() == t2.nodes.size());
  REQUIRE(t1.leaf_ids == t2.leaf_ids);
  for (std::size_t i = 0; i < t1.nodes.size(); ++i) {
    CHECK(t1.nodes[i].center.x == t2.nodes[i].center.x);
    CHECK(t1.nodes[i].level == t2.nodes[i].level);
    if (t1.nodes[i].coeff.size() > 0)
      CHECK((t1.nodes[i].coeff - t2.nodes[i].coeff).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("leaf count is stable under root translation") {
  const StripRegion strip = circle_strip();
  auto f = [](Vec2 q) { return std::cos(2.0 * q.x) + q.y; };
  TreeConfig cfg;
  cfg.eps = 1e-7;
  const TruncatedQuadtree t1 = build_truncated_tree(f, strip, cfg);
  const Box2 rb = t1.nodes[0].box();
  const double side = rb.hi.x - rb.lo.x;
  Box2 shifted = rb;
  shifted.lo.x += 0.07 * side;
  shifted.hi.x += 0.07 * side;
  shifted.lo.y -= 0.04 * side;
  shifted.hi.y -= 0.04 * side;
  const TruncatedQuadtree t2 = build_truncated_tree(f, strip, cfg, shifted);
  const double ratio = static_cast<double>(t2.leaf_count()) / t1.leaf_count();
  CHECK(ratio < 1.5);
  CHECK(ratio > 1.0 / 1.5);
}

TEST_CASE("truncation faces stay separated from the fictitious curve") {
  const StripRegion strip = circle_strip();
  auto f = [](Vec2 q) { return 1.0 + q.x; };
  TreeConfig cfg;
  cfg.eps = 1e-8;
  const TruncatedQuadtree tree = build_truncated_tree(f, strip, cfg);
  for (const Vec2& q : strip.gamma_tilde.all_nodes()) {
    const double s = strip.local_width(q);
    for (int id : tree.leaf_ids) {
      const BoxNode& b = tree.nodes[id];
      if (b.tag_gamma != Region::outside) continue;  // truncated boxes only
      CHECK(std::sqrt(b.box().dist2(q)) >= 0.25 * s);
    }
  }
}

TEST_CASE("raindrop tree matches the reference leaf count") {
  const Panelization pan = adaptive_panelize(raindrop_map(1e-3), kit16(), 1e-10);
  const StripRegion strip = build_fictitious_curve(pan, build_width_function(pan));
  // The reference inhomogeneity: gaussians clustering into the cusp plus a
  // smooth background (the solution's laplacian; here only refinement
  // behavior matters).
  auto f = [](Vec2 q) {
    double v = 2.0 * q.x * std::cos(3.0 * M_PI * q.y);
    double d = 0.05;
    for (int i = 0; i < 8; ++i) {
      const double s = 0.3 * d;
      const Vec2 c{0.0, -1e-3 - d};
      const double r2 = (q - c).norm2();
      v += std::exp(-r2 / (2 * s * s)) / (s * s);
      d *= 0.45;
    }
    return v;
  };
  TreeConfig cfg;
  cfg.eps = 1e-10;
  const TruncatedQuadtree tree = build_truncated_tree(f, strip, cfg);
  const int leaves = tree.contributing_leaf_count();
  CHECK(leaves >= 2965 / 2);
  CHECK(leaves <= 2965 * 2);
}
