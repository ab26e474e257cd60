#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "quadstrip/boundary.hpp"

using namespace quadstrip;

namespace {
std::shared_ptr<const SpectralKit> kit16() {
  static auto kit = std::make_shared<const SpectralKit>(build_spectral_kit(16));
  return kit;
}
}  // namespace

TEST_CASE("circle panelizes uniformly and integrates exactly") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const int n = pan.panel_count();
  CHECK(std::abs(pan.perimeter() - 2.0 * M_PI) < 1e-10);
  for (int k = 0; k < n; ++k)
    CHECK(pan.panel(k).arclen == doctest::Approx(2.0 * M_PI / n).epsilon(1e-10));

  // Quadrature (arc-length rule): integral of 1 is L, of x^2 is pi.
  double qi = 0.0, qx2 = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= 16; ++j) {
      qi += pan.panel(k).weight[j];
      qx2 += pan.panel(k).weight[j] * pan.panel(k).node[j].x * pan.panel(k).node[j].x;
    }
  CHECK(std::abs(qi - pan.perimeter()) < 1e-12);
  CHECK(std::abs(qx2 - M_PI) < 1e-12);

  // Speed of the unit-circle parametrization is 1, but panels are built on
  // their own [-1,1] charts; compare against the analytic arc-length rate.
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= 16; ++j) {
      const double expected = pan.panel(k).arclen / 2.0;
      CHECK(std::abs(pan.panel(k).speed[j] - expected) < 1e-10);
      // Outward normal of a circle is the position itself.
      CHECK(std::abs(pan.panel(k).normal[j].x - pan.panel(k).node[j].x) < 1e-10);
      CHECK(std::abs(pan.panel(k).normal[j].y - pan.panel(k).node[j].y) < 1e-10);
      CHECK(std::abs(pan.panel(k).normal[j].norm() - 1.0) < 1e-14);
      CHECK(std::abs(pan.panel(k).curv[j] - 1.0) < 1e-8);
    }
}

TEST_CASE("arc-length chart interpolates nodes and wraps") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const double L = pan.perimeter();

  // Chart starts at the first panel's start (angle 0 for the circle map);
  // a quarter perimeter later we must sit at angle pi/2.
  const Vec2 q = pan.chart(L / 4.0);
  CHECK(std::abs(q.x - 0.0) < 1e-10);
  CHECK(std::abs(q.y - 1.0) < 1e-10);

  for (int k = 0; k < pan.panel_count(); k += 3)
    for (int j = 0; j <= 16; j += 5) {
      const Vec2 x = pan.chart(pan.panel(k).offset + pan.panel(k).arc[j]);
      CHECK(dist(x, pan.panel(k).node[j]) < 1e-10 * L);
    }

  const Vec2 a0 = pan.chart(0.0);
  const Vec2 aL = pan.chart(L);
  CHECK(dist(a0, aL) < 1e-12);
}

TEST_CASE("raindrop panel count matches the reference discretization") {
  const Panelization pan = adaptive_panelize(raindrop_map(1e-3), kit16(), 1e-10);
  CHECK(pan.panel_count() >= 28);
  CHECK(pan.panel_count() <= 112);

  // The smallest panels cluster at the rounded cusp near (0, -eta).
  int kmin = 0;
  for (int k = 1; k < pan.panel_count(); ++k)
    if (pan.panel(k).arclen < pan.panel(kmin).arclen) kmin = k;
  const Vec2 tip{0.0, -1e-3};
  double d = 1e300;
  for (const Vec2& v : pan.panel(kmin).node) d = std::min(d, dist(v, tip));
  CHECK(d < 0.05);
  pan.validate();
}

TEST_CASE("ellipse obeys the level restriction") {
  const Panelization pan = adaptive_panelize(ellipse_map(2.0, 1.0), kit16(), 1e-10);
  const int n = pan.panel_count();
  for (int k = 0; k < n; ++k) {
    const double r = pan.panel(k).arclen / pan.panel((k + 1) % n).arclen;
    CHECK(r <= 2.0 + 1e-9);
    CHECK(r >= 0.5 - 1e-9);
  }
}

TEST_CASE("separation rule holds for re-entrant pairs after post-processing") {
  // 3:1 ellipse has non-trivial clearances; scan every non-neighboring pair.
  const Panelization pan = adaptive_panelize(ellipse_map(3.0, 1.0), kit16(), 1e-8);
  const int n = pan.panel_count();
  for (int k = 0; k < n; ++k)
    for (int j = k + 2; j < n; ++j) {
      if (k == 0 && j == n - 1) continue;
      const double d = panel_distance(pan, k, j);
      const double amin = std::min(pan.panel(k).arclen, pan.panel(j).arclen);
      const double gap = panel_arc_gap(pan, k, j);
      if (d < 0.7 * gap) CHECK(d > 3.0 * amin);
    }
}

TEST_CASE("panel distance agrees with brute force and is deterministic") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const int n = pan.panel_count();
  const int opposite = n / 2;
  const double d = panel_distance(pan, 0, opposite);
  double brute = 1e300;
  for (const Vec2& a : pan.panel(0).node)
    for (const Vec2& b : pan.panel(opposite).node) brute = std::min(brute, dist(a, b));
  CHECK(d == brute);
  CHECK(d == panel_distance(pan, 0, opposite));
  CHECK(d > 2.0 - 2.0 * std::pow(pan.panel(0).arclen, 2));
  CHECK(d <= 2.0);
}

TEST_CASE("bisecting a resolved panel keeps monitors resolved") {
  const Panelization pan = adaptive_panelize(ellipse_map(2.0, 1.0), kit16(), 1e-8);
  const Panelization fine = split_panels(pan, {0, 3});
  fine.validate();
  // Position monitor on every panel of the refined set.
  for (int k = 0; k < fine.panel_count(); ++k) {
    std::vector<double> fx(17), fy(17);
    for (int j = 0; j <= 16; ++j) {
      fx[j] = fine.panel(k).node[j].x;
      fy[j] = fine.panel(k).node[j].y;
    }
    CHECK(resolution_check_nodal(fx, fine.kit(), 1e-8));
    CHECK(resolution_check_nodal(fy, fine.kit(), 1e-8));
  }
}

TEST_CASE("node file round-trips bit-exactly") {
  const Panelization pan = adaptive_panelize(star_map(), kit16(), 1e-8);
  const std::string path = "nodes_roundtrip.txt";
  save_nodes(path, pan);
  const Panelization back = load_nodes(path);
  REQUIRE(back.panel_count() == pan.panel_count());
  for (int k = 0; k < pan.panel_count(); ++k)
    for (int j = 0; j <= 16; ++j) {
      CHECK(back.panel(k).node[j].x == pan.panel(k).node[j].x);
      CHECK(back.panel(k).node[j].y == pan.panel(k).node[j].y);
    }
  std::remove(path.c_str());
}

TEST_CASE("inside test via the classification polyline") {
  const Panelization pan = adaptive_panelize(star_map(), kit16(), 1e-8);
  CHECK(pan.inside({0.0, 0.0}));
  CHECK_FALSE(pan.inside({2.0, 2.0}));
  CHECK(pan.inside({0.0, 0.5}));
}
