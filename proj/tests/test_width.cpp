#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "quadstrip/width.hpp"

using namespace quadstrip;

namespace {
std::shared_ptr<const SpectralKit> kit16() {
  static auto kit = std::make_shared<const SpectralKit>(build_spectral_kit(16));
  return kit;
}

Panelization circle_blocks(double r, const std::vector<double>& arcs) {
  // Panels covering angles proportional to arcs (scaled to 2*pi total).
  double total = 0;
  for (double a : arcs) total += a;
  auto kit = kit16();
  std::vector<std::vector<Vec2>> nodes;
  double th0 = 0.0;
  for (double a : arcs) {
    const double th1 = th0 + 2.0 * M_PI * a / total;
    std::vector<Vec2> pn(17);
    for (int j = 0; j <= 16; ++j) {
      const double th = 0.5 * (th0 + th1) + 0.5 * (th1 - th0) * kit->nodes[j];
      pn[j] = {r * std::cos(th), r * std::sin(th)};
    }
    nodes.push_back(pn);
    th0 = th1;
  }
  return Panelization::from_nodes(kit, nodes);
}
}  // namespace

TEST_CASE("softplus closed forms and asymptotes") {
  CHECK(softplus(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(softplus(100.0, 1.0) - 100.0) < 1e-12);
  CHECK(softplus(-100.0, 1.0) == doctest::Approx(std::exp(-100.0)).epsilon(1e-12));
  CHECK(softplus(-100.0, 1.0) < 1e-40);
  CHECK_THROWS(softplus(1.0, -2.0));
}

TEST_CASE("uniform circle panelization gives a constant width") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const WidthFunction h = build_width_function(pan);
  const double a = pan.panel(0).arclen;
  for (int i = 0; i < 400; ++i) {
    const double t = pan.perimeter() * i / 400.0;
    CHECK(h(t) == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("two-scale blocks: monotone transitions, bounded plateaus") {
  std::vector<double> arcs;
  for (int i = 0; i < 12; ++i) arcs.push_back(1.0);
  for (int i = 0; i < 6; ++i) arcs.push_back(2.0);
  const Panelization pan = circle_blocks(1.0, arcs);
  const WidthFunction h = build_width_function(pan);
  const double a = pan.panel(0).arclen;  // small block size

  // Plateau checks away from the two transitions.
  const double L = pan.perimeter();
  auto t_of_panel = [&](int k, double frac) {
    return pan.panel(k).offset + frac * pan.panel(k).arclen;
  };
  for (int k : {3, 4, 5, 6, 7, 8}) {
    const double v = h(t_of_panel(k, 0.5));
    CHECK(v > 0.8 * a);
    CHECK(v < 1.2 * 2 * a);
  }
  for (int k : {14, 15}) {
    const double v = h(t_of_panel(k, 0.5));
    CHECK(v > 0.8 * a);
    CHECK(v < 1.2 * 2 * a);
  }

  // Monotone through the transition zone around the size change at panel 12.
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i)
    ts.push_back(t_of_panel(10, 0.5) + (t_of_panel(13, 0.5) - t_of_panel(10, 0.5)) * i / 100.0);
  // Monotone up to the neighbor-sum truncation level (measured wiggle is
  // ~2e-4 of the local scale; the transition amplitude is a).
  int bad = 0;
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (h(ts[i]) < h(ts[i - 1]) - 1e-3 * a) ++bad;
  CHECK(bad == 0);
  (void)L;
}

TEST_CASE("width function is numerically C1 at panel junctions") {
  const Panelization pan = adaptive_panelize(raindrop_map(1e-2), kit16(), 1e-8);
  const WidthFunction h = build_width_function(pan);
  double max_slope = 0.0;
  for (int k = 0; k < pan.panel_count(); ++k) {
    const double d = 3e-6 * pan.panel(k).arclen;
    const double A = pan.panel(k).offset;
    max_slope = std::max(max_slope, std::abs((h(A + d) - h(A - d)) / (2 * d)));
  }
  // Second-order one-sided differences keep the step large enough to stay
  // above the FD roundoff floor.
  for (int k = 0; k < pan.panel_count(); ++k) {
    const double d = 3e-6 * pan.panel(k).arclen;
    const double A = pan.panel(k).offset;
    const double right = (4 * h(A + d / 2) - h(A + d) - 3 * h(A)) / d;
    const double left = (3 * h(A) + h(A - d) - 4 * h(A - d / 2)) / d;
    CHECK(std::abs(left - right) < 1e-6 * std::max(max_slope, 1.0));
  }
}

TEST_CASE("width stays commensurate with local panel size") {
  for (double eta : {1e-1, 1e-3}) {
    const Panelization pan = adaptive_panelize(raindrop_map(eta), kit16(), 1e-8);
    const WidthFunction h = build_width_function(pan);
    for (int k = 0; k < pan.panel_count(); ++k) {
      const double a0 = h.averaged_size(k);
      const double a1 = h.averaged_size((k + 1) % pan.panel_count());
      for (int i = 0; i < 10 * 17; ++i) {
        const double t = pan.panel(k).offset + pan.panel(k).arclen * i / (10.0 * 17.0);
        const double v = h(t);
        CHECK(v >= 0.25 * std::min(a0, a1));
        CHECK(v <= 4.0 * std::max(a0, a1));
      }
    }
  }
}

TEST_CASE("width function resolves on every panel (smoothness)") {
  const Panelization pan = adaptive_panelize(raindrop_map(1e-3), kit16(), 1e-10);
  const WidthFunction h = build_width_function(pan);
  const SpectralKit& kit = pan.kit();
  int fails = 0;
  for (int k = 0; k < pan.panel_count(); ++k) {
    std::vector<double> vals(3 * 17);
    for (int i = 0; i < 3 * 17; ++i) {
      const double t =
          pan.panel(k).offset + 0.5 * (1.0 + kit.fit_nodes[i]) * pan.panel(k).arclen;
      vals[i] = h(t);
    }
    if (!resolution_check(vals, kit, 1e-8)) ++fails;
  }
  CHECK(fails == 0);

  // Raindrop width spans roughly three orders of magnitude.
  double hmin = 1e300, hmax = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double v = h(pan.perimeter() * i / 2000.0);
    hmin = std::min(hmin, v);
    hmax = std::max(hmax, v);
  }
  CHECK(hmax / hmin > 100.0);
  CHECK(hmax / hmin < 1e5);
}

TEST_CASE("constant offset of a circle is a circle") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const WidthFunction h = WidthFunction::constant(0.1, pan.perimeter());
  const StripRegion strip = build_fictitious_curve(pan, h);
  CHECK(std::abs(strip.gamma_tilde.perimeter() - 2.0 * M_PI * 0.9) < 1e-8);
  for (int k = 0; k < strip.gamma_tilde.panel_count(); ++k)
    for (const Vec2& v : strip.gamma_tilde.panel(k).node)
      CHECK(std::abs(v.norm() - 0.9) < 1e-12);

  // Node matching is exact by construction.
  for (int k = 0; k < pan.panel_count(); ++k)
    for (int j = 0; j <= 16; ++j) {
      const Vec2 expect = pan.panel(k).node[j] - 0.1 * pan.panel(k).normal[j];
      CHECK(dist(strip.gamma_tilde.panel(k).node[j], expect) < 1e-15);
    }
}

TEST_CASE("absurd width is rejected") {
  const Panelization pan = adaptive_panelize(circle_map(), kit16(), 1e-10);
  const WidthFunction h = WidthFunction::constant(1.5, pan.perimeter());
  CHECK_THROWS_WITH_AS(static_cast<void>(build_fictitious_curve(pan, h)),
                       doctest::Contains("folds"), std::runtime_error);
}

TEST_CASE("raindrop strip: simple, separated, resolved") {
  const Panelization pan = adaptive_panelize(raindrop_map(1e-3), kit16(), 1e-10);
  const WidthFunction h = build_width_function(pan);
  const StripRegion strip = build_fictitious_curve(pan, h);
  const Panelization& G = strip.gamma_tilde;
  CHECK(G.panel_count() == pan.panel_count());

  // min distance(Gamma, Gamma~) >= 0.5 min h (node-distance scan).
  double hmin = 1e300;
  for (double v : strip.node_width) hmin = std::min(hmin, v);
  double dmin = 1e300;
  for (const Vec2& v : pan.all_nodes()) dmin = std::min(dmin, G.node_tree().nearest_dist(v));
  CHECK(dmin >= 0.5 * hmin);

  // Level restriction with offset-distortion slack.
  for (int k = 0; k < G.panel_count(); ++k) {
    const double r = G.panel(k).arclen / G.panel((k + 1) % G.panel_count()).arclen;
    CHECK(r < 3.0);
    CHECK(r > 1.0 / 3.0);
  }

  // Position monitor of the fictitious curve resolves at the solver
  // tolerance.
  int fails = 0;
  for (int k = 0; k < G.panel_count(); ++k) {
    std::vector<double> fx(17), fy(17);
    for (int j = 0; j <= 16; ++j) {
      fx[j] = G.panel(k).node[j].x;
      fy[j] = G.panel(k).node[j].y;
    }
    if (!resolution_check_nodal(fx, G.kit(), 1e-7)) ++fails;
    if (!resolution_check_nodal(fy, G.kit(), 1e-7)) ++fails;
  }
  CHECK(fails == 0);
}
