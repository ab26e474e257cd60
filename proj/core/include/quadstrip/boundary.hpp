#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quadstrip/spectral.hpp"
#include "quadstrip/util.hpp"

namespace quadstrip {

/// Parametric closed curve, t in [0, 2*pi).
using CurveMap = std::function<Complex(double)>;

/// One order-p Gauss-Legendre panel of a closed curve.
struct Panel {
  std::vector<Vec2> node;       // p+1 nodes
  std::vector<Vec2> deriv;      // d(node)/dt on the panel-standard interval [-1,1]
  std::vector<double> speed;    // s_j = |deriv_j|
  std::vector<double> weight;   // w_j = W_j * s_j (arc-length quadrature)
  std::vector<Vec2> normal;     // outward unit normals
  std::vector<double> curv;     // signed curvature at nodes
  std::vector<double> arc;      // within-panel arc-length coordinates, arc(t=-1) = 0
  std::vector<double> chart_w;  // barycentric weights over arc (for the chart)
  double arclen = 0.0;          // a_k
  double offset = 0.0;          // A_k, global arc-length start
  Vec2 ep0, ep1;                // interpolated endpoints at t = -1, +1
  Box2 bbox;                    // bounding box of the nodes
  double t0 = 0.0, t1 = 0.0;    // source parameter interval when map-built
};

/// Ordered panels of a closed counterclockwise curve plus the derived
/// arc-length chart. Immutable after construction.
class Panelization {
 public:
  Panelization() = default;

  /// Equip raw per-panel node sets (panel-ordered around a closed curve).
  /// endpoint_tol_rel scales the shared-endpoint check: derived curves such
  /// as the fictitious boundary carry the width function's resolution in
  /// their endpoints and need more room than the 1e-12*L default.
  static Panelization from_nodes(std::shared_ptr<const SpectralKit> kit,
                                 const std::vector<std::vector<Vec2>>& panel_nodes,
                                 double endpoint_tol_rel = 1e-12, double level_bound = 0.0);

  int order() const { return kit_->order; }
  int panel_count() const { return static_cast<int>(panels_.size()); }
  double perimeter() const { return perimeter_; }
  const Panel& panel(int k) const { return panels_[k]; }
  const SpectralKit& kit() const { return *kit_; }
  std::shared_ptr<const SpectralKit> kit_ptr() const { return kit_; }

  int node_count() const { return panel_count() * (order() + 1); }
  const Vec2& node(int flat) const;
  const std::vector<Vec2>& all_nodes() const { return flat_nodes_; }
  const KdTree2& node_tree() const { return node_tree_; }

  /// Global arc-length chart Lambda(a); a is wrapped periodically into [0,L).
  Vec2 chart(double a) const;

  /// Upsampled closed node polyline used for winding and cut tests.
  const std::vector<Vec2>& classify_polyline() const { return polyline_; }
  bool inside(const Vec2& p) const { return point_in_polygon(polyline_, p); }
  const Box2& bbox() const { return bbox_; }

  /// Throws std::runtime_error when a structural invariant fails.
  /// level_bound <= 0 means the builder's default neighbor arc-ratio bound;
  /// offset-derived curves pass a larger bound to absorb normal-offset
  /// distortion.
  void validate(double endpoint_tol_rel = 1e-12, double level_bound = 0.0) const;

 private:
  friend class PanelWorkset;
  std::shared_ptr<const SpectralKit> kit_;
  std::vector<Panel> panels_;
  std::vector<Vec2> flat_nodes_;
  std::vector<Vec2> polyline_;
  KdTree2 node_tree_;
  Box2 bbox_;
  double perimeter_ = 0.0;
};

struct PanelizeOptions {
  int initial_panels = 8;
  int max_panels = 100000;
  double separation_factor = 3.0;  // non-neighbor clearance in smaller-panel lengths
  double reentrant_slack = 0.7;    // pairs with dist >= slack * along-curve gap are exempt
};

/// Adaptive panelization of a smooth closed curve: refine until the monitor
/// functions (position, speed, bending energy density) pass the tail test at
/// eps, then enforce non-neighbor separation and the 2:1 level restriction.
Panelization adaptive_panelize(const CurveMap& z, std::shared_ptr<const SpectralKit> kit,
                               double eps, const PanelizeOptions& opts = {});

/// Minimum node-to-node distance between two panels (exact on the node sets,
/// a conservative underestimate of the true panel distance).
double panel_distance(const Panelization& pan, int k1, int k2);

/// Arc-length separation between the facing endpoints of panels k1 and k2,
/// minimized over the two ways around the closed curve.
double panel_arc_gap(const Panelization& pan, int k1, int k2);

// Built-in analytic generators.
CurveMap circle_map(double radius = 1.0, Vec2 center = {0.0, 0.0});
CurveMap ellipse_map(double rx, double ry);
CurveMap star_map(int arms = 5, double amplitude = 0.3, double radius = 1.0);
CurveMap raindrop_map(double eta);

/// Bisect the listed panels, using the source map when provided and panel
/// polynomial interpolation otherwise, then re-enforce separation and level
/// restriction. Used by the strip-resolution restart.
Panelization split_panels(const Panelization& pan, const std::vector<int>& panel_ids,
                          const CurveMap* map = nullptr, const PanelizeOptions& opts = {});

/// Plain-text node file: "p n_panel" header then one "x y" line per node in
/// panel order, printed with enough digits to round-trip bit-exactly.
void save_nodes(const std::string& path, const Panelization& pan);
Panelization load_nodes(const std::string& path);

}  // namespace quadstrip
