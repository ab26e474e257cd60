#pragma once

#include <span>

#include "quadstrip/quadtree.hpp"

namespace quadstrip {

struct VolumeQuadParams {
  double eps_quad = 1e-10;   // target relative accuracy of the quadrature
  int polar_angular = 12;    // GL nodes per triangle arc in the polar rule
  int polar_radial = 8;      // GL nodes per dyadic radial interval
  int max_depth = 30;        // near-field subdivision cap
  double mac = 3.0;          // fast path opens boxes closer than mac * half
  int multipole_terms = 0;   // 0: derive from eps_quad
};

/// Decay-rate fit of the Chebyshev coefficients of v_bulk along one
/// fictitious panel (the truncation smoothness check).
struct PanelDecay {
  double rho_value = 0.0;     // fitted geometric rate of the values
  double rho_gradient = 0.0;  // same for the tangential derivative
  bool floor_limited = false; // coefficients hit roundoff before the window
  double floor_level = 0.0;
};

/// Evaluates the truncated free-space volume potential
///   v(x) = -\int Phi(x,y) f(y) dy,  Phi = (1/2pi) log(1/|x-y|)
/// from the per-leaf Chebyshev data of a truncated quadtree. Far leaves use
/// their tensor Gauss rules; near leaves are integrated in polar coordinates
/// around the target with dyadic radial refinement (the log singularity is
/// integrable). Evaluation order is fixed, so results are deterministic.
class VolumePotentialEvaluator {
 public:
  VolumePotentialEvaluator(const TruncatedQuadtree& tree, VolumeQuadParams params = {});

  const TruncatedQuadtree& tree() const { return *tree_; }
  const VolumeQuadParams& params() const { return params_; }

  /// Direct summation over all contributing leaves.
  double eval(const Vec2& x) const;
  Vec2 grad(const Vec2& x) const;
  std::vector<double> eval_direct(std::span<const Vec2> targets) const;

  /// Hierarchical (treecode) evaluation; agrees with eval_direct to a few
  /// eps_quad and falls back to it (with a log line) when the tree is too
  /// small to help.
  std::vector<double> eval_fast(std::span<const Vec2> targets) const;
  double eval_fast_one(const Vec2& x) const;
  Vec2 grad_fast(const Vec2& x) const;

  /// Max relative deviation of the leaf-local spectral Laplacian of v from
  /// f on the leaf grid. Refuses leaves that are not fully inside the
  /// fictitious domain.
  double residual_on_leaf(int leaf_id, const ScalarField& f) const;

  /// Contribution of a single leaf to v(x) (used by tests and oracles).
  double leaf_contribution(int leaf_id, const Vec2& x) const;

 private:
  struct LeafRule {
    int node_id = 0;
    std::vector<Vec2> pts;       // tensor Gauss points on the leaf
    std::vector<double> charge;  // weight * f-hat at the point
    double abs_charge = 0.0;
    Vec2 center;
    double half = 0.0;
  };

  struct Cell {
    Vec2 center;
    double half;
    Box2 box() const {
      return {{center.x - half, center.y - half}, {center.x + half, center.y + half}};
    }
    bool contains(const Vec2& p) const {
      return p.x >= center.x - half && p.x < center.x + half && p.y >= center.y - half &&
             p.y < center.y + half;
    }
  };
  double near_value(const LeafRule& lr, const BoxNode& b, const Vec2& x) const;
  Vec2 near_grad(const BoxNode& b, const Vec2& x) const;
  double polar_cell_value(const BoxNode& b, const Cell& cell, const Vec2& x,
                          double tol_abs) const;
  double gl_cell_value(const BoxNode& b, const Cell& cell, const Vec2& x) const;
  Vec2 polar_cell_grad(const BoxNode& b, const Cell& cell, const Vec2& x) const;
  Vec2 gl_cell_grad(const BoxNode& b, const Cell& cell, const Vec2& x) const;
  double cheb_at(const BoxNode& b, const Vec2& q) const;

  void build_multipoles() const;

  const TruncatedQuadtree* tree_;
  VolumeQuadParams params_;
  std::vector<LeafRule> rules_;       // contributing leaves, deterministic order
  std::vector<int> rule_of_node_;     // node id -> rule index or -1
  int terms_ = 30;
  mutable std::vector<std::vector<Complex>> multipole_;  // per node, lazy
  mutable bool multipoles_built_ = false;
};

/// Fit the per-panel Chebyshev decay rates of v_bulk (values and tangential
/// derivative) on every panel of the fictitious curve, sampling at n_max+1
/// Chebyshev parameters through each panel chart.
std::vector<PanelDecay> verify_geometric_decay(const VolumePotentialEvaluator& ev,
                                               const StripRegion& strip, int n_max = 32);

}  // namespace quadstrip
