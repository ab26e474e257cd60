#pragma once

#include "quadstrip/boundary.hpp"

namespace quadstrip {

/// Overflow-safe softplus (1/beta) * log(1 + exp(beta*t)).
double softplus(double t, double beta);

struct WidthFunctionConfig {
  int neighbor_radius = 2;      // K: endpoint sizes average over the 2K panels at each kink
  double blend_divisor = 8.0;   // retained for schema compatibility (see width.cpp)
  double bump_sharpness = 30.0; // retained for schema compatibility (see width.cpp)
};

/// Smooth positive width h(t) on the arc-length circle [0,L), adapted to
/// local panel size. Built as the piecewise-linear interpolant of the
/// 2K-averaged panel sizes with every kink rounded by a softplus of
/// panel-commensurate scale; the kink corrections telescope exactly, so the
/// evaluation is a single analytic sum (see build_width_function).
class WidthFunction {
 public:
  double operator()(double t) const;

  /// Constant width (testing and simple annulus setups).
  static WidthFunction constant(double value, double length);

  int kink_count() const { return static_cast<int>(raw_.size()); }
  double perimeter() const { return length_; }
  double averaged_size(int k) const { return avg_[k]; }
  const WidthFunctionConfig& config() const { return cfg_; }

 private:
  friend WidthFunction build_width_function(const Panelization&, const WidthFunctionConfig&);

  WidthFunctionConfig cfg_;
  double length_ = 0.0;
  std::vector<double> offsets_;  // A_k
  std::vector<double> raw_;      // panel sizes a_k
  std::vector<double> avg_;      // 2K-averaged endpoint sizes
  std::vector<double> slope_;    // m_k = (avg_{k+1}-avg_k)/a_k
  std::vector<double> dslope_;   // slope jumps m_k - m_{k-1} at kink k
  std::vector<double> beta_;     // softplus rounding scales at kinks
};

WidthFunction build_width_function(const Panelization& pan, const WidthFunctionConfig& cfg = {});

/// The strip between the boundary and its inward normal offset.
struct StripRegion {
  Panelization gamma;        // outer curve
  Panelization gamma_tilde;  // fictitious inner curve, node-matched to gamma
  WidthFunction width;
  std::vector<double> node_width;  // h at every gamma node (flat indexing)
  std::vector<double> mid_width;   // strip width at each panel midpoint

  int panel_count() const { return gamma.panel_count(); }

  /// Distance between the matched node pair nearest to p; the local strip
  /// width lookup used by the quadtree truncation criterion.
  double local_width(const Vec2& p) const;
};

/// Displace every node inward by h along the outward normal and re-equip the
/// result as a panelization. Throws when the offset curve inverts or
/// self-intersects (names the offending panels).
StripRegion build_fictitious_curve(const Panelization& pan, const WidthFunction& h);

}  // namespace quadstrip
