#include "quadstrip/width.hpp"

#include <cmath>
#include <sstream>

namespace quadstrip {

double softplus(double t, double beta) {
  if (beta <= 0) throw std::invalid_argument("softplus: beta must be positive");
  const double bt = beta * t;
  if (bt > 30.0) return t + std::exp(-bt) / beta;
  if (bt < -30.0) return std::exp(bt) / beta;
  return std::log1p(std::exp(bt)) / beta;
}

namespace {

int wrap(int k, int n) {
  k %= n;
  return k < 0 ? k + n : k;
}

// Rounding deviation softplus(x) - max(x, 0): the amount a softplus kink
// differs from the sharp one; decays like exp(-beta*|x|)/beta on both sides.
double round_dev(double x, double beta) {
  const double bx = beta * x;
  if (bx > 36.0) return std::exp(-bx) / beta;
  if (bx < -36.0) return std::exp(bx) / beta;
  return softplus(x, beta) - std::max(x, 0.0);
}

}  // namespace

// Log-width of the rounded size interpolant: the piecewise-linear
// interpolant of log(averaged size), with every kink i replaced by its
// softplus rounding. Writing the rounded function as
// pwlin(t) + sum_i dslope_i * (softplus(t-A_i) - max(t-A_i, 0)) makes the
// corrections decay away from each kink on BOTH sides, so the full sum over
// kinks evaluates the globally smooth function exactly. Working in log
// space keeps the long exponential tails of coarse kinks multiplicative: on
// geometries whose panel sizes span several decades, additive tails from
// the large-panel side otherwise overwhelm (and can negate) the width in
// the fine regions.
double WidthFunction::operator()(double t) const {
  const int n = kink_count();
  double tw = std::fmod(t, length_);
  if (tw < 0) tw += length_;
  int lo = 0, hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (offsets_[mid] <= tw) lo = mid; else hi = mid;
  }
  double g = std::log(avg_[lo]) + slope_[lo] * (tw - offsets_[lo]);
  for (int i = 0; i < n; ++i) {
    if (dslope_[i] == 0.0) continue;
    // Nearest periodic image of kink i.
    double dt = tw - offsets_[i];
    if (dt > 0.5 * length_) dt -= length_;
    if (dt < -0.5 * length_) dt += length_;
    if (std::abs(dt) * beta_[i] > 40.0) continue;
    g += dslope_[i] * round_dev(dt, beta_[i]);
  }
  return std::exp(g);
}

WidthFunction WidthFunction::constant(double value, double length) {
  if (value <= 0 || length <= 0)
    throw std::invalid_argument("WidthFunction::constant: value and length must be positive");
  WidthFunction h;
  h.length_ = length;
  const int n = 8;
  for (int k = 0; k < n; ++k) {
    h.offsets_.push_back(length * k / n);
    h.raw_.push_back(length / n);
    h.avg_.push_back(value);
    h.slope_.push_back(0.0);
    h.dslope_.push_back(0.0);
    h.beta_.push_back(16.0 / length);
  }
  return h;
}

WidthFunction build_width_function(const Panelization& pan, const WidthFunctionConfig& cfg) {
  if (cfg.neighbor_radius < 1 || cfg.neighbor_radius > 5)
    throw std::invalid_argument("width function: neighbor radius K must be in [1,5]");

  const int n = pan.panel_count();
  WidthFunction h;
  h.cfg_ = cfg;
  h.length_ = pan.perimeter();
  h.offsets_.resize(n);
  h.raw_.resize(n);
  for (int k = 0; k < n; ++k) {
    h.offsets_[k] = pan.panel(k).offset;
    h.raw_[k] = pan.panel(k).arclen;
  }

  // Endpoint sizes: centered mean of the 2K panels around each kink (the
  // averaging window shrinks on very coarse panelizations).
  const int K = std::max(1, std::min(cfg.neighbor_radius, (n - 1) / 2));
  h.avg_.resize(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = k - K; j <= k + K - 1; ++j) s += h.raw_[wrap(j, n)];
    h.avg_[k] = s / (2 * K);
  }

  // Slopes of the piecewise-linear interpolant through (A_k, log avg_k);
  // runs are the raw panel lengths so the chain stays continuous.
  h.slope_.resize(n);
  h.dslope_.resize(n);
  h.beta_.resize(n);
  for (int k = 0; k < n; ++k)
    h.slope_[k] = (std::log(h.avg_[wrap(k + 1, n)]) - std::log(h.avg_[k])) / h.raw_[k];
  for (int k = 0; k < n; ++k) {
    h.dslope_[k] = h.slope_[k] - h.slope_[wrap(k - 1, n)];
    // Rounding scale from the smaller adjacent panel (equals the paper's
    // pair-average on uniform chains). The pair-average reach of a kink
    // between two large panels extends far down a geometrically graded
    // chain and can drag h negative there.
    h.beta_[k] = 2.0 / std::min(h.raw_[wrap(k - 1, n)], h.raw_[k]);
  }
  return h;
}

double StripRegion::local_width(const Vec2& p) const {
  const std::size_t i = gamma.node_tree().nearest(p);
  return node_width[i];
}

StripRegion build_fictitious_curve(const Panelization& pan, const WidthFunction& h) {
  const int n = pan.panel_count();
  const int p = pan.order();

  StripRegion strip;
  strip.gamma = pan;
  strip.width = h;
  strip.node_width.reserve(n * (p + 1));
  strip.mid_width.reserve(n);

  std::vector<std::vector<Vec2>> tilde_nodes(n, std::vector<Vec2>(p + 1));
  for (int k = 0; k < n; ++k) {
    const Panel& P = pan.panel(k);
    for (int j = 0; j <= p; ++j) {
      const double t = P.offset + P.arc[j];
      const double hv = h(t);
      if (hv <= 0) throw std::runtime_error("width function non-positive");
      // Local turning: the normal offset map is orientation-preserving only
      // while 1 - h*kappa > 0.
      if (1.0 - hv * P.curv[j] <= 0.0) {
        std::ostringstream os;
        os << "fictitious curve folds at panel " << k << " node " << j
           << " (1 - h*kappa = " << 1.0 - hv * P.curv[j] << ")";
        throw std::runtime_error(os.str());
      }
      strip.node_width.push_back(hv);
      tilde_nodes[k][j] = P.node[j] - hv * P.normal[j];
    }
    strip.mid_width.push_back(h(P.offset + 0.5 * P.arclen));
  }

  // An inverted offset polygon signals h exceeding the feasible width.
  double area = 0.0;
  std::vector<Vec2> poly;
  for (const auto& nodes : tilde_nodes)
    for (const Vec2& v : nodes) poly.push_back(v);
  for (std::size_t i = 0; i < poly.size(); ++i)
    area += 0.5 * poly[i].cross(poly[(i + 1) % poly.size()]);
  if (area <= 0.0)
    throw std::runtime_error("fictitious curve is inverted: width exceeds feasible offset");

  strip.gamma_tilde = Panelization::from_nodes(pan.kit_ptr(), tilde_nodes, 1e-9, 3.0);

  // Self-intersection scan: non-neighboring panel pairs that are much closer
  // in space than along the curve must keep clearance on the scale of the
  // local width.
  const Panelization& G = strip.gamma_tilde;
  for (int k = 0; k < n; ++k) {
    for (int j = k + 2; j < n; ++j) {
      if (k == 0 && j == n - 1) continue;
      const double hmin = std::min(strip.mid_width[k], strip.mid_width[j]);
      Box2 eb = G.panel(k).bbox;
      eb.pad(0.5 * hmin);
      if (!eb.overlaps(G.panel(j).bbox)) continue;
      const double d = panel_distance(G, k, j);
      if (d >= 0.7 * panel_arc_gap(G, k, j)) continue;
      if (d < 0.5 * hmin) {
        std::ostringstream os;
        os << "fictitious curve self-intersection between panels " << k << " and " << j
           << " (distance " << d << ", local width " << hmin << ")";
        throw std::runtime_error(os.str());
      }
    }
  }
  return strip;
}

}  // namespace quadstrip
