#include "quadstrip/volume.hpp"

#include <cmath>
#include <iostream>
#include <map>

namespace quadstrip {

namespace {

constexpr double kInv2Pi = 1.0 / (2.0 * M_PI);

struct PolarRules {
  Eigen::VectorXd gx, gw;  // angular / generic GL
  Eigen::VectorXd rx, rw;  // radial GL per dyadic interval
};

const PolarRules& polar_rules(int n_ang, int n_rad) {
  static std::map<std::pair<int, int>, PolarRules> cache;
  const auto key = std::make_pair(n_ang, n_rad);
  auto it = cache.find(key);
  if (it == cache.end()) {
    PolarRules pr;
    gauss_legendre(n_ang, pr.gx, pr.gw);
    gauss_legendre(n_rad, pr.rx, pr.rw);
    it = cache.emplace(key, std::move(pr)).first;
  }
  return it->second;
}

}  // namespace

double VolumePotentialEvaluator::cheb_at(const BoxNode& b, const Vec2& q) const {
  const int p = tree_->order;
  const double sx = std::clamp((q.x - b.center.x) / b.half, -1.0, 1.0);
  const double sy = std::clamp((q.y - b.center.y) / b.half, -1.0, 1.0);
  // Clenshaw across rows, then down the column of row results.
  Eigen::VectorXd row(p + 1);
  for (int my = 0; my <= p; ++my) {
    const double* c = b.coeff.data() + my;  // column-major stride p+1
    double b1 = 0.0, b2 = 0.0;
    for (int k = p; k >= 1; --k) {
      const double b0 = c[k * (p + 1)] + 2.0 * sx * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    row[my] = c[0] + sx * b1 - b2;
  }
  double b1 = 0.0, b2 = 0.0;
  for (int k = p; k >= 1; --k) {
    const double b0 = row[k] + 2.0 * sy * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return row[0] + sy * b1 - b2;
}

VolumePotentialEvaluator::VolumePotentialEvaluator(const TruncatedQuadtree& tree,
                                                   VolumeQuadParams params)
    : tree_(&tree), params_(params) {
  const int p = tree.order;
  terms_ = params_.multipole_terms > 0
               ? params_.multipole_terms
               : std::max(12, static_cast<int>(std::ceil(
                                  std::log(1.0 / params_.eps_quad) / std::log(2.0))) +
                                  6);

  Eigen::VectorXd gx, gw;
  gauss_legendre(p + 1, gx, gw);
  rule_of_node_.assign(tree.nodes.size(), -1);
  for (int id : tree.leaf_ids) {
    const BoxNode& b = tree.nodes[id];
    if (!b.contributes()) continue;
    LeafRule lr;
    lr.node_id = id;
    lr.center = b.center;
    lr.half = b.half;
    lr.pts.reserve((p + 1) * (p + 1));
    lr.charge.reserve((p + 1) * (p + 1));
    for (int iy = 0; iy <= p; ++iy)
      for (int ix = 0; ix <= p; ++ix) {
        const Vec2 q{b.center.x + b.half * gx[ix], b.center.y + b.half * gx[iy]};
        const double w = gw[ix] * gw[iy] * b.half * b.half;
        const double c = w * cheb_at(b, q);
        lr.pts.push_back(q);
        lr.charge.push_back(c);
        lr.abs_charge += std::abs(c);
      }
    rule_of_node_[id] = static_cast<int>(rules_.size());
    rules_.push_back(std::move(lr));
  }
}

// Polar integration over a cell CONTAINING x: the four triangles (x,
// corner_i, corner_i+1) tile the cell exactly, so the rays never leave the
// leaf polynomial's box. Gauss in angle, dyadic composite Gauss toward
// r = 0, analytic r*log(r) closure for the innermost sliver.
double VolumePotentialEvaluator::polar_cell_value(const BoxNode& b, const VolumePotentialEvaluator::Cell& cell,
                                                  const Vec2& x, double tol_abs) const {
  const PolarRules& pr = polar_rules(params_.polar_angular, params_.polar_radial);
  const Vec2 c = cell.center;
  const double hf = cell.half;
  const Vec2 corner[5] = {{c.x - hf, c.y - hf},
                          {c.x + hf, c.y - hf},
                          {c.x + hf, c.y + hf},
                          {c.x - hf, c.y + hf},
                          {c.x - hf, c.y - hf}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Vec2 u = corner[e] - x;
    const Vec2 v = corner[e + 1] - x;
    const double cr = u.cross(v);
    if (cr == 0.0) continue;  // degenerate: x on the edge line
    double th0 = std::atan2(u.y, u.x);
    double th1 = std::atan2(v.y, v.x);
    double dth = th1 - th0;
    while (dth > M_PI) dth -= 2.0 * M_PI;
    while (dth < -M_PI) dth += 2.0 * M_PI;
    const Vec2 edge = corner[e + 1] - corner[e];
    const double elen = edge.norm();
    const Vec2 nrm{edge.y / elen, -edge.x / elen};
    const double d = std::abs(u.dot(nrm));
    if (d == 0.0) continue;

    for (int ia = 0; ia < pr.gx.size(); ++ia) {
      const double th = th0 + 0.5 * (pr.gx[ia] + 1.0) * dth;
      const double wa = pr.gw[ia] * 0.5 * dth;  // signed via dth
      const Vec2 dir{std::cos(th), std::sin(th)};
      const double R = d / std::abs(dir.dot(nrm));

      // Dyadic radial panels [R/2^{v+1}, R/2^v]; stop when the remaining
      // disk contributes below tolerance.
      double radial = 0.0;
      double hi = R;
      for (int v = 0; v < params_.max_depth; ++v) {
        const double lo = 0.5 * hi;
        for (int ir = 0; ir < pr.rx.size(); ++ir) {
          const double r = lo + 0.5 * (pr.rx[ir] + 1.0) * (hi - lo);
          const double wr = pr.rw[ir] * 0.5 * (hi - lo);
          radial += wr * r * std::log(r) * cheb_at(b, {x.x + r * dir.x, x.y + r * dir.y});
        }
        hi = lo;
        const double rem = hi * hi * (std::abs(std::log(hi)) + 1.0);
        if (rem < tol_abs) break;
      }
      // Innermost sliver with f frozen at x: integral of r log r.
      if (hi > 0.0) {
        const double fx = cheb_at(b, x);
        radial += fx * (0.5 * hi * hi * std::log(hi) - 0.25 * hi * hi);
      }
      total += wa * radial;
    }
  }
  return kInv2Pi * total;
}

// Tensor Gauss over a (sub)cell that is well separated from x.
double VolumePotentialEvaluator::gl_cell_value(const BoxNode& b, const Cell& cell,
                                               const Vec2& x) const {
  const int p = tree_->order;
  const PolarRules& pr = polar_rules(p + 1, p + 1);
  double acc = 0.0;
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix) {
      const Vec2 q{cell.center.x + cell.half * pr.gx[ix], cell.center.y + cell.half * pr.gx[iy]};
      const double w = pr.gw[ix] * pr.gw[iy] * cell.half * cell.half;
      acc += w * cheb_at(b, q) * std::log(dist(q, x));
    }
  return kInv2Pi * acc;
}

// Near-field value: subdivide toward the target; the cell containing it is
// integrated in polar coordinates (exact tiling), separated cells by tensor
// Gauss, and vanishing slivers around an on-boundary target are dropped once
// their contribution bound is below tolerance.
double VolumePotentialEvaluator::near_value(const LeafRule& lr, const BoxNode& b,
                                            const Vec2& x) const {
  const double fbound = std::max(b.coeff.cwiseAbs().sum(), 1e-300);
  const double tol_abs =
      0.05 * params_.eps_quad * std::max(lr.abs_charge, fbound * b.half * b.half);
  double acc = 0.0;
  std::vector<Cell> stack{{b.center, b.half}};
  int guard = 0;
  while (!stack.empty() && guard++ < 100000) {
    const Cell cell = stack.back();
    stack.pop_back();
    if (cell.contains(x)) {
      acc += polar_cell_value(b, cell, x, tol_abs);
      continue;
    }
    if (std::sqrt(cell.box().dist2(x)) >= cell.half) {
      acc += gl_cell_value(b, cell, x);
      continue;
    }
    const double sz = 2.0 * cell.half;
    if (fbound * sz * sz * (std::abs(std::log(sz)) + 1.0) < tol_abs) continue;
    const double h2 = 0.5 * cell.half;
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        stack.push_back({{cell.center.x + (dx ? h2 : -h2), cell.center.y + (dy ? h2 : -h2)}, h2});
  }
  return acc;
}

Vec2 VolumePotentialEvaluator::polar_cell_grad(const BoxNode& b, const Cell& cell,
                                               const Vec2& x) const {
  // grad_x of (1/2pi) int log|x-y| f(y) dy = (1/2pi) int (x-y)/|x-y|^2 f dy;
  // in polar around x the radial integrand is -dir * f(x + r dir): smooth,
  // so plain Gauss in r integrates the degree-p restriction exactly.
  const int nr = tree_->order / 2 + 3;
  const PolarRules& pr = polar_rules(params_.polar_angular + 4, nr);
  const Vec2 c = cell.center;
  const double hf = cell.half;
  const Vec2 corner[5] = {{c.x - hf, c.y - hf},
                          {c.x + hf, c.y - hf},
                          {c.x + hf, c.y + hf},
                          {c.x - hf, c.y + hf},
                          {c.x - hf, c.y - hf}};
  Vec2 total{0.0, 0.0};
  for (int e = 0; e < 4; ++e) {
    const Vec2 u = corner[e] - x;
    const Vec2 v = corner[e + 1] - x;
    if (u.cross(v) == 0.0) continue;
    double th0 = std::atan2(u.y, u.x);
    double th1 = std::atan2(v.y, v.x);
    double dth = th1 - th0;
    while (dth > M_PI) dth -= 2.0 * M_PI;
    while (dth < -M_PI) dth += 2.0 * M_PI;
    const Vec2 edge = corner[e + 1] - corner[e];
    const double elen = edge.norm();
    const Vec2 nrm{edge.y / elen, -edge.x / elen};
    const double d = std::abs(u.dot(nrm));
    if (d == 0.0) continue;
    for (int ia = 0; ia < pr.gx.size(); ++ia) {
      const double th = th0 + 0.5 * (pr.gx[ia] + 1.0) * dth;
      const double wa = pr.gw[ia] * 0.5 * dth;
      const Vec2 dir{std::cos(th), std::sin(th)};
      const double R = d / std::abs(dir.dot(nrm));
      double radial = 0.0;
      for (int ir = 0; ir < pr.rx.size(); ++ir) {
        const double r = 0.5 * (pr.rx[ir] + 1.0) * R;
        const double wr = pr.rw[ir] * 0.5 * R;
        radial += wr * cheb_at(b, {x.x + r * dir.x, x.y + r * dir.y});
      }
      // (x - y)/|x-y|^2 = -dir / r; the r from the area element cancels.
      total += dir * (-wa * radial);
    }
  }
  return total * kInv2Pi;
}

Vec2 VolumePotentialEvaluator::gl_cell_grad(const BoxNode& b, const Cell& cell,
                                            const Vec2& x) const {
  const int p = tree_->order;
  const PolarRules& pr = polar_rules(p + 1, p + 1);
  Vec2 acc{0.0, 0.0};
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix) {
      const Vec2 q{cell.center.x + cell.half * pr.gx[ix], cell.center.y + cell.half * pr.gx[iy]};
      const double w = pr.gw[ix] * pr.gw[iy] * cell.half * cell.half;
      const Vec2 d = x - q;
      acc += d * (w * cheb_at(b, q) / d.norm2());
    }
  return acc * kInv2Pi;
}

Vec2 VolumePotentialEvaluator::near_grad(const BoxNode& b, const Vec2& x) const {
  const double fbound = std::max(b.coeff.cwiseAbs().sum(), 1e-300);
  const double tol_abs = 0.05 * params_.eps_quad * fbound * b.half;
  Vec2 acc{0.0, 0.0};
  std::vector<Cell> stack{{b.center, b.half}};
  int guard = 0;
  while (!stack.empty() && guard++ < 100000) {
    const Cell cell = stack.back();
    stack.pop_back();
    if (cell.contains(x)) {
      acc += polar_cell_grad(b, cell, x);
      continue;
    }
    if (std::sqrt(cell.box().dist2(x)) >= cell.half) {
      acc += gl_cell_grad(b, cell, x);
      continue;
    }
    // Gradient kernel ~ 1/r: sliver contribution bound ~ |f| * size.
    const double sz = 2.0 * cell.half;
    if (fbound * sz < tol_abs) continue;
    const double h2 = 0.5 * cell.half;
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        stack.push_back({{cell.center.x + (dx ? h2 : -h2), cell.center.y + (dy ? h2 : -h2)}, h2});
  }
  return acc;
}

double VolumePotentialEvaluator::leaf_contribution(int leaf_id, const Vec2& x) const {
  const int ri = rule_of_node_[leaf_id];
  if (ri < 0) return 0.0;
  const LeafRule& lr = rules_[ri];
  const BoxNode& b = tree_->nodes[leaf_id];
  if (b.box().dist2(x) < b.half * b.half) return near_value(lr, b, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < lr.pts.size(); ++i) {
    const double r2 = (x - lr.pts[i]).norm2();
    acc += lr.charge[i] * 0.5 * std::log(r2);
  }
  return kInv2Pi * acc;
}

double VolumePotentialEvaluator::eval(const Vec2& x) const {
  double acc = 0.0;
  for (const LeafRule& lr : rules_) {
    const BoxNode& b = tree_->nodes[lr.node_id];
    if (b.box().dist2(x) < b.half * b.half) {
      acc += near_value(lr, b, x);
    } else {
      double s = 0.0;
      for (std::size_t i = 0; i < lr.pts.size(); ++i) {
        const double r2 = (x - lr.pts[i]).norm2();
        s += lr.charge[i] * 0.5 * std::log(r2);
      }
      acc += kInv2Pi * s;
    }
  }
  return acc;
}

Vec2 VolumePotentialEvaluator::grad(const Vec2& x) const {
  Vec2 acc{0.0, 0.0};
  for (const LeafRule& lr : rules_) {
    const BoxNode& b = tree_->nodes[lr.node_id];
    if (b.box().dist2(x) < b.half * b.half) {
      acc += near_grad(b, x);
    } else {
      double sx = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < lr.pts.size(); ++i) {
        const Vec2 d = x - lr.pts[i];
        const double r2 = d.norm2();
        sx += lr.charge[i] * d.x / r2;
        sy += lr.charge[i] * d.y / r2;
      }
      acc += Vec2{sx, sy} * kInv2Pi;
    }
  }
  return acc;
}

std::vector<double> VolumePotentialEvaluator::eval_direct(std::span<const Vec2> targets) const {
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) out[i] = eval(targets[i]);
  return out;
}

void VolumePotentialEvaluator::build_multipoles() const {
  if (multipoles_built_) return;
  const int L = terms_;
  multipole_.assign(tree_->nodes.size(), {});
  // Binomial table.
  std::vector<std::vector<double>> binom(L + 1, std::vector<double>(L + 1, 0.0));
  for (int n = 0; n <= L; ++n) {
    binom[n][0] = 1.0;
    for (int k = 1; k <= n; ++k)
      binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
  }
  // Upward pass: nodes are stored parents-before-children.
  for (int id = static_cast<int>(tree_->nodes.size()) - 1; id >= 0; --id) {
    const BoxNode& b = tree_->nodes[id];
    std::vector<Complex>& a = multipole_[id];
    a.assign(L + 1, Complex{0.0, 0.0});
    if (b.is_leaf()) {
      const int ri = rule_of_node_[id];
      if (ri < 0) continue;
      const LeafRule& lr = rules_[ri];
      const Complex c0 = to_complex(b.center);
      for (std::size_t i = 0; i < lr.pts.size(); ++i) {
        const Complex d = to_complex(lr.pts[i]) - c0;
        const double q = lr.charge[i];
        a[0] += q;
        Complex dp = d;
        for (int l = 1; l <= L; ++l) {
          a[l] -= q * dp / static_cast<double>(l);
          dp *= d;
        }
      }
    } else {
      const Complex cp = to_complex(b.center);
      for (int ch = 0; ch < 4; ++ch) {
        const int cid = b.child0 + ch;
        const std::vector<Complex>& ac = multipole_[cid];
        const Complex d = to_complex(tree_->nodes[cid].center) - cp;
        a[0] += ac[0];
        Complex dl = d;
        for (int l = 1; l <= L; ++l) {
          Complex s = -ac[0] * dl / static_cast<double>(l);
          Complex dpow{1.0, 0.0};  // d^(l-k) built downward
          for (int k = l; k >= 1; --k) {
            s += ac[k] * binom[l - 1][k - 1] * dpow;
            dpow *= d;
          }
          a[l] += s;
          dl *= d;
        }
      }
    }
  }
  multipoles_built_ = true;
}

double VolumePotentialEvaluator::eval_fast_one(const Vec2& x) const {
  build_multipoles();
  double acc = 0.0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const BoxNode& b = tree_->nodes[id];
    const double d = dist(x, b.center);
    if (d >= params_.mac * b.half) {
      const std::vector<Complex>& a = multipole_[id];
      if (a.empty()) continue;
      const Complex w = to_complex(x) - to_complex(b.center);
      Complex val = a[0] * std::log(w);
      Complex wp = w;
      for (int l = 1; l <= terms_; ++l) {
        val += a[l] / wp;
        wp *= w;
      }
      acc += kInv2Pi * val.real();
    } else if (b.is_leaf()) {
      acc += leaf_contribution(id, x);
    } else {
      for (int ch = 3; ch >= 0; --ch) stack.push_back(b.child0 + ch);
    }
  }
  return acc;
}

Vec2 VolumePotentialEvaluator::grad_fast(const Vec2& x) const {
  build_multipoles();
  Vec2 acc{0.0, 0.0};
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const BoxNode& b = tree_->nodes[id];
    const double d = dist(x, b.center);
    if (d >= params_.mac * b.half) {
      const std::vector<Complex>& a = multipole_[id];
      if (a.empty()) continue;
      const Complex w = to_complex(x) - to_complex(b.center);
      Complex der = a[0] / w;
      Complex wp = w * w;
      for (int l = 1; l <= terms_; ++l) {
        der -= static_cast<double>(l) * a[l] / wp;
        wp *= w;
      }
      acc += Vec2{der.real(), -der.imag()} * kInv2Pi;
    } else if (b.is_leaf()) {
      const int ri = rule_of_node_[id];
      if (ri < 0) continue;
      const LeafRule& lr = rules_[ri];
      if (b.box().dist2(x) < b.half * b.half) {
        acc += near_grad(b, x);
      } else {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < lr.pts.size(); ++i) {
          const Vec2 dv = x - lr.pts[i];
          const double r2 = dv.norm2();
          sx += lr.charge[i] * dv.x / r2;
          sy += lr.charge[i] * dv.y / r2;
        }
        acc += Vec2{sx, sy} * kInv2Pi;
      }
    } else {
      for (int ch = 3; ch >= 0; --ch) stack.push_back(b.child0 + ch);
    }
  }
  return acc;
}

std::vector<double> VolumePotentialEvaluator::eval_fast(std::span<const Vec2> targets) const {
  if (tree_->leaf_count() < 8) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "quadstrip: tree too small for the fast path, using direct summation\n";
      warned = true;
    }
    return eval_direct(targets);
  }
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) out[i] = eval_fast_one(targets[i]);
  return out;
}

double VolumePotentialEvaluator::residual_on_leaf(int leaf_id, const ScalarField& f) const {
  const BoxNode& b = tree_->nodes[leaf_id];
  if (!b.is_leaf() || b.tag_tilde != Region::inside)
    throw std::invalid_argument(
        "residual_on_leaf: leaf must lie fully inside the fictitious domain");
  const int p = tree_->order;
  const Eigen::VectorXd pts = chebyshev_points(p);
  const Eigen::VectorXd bw = barycentric_weights(pts);
  const Eigen::MatrixXd D = diff_matrix(pts, bw) / b.half;
  const Eigen::MatrixXd D2 = D * D;

  Eigen::MatrixXd V(p + 1, p + 1), F(p + 1, p + 1);
  for (int iy = 0; iy <= p; ++iy)
    for (int ix = 0; ix <= p; ++ix) {
      const Vec2 q{b.center.x + b.half * pts[ix], b.center.y + b.half * pts[iy]};
      V(iy, ix) = eval(q);
      F(iy, ix) = f(q);
    }
  const Eigen::MatrixXd lap = D2 * V + V * D2.transpose();
  const double scale = std::max(F.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (int iy = 2; iy <= p - 2; ++iy)
    for (int ix = 2; ix <= p - 2; ++ix)
      worst = std::max(worst, std::abs(lap(iy, ix) - F(iy, ix)));
  return worst / scale;
}

std::vector<PanelDecay> verify_geometric_decay(const VolumePotentialEvaluator& ev,
                                               const StripRegion& strip, int n_max) {
  const Panelization& G = strip.gamma_tilde;
  const SpectralKit& kit = G.kit();
  const Eigen::VectorXd cpts = chebyshev_points(n_max);
  const Eigen::MatrixXd A = chebyshev_analysis(n_max);

  auto fit_rate = [&](const Eigen::VectorXd& c, PanelDecay& out, bool gradient) {
    const double cmax = c.cwiseAbs().maxCoeff();
    const double floor = std::max(1e-13 * cmax, 1e-300);
    // Parity-safe envelope: pairwise maxima.
    std::vector<double> env;
    std::vector<double> pos;
    for (int n = 0; n + 1 <= n_max; ++n) {
      const double e = std::max(std::abs(c[n]), std::abs(c[n + 1]));
      env.push_back(e);
      pos.push_back(n + 0.5);
    }
    int last = static_cast<int>(env.size()) - 1;
    while (last >= 0 && env[last] <= floor) --last;
    double fl = 0.0;
    for (std::size_t i = std::max<std::size_t>(0, env.size() - 5); i < env.size(); ++i)
      fl = std::max(fl, env[i]);
    if (!gradient) out.floor_level = fl;
    if (last < 6) {
      out.floor_limited = true;
      if (gradient) out.rho_gradient = 1e9; else out.rho_value = 1e9;
      return;
    }
    // Least-squares slope of log(env) over [2, last].
    double sn = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 2; i <= last; ++i) {
      const double y = std::log(std::max(env[i], floor));
      sn += 1; sx += pos[i]; sy += y; sxx += pos[i] * pos[i]; sxy += pos[i] * y;
    }
    const double slope = (sn * sxy - sx * sy) / (sn * sxx - sx * sx);
    const double rho = std::exp(-slope);
    if (gradient) out.rho_gradient = rho; else out.rho_value = rho;
  };

  std::vector<PanelDecay> out(G.panel_count());
  for (int k = 0; k < G.panel_count(); ++k) {
    const Panel& P = G.panel(k);
    std::vector<double> fx(P.node.size()), fy(P.node.size()), dx(P.node.size()),
        dy(P.node.size());
    for (std::size_t j = 0; j < P.node.size(); ++j) {
      fx[j] = P.node[j].x;
      fy[j] = P.node[j].y;
      dx[j] = P.deriv[j].x;
      dy[j] = P.deriv[j].y;
    }
    Eigen::VectorXd vals(n_max + 1), tang(n_max + 1);
    for (int i = 0; i <= n_max; ++i) {
      const double t = cpts[i];
      const Vec2 q{barycentric_eval(kit.nodes, kit.bary, fx, t),
                   barycentric_eval(kit.nodes, kit.bary, fy, t)};
      Vec2 tv{barycentric_eval(kit.nodes, kit.bary, dx, t),
              barycentric_eval(kit.nodes, kit.bary, dy, t)};
      tv = tv / tv.norm();
      vals[i] = ev.eval(q);
      tang[i] = ev.grad(q).dot(tv);
    }
    fit_rate(A * vals, out[k], false);
    fit_rate(A * tang, out[k], true);
  }
  return out;
}

}  // namespace quadstrip
