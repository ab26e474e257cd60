#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "quadstrip/width.hpp"

namespace quadstrip {

using ScalarField = std::function<double(Vec2)>;

enum class Region : std::uint8_t { inside, outside, cut };

struct BoxNode {
  Vec2 center;
  double half = 0.0;
  int level = 0;
  std::int64_t ix = 0, iy = 0;  // integer cell coordinates within the level grid
  int parent = -1;
  int child0 = -1;              // children occupy child0..child0+3, -1 for leaves
  Region tag_gamma = Region::inside;
  Region tag_tilde = Region::inside;
  Eigen::MatrixXd coeff;        // (p+1)x(p+1) Chebyshev coefficients; empty outside

  bool is_leaf() const { return child0 < 0; }
  bool contributes() const { return is_leaf() && tag_gamma != Region::outside; }
  double diag() const { return 2.0 * half * M_SQRT2; }
  Box2 box() const { return {{center.x - half, center.y - half}, {center.x + half, center.y + half}}; }
};

struct TreeConfig {
  int order = 16;       // p
  double eps = 1e-8;
  int max_depth = 40;
  int min_depth = 2;
  bool strip_criterion = true;  // the truncation separation rule; off only for negative controls
};

class TruncatedQuadtree {
 public:
  std::vector<BoxNode> nodes;
  std::vector<int> leaf_ids;  // all leaves in deterministic order
  int order = 16;
  double eps = 1e-8;
  double fmax = 0.0;          // running max |f| over all sample grids

  const BoxNode& root() const { return nodes[0]; }
  int leaf_count() const { return static_cast<int>(leaf_ids.size()); }
  int contributing_leaf_count() const;

  /// Deepest leaf containing p, or -1 outside the root box.
  int find_leaf(const Vec2& p) const;

  /// Max level over leaves in the subtree of `node` whose cells touch
  /// (edge or corner) the given cell range at `level`.
  int max_adjacent_leaf_level(int node, int level, std::int64_t ix, std::int64_t iy) const;
};

/// Cut/inside/outside classification of a box against a closed curve: cut if
/// the upsampled node polyline meets the box, otherwise decided by the
/// winding of the box center.
Region classify_box(const Box2& box, const Panelization& curve);

/// Tensor Chebyshev interpolation coefficients of f on the box grid
/// (first-kind polynomial basis, second-kind point grid). When
/// zero_outside is given, f is extended by zero outside that curve.
Eigen::MatrixXd cheb_coeffs_2d(const ScalarField& f, const Box2& box, int p,
                               const Panelization* zero_outside = nullptr);

/// Algorithm: refine from a root box by (i) the function-resolution tail
/// test on boxes inside the domain, (ii) the strip/exterior span rule,
/// (iii) the truncation separation rule (strip-touching boxes refine until
/// diag < local strip width / 2); then 2:1 balance. Cut boxes keep
/// zero-extended coefficients; boxes fully outside are pruned.
TruncatedQuadtree build_truncated_tree(const ScalarField& f, const StripRegion& strip,
                                       const TreeConfig& cfg,
                                       std::optional<Box2> root_box = std::nullopt);

/// Enforce the 2:1 balance (edge and corner adjacency); new leaves get
/// classified and filled from f. Idempotent.
void balance_2to1(TruncatedQuadtree& tree, const ScalarField& f, const StripRegion& strip);

/// One CSV record per leaf: center, half-width, level, tags, coefficients.
void dump_tree_csv(const TruncatedQuadtree& tree, const std::string& path);

}  // namespace quadstrip
