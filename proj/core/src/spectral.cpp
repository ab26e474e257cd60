#include "quadstrip/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace quadstrip {

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (n - i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double legendre_poly(int m, double t) {
  if (m == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double s = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s *= (x[i] - x[j]);
    w[i] = 1.0 / s;
  }
  // Rescale to avoid under/overflow for large n.
  w /= w.cwiseAbs().maxCoeff();
  return w;
}

double barycentric_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        std::span<const double> f, double t) {
  double num = 0.0, den = 0.0;
  const int n = static_cast<int>(x.size());
  for (int j = 0; j < n; ++j) {
    const double d = t - x[j];
    if (d == 0.0) return f[j];
    const double c = w[j] / d;
    num += c * f[j];
    den += c;
  }
  return num / den;
}

Eigen::MatrixXd interp_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& t) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(t.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    int hit = -1;
    for (int j = 0; j < n; ++j)
      if (t[i] == x[j]) { hit = j; break; }
    if (hit >= 0) {
      P(i, hit) = 1.0;
      continue;
    }
    double den = 0.0;
    for (int j = 0; j < n; ++j) den += w[j] / (t[i] - x[j]);
    for (int j = 0; j < n; ++j) P(i, j) = (w[j] / (t[i] - x[j])) / den;
  }
  return P;
}

Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

Eigen::VectorXd chebyshev_points(int n) {
  Eigen::VectorXd x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = -std::cos(M_PI * i / n);
  return x;
}

Eigen::MatrixXd chebyshev_analysis(int n) {
  // Invert the (well-conditioned) Chebyshev-Vandermonde matrix at the
  // second-kind points; sizes here are small enough that this is exact
  // to roundoff and avoids DCT index bookkeeping.
  const Eigen::VectorXd x = chebyshev_points(n);
  Eigen::MatrixXd V(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double t0 = 1.0, t1 = x[i];
    V(i, 0) = 1.0;
    if (n >= 1) V(i, 1) = t1;
    for (int k = 2; k <= n; ++k) {
      const double t2 = 2.0 * x[i] * t1 - t0;
      V(i, k) = t2;
      t0 = t1;
      t1 = t2;
    }
  }
  return V.partialPivLu().inverse();
}

double chebyshev_eval(std::span<const double> coeffs, double t) {
  const int n = static_cast<int>(coeffs.size());
  if (n == 0) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double b0 = coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + t * b1 - b2;
}

SpectralKit build_spectral_kit(int p) {
  if (p < 3 || p > 40) throw std::invalid_argument("build_spectral_kit: order must be in [3,40]");
  SpectralKit kit;
  kit.order = p;
  gauss_legendre(p + 1, kit.nodes, kit.weights);
  kit.bary = barycentric_weights(kit.nodes);
  kit.diff = diff_matrix(kit.nodes, kit.bary);

  // Pseudoinverse of D_leg; the single zero singular value (constants) is dropped.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(kit.diff, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd si = svd.singularValues();
  const double cutoff = si.maxCoeff() * 1e-12;
  for (int i = 0; i < si.size(); ++i) si[i] = (si[i] > cutoff) ? 1.0 / si[i] : 0.0;
  kit.antidiff = svd.matrixV() * si.asDiagonal() * svd.matrixU().transpose();

  // Legendre analysis by quadrature: c_m = (2m+1)/2 * sum_j W_j P_m(t_j) f_j.
  kit.analysis.resize(p + 1, p + 1);
  for (int m = 0; m <= p; ++m)
    for (int j = 0; j <= p; ++j)
      kit.analysis(m, j) = 0.5 * (2 * m + 1) * kit.weights[j] * legendre_poly(m, kit.nodes[j]);

  kit.leg_to_cheb = interp_matrix(kit.nodes, kit.bary, chebyshev_points(p));

  // Fit sample set: parent nodes, then parent nodes mapped into [-1,0] and
  // [0,1].
  const int nfit = 3 * (p + 1);
  kit.fit_nodes.resize(nfit);
  Eigen::VectorXd fit_w(nfit);
  for (int j = 0; j <= p; ++j) {
    kit.fit_nodes[j] = kit.nodes[j];
    kit.fit_nodes[p + 1 + j] = 0.5 * (kit.nodes[j] - 1.0);
    kit.fit_nodes[2 * (p + 1) + j] = 0.5 * (kit.nodes[j] + 1.0);
    fit_w[j] = kit.weights[j];
    fit_w[p + 1 + j] = 0.5 * kit.weights[j];
    fit_w[2 * (p + 1) + j] = 0.5 * kit.weights[j];
  }
  kit.fit_interp = interp_matrix(kit.nodes, kit.bary, kit.fit_nodes);

  // Quadrature-weighted least-squares fit of 2p+1 Legendre coefficients.
  Eigen::MatrixXd M(nfit, 2 * p + 1);
  for (int i = 0; i < nfit; ++i)
    for (int m = 0; m <= 2 * p; ++m)
      M(i, m) = std::sqrt(fit_w[i]) * legendre_poly(m, kit.fit_nodes[i]);
  kit.fit_coeffs = M.completeOrthogonalDecomposition().pseudoInverse() *
                   fit_w.cwiseSqrt().asDiagonal();
  return kit;
}

bool resolution_check(std::span<const double> fit_values, const SpectralKit& kit, double eps,
                      double noise_abs) {
  if (eps <= 0) throw std::invalid_argument("resolution_check: eps must be positive");
  const int p = kit.order;
  if (static_cast<int>(fit_values.size()) != 3 * (p + 1))
    throw std::invalid_argument("resolution_check: expected 3(p+1) samples at kit.fit_nodes");
  Eigen::Map<const Eigen::VectorXd> v(fit_values.data(), fit_values.size());
  const Eigen::VectorXd c = kit.fit_coeffs * v;
  double head = 0.0, tail = 0.0;
  for (int m = 0; m < p; ++m) head += c[m] * c[m];
  for (int m = p; m <= 2 * p; ++m) tail += c[m] * c[m];
  if (head == 0.0) return true;  // all-zero denominator: treat as resolved
  tail = std::max(0.0, tail - (p + 1) * noise_abs * noise_abs);
  return std::sqrt(tail / (p * head)) < eps;
}

bool resolution_check_nodal(std::span<const double> panel_values, const SpectralKit& kit,
                            double eps) {
  const int p = kit.order;
  if (static_cast<int>(panel_values.size()) != p + 1)
    throw std::invalid_argument("resolution_check_nodal: expected p+1 values");
  // Only the degree-p interpolant is available here, so measure its top two
  // Legendre coefficients against the rest. (Two, not one: a single top
  // coefficient is blind to functions of pure parity on the symmetric nodes.)
  Eigen::Map<const Eigen::VectorXd> v(panel_values.data(), panel_values.size());
  const Eigen::VectorXd c = kit.analysis * v;
  double head = 0.0;
  for (int m = 0; m <= p - 2; ++m) head += c[m] * c[m];
  const double tail = c[p - 1] * c[p - 1] + c[p] * c[p];
  if (head == 0.0) return true;
  return std::sqrt(tail / (p * head)) < eps;
}

}  // namespace quadstrip
