#pragma once

#include <Eigen/Dense>
#include <span>

namespace quadstrip {

/// Nodes, quadrature, differentiation and interpolation operators shared by
/// everything that works with order-p panels.
struct SpectralKit {
  int order = 0;                 // p
  Eigen::VectorXd nodes;         // p+1 Gauss-Legendre nodes on [-1,1], ascending
  Eigen::VectorXd weights;       // Gauss-Legendre weights W_j
  Eigen::VectorXd bary;          // barycentric weights of the nodes
  Eigen::MatrixXd diff;          // D_leg: values -> derivative values at nodes
  Eigen::MatrixXd antidiff;      // A_leg = pinv(D_leg): derivatives -> values
  Eigen::MatrixXd analysis;      // values -> Legendre coefficients c_0..c_p
  Eigen::MatrixXd leg_to_cheb;   // values at GL nodes -> values at p+1 Chebyshev nodes

  // Bisection refinement used by the tail resolution test: the panel's own
  // nodes plus the GL nodes of its two halves give 3(p+1) samples, from which
  // 2p+1 Legendre coefficients are recovered by quadrature-weighted least
  // squares (condition number ~10 versus ~1e8 for the unweighted child-only
  // fit).
  Eigen::VectorXd fit_nodes;     // 3(p+1) parameters: parent block then halves
  Eigen::MatrixXd fit_interp;    // values at parent nodes -> values at fit_nodes
  Eigen::MatrixXd fit_coeffs;    // raw values at fit_nodes -> coefficients c_0..c_2p
};

/// Builds the kit for panel order p. Throws std::invalid_argument unless 3 <= p <= 40.
SpectralKit build_spectral_kit(int p);

/// n-point Gauss-Legendre rule on [-1,1], nodes ascending, accurate to ~1e-15.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Legendre polynomial P_m(t).
double legendre_poly(int m, double t);

/// Tail-ratio resolution criterion from 3(p+1) samples at kit.fit_nodes
/// (panel plus its two bisected halves): fit 2p+1 Legendre coefficients,
/// then require
///   sqrt( (1/p) * sum_{m=p}^{2p} c_m^2 / sum_{m=0}^{p-1} c_m^2 ) < eps.
/// An identically-zero head (all-zero denominator) counts as resolved.
/// noise_abs, when nonzero, is the caller's estimate of the absolute
/// roundoff level per sample (and hence per fitted coefficient); that much
/// energy is discounted from the tail so that monitors computed through
/// numerical differentiation stop refining at their own noise floor instead
/// of diverging.
bool resolution_check(std::span<const double> fit_values, const SpectralKit& kit, double eps,
                      double noise_abs = 0.0);

/// Same criterion applied to a function known only through its p+1 nodal
/// values: the degree-p interpolant is sampled on the two halves first.
bool resolution_check_nodal(std::span<const double> panel_values, const SpectralKit& kit,
                            double eps);

/// Barycentric weights for an arbitrary strictly-increasing node set.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x);

/// Barycentric interpolation of data f (given at nodes x with weights w) at t.
double barycentric_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        std::span<const double> f, double t);

/// Interpolation matrix from nodes x (weights w) to target points t.
Eigen::MatrixXd interp_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& t);

/// Differentiation matrix on an arbitrary node set (barycentric form).
Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& w);

/// n+1 Chebyshev points of the second kind, ascending from -1 to 1.
Eigen::VectorXd chebyshev_points(int n);

/// Values at the n+1 second-kind points -> Chebyshev coefficients c_0..c_n
/// (first-kind polynomial basis).
Eigen::MatrixXd chebyshev_analysis(int n);

/// Evaluate a Chebyshev series sum c_k T_k(t) by Clenshaw recurrence.
double chebyshev_eval(std::span<const double> coeffs, double t);

}  // namespace quadstrip
