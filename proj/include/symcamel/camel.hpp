#pragma once

// Orthogonal projection of symplectic balls onto subsystem A.
//
// The ball S(B_R(c)) is {z : P (z - Sc)^2 <= R^2} with P = (S S^T)^{-1}.
// Its shadow on the A coordinates is the ellipsoid whose shape is the Schur
// complement P/P_BB. Williamson-diagonalizing that complement,
//   P/P_BB = (S_A^{-1})^T diag(Lambda, Lambda) S_A^{-1},
// every lambda_j is <= 1 whenever S is symplectic, so the shadow contains
// the symplectic ball S_A(B_R) around the projected center.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "symcamel/williamson.hpp"

namespace symcamel {

struct ProjectionResult {
  Ellipsoid omega_A;
  PhaseMatrix S_A;
  SymplecticSpectrum spectrum;
  double volume_ratio = 1.0;      // Vol(omega_A) / Vol(B_R^{2 n_A})
  double entropy_increase = 0.0;  // -sum ln lambda_j, units of k_B

  // Second routes, kept for inspection.
  double entropy_from_det = 0.0;       // (1/2) ln det P_BB
  double volume_ratio_from_det = 1.0;  // sqrt(det P_BB)
  double det_identity_residual = 0.0;  // |det(P/P_BB) det(P_BB) - 1|
  double log_det_pbb = 0.0;
  bool degenerate = false;
};

/// -sum ln lambda_j (k_B = 1).
inline double entropy_increase(const SymplecticSpectrum& spectrum) {
  double s = 0.0;
  for (double v : spectrum.values) {
    if (!(v > 0.0)) throw InvalidInput("entropy_increase: non-positive symplectic eigenvalue");
    s -= std::log(v);
  }
  return s;
}

inline ProjectionResult project_ball(const PhaseMatrix& s, const Dimensions& dims, double radius,
                                     const PhasePoint& center, const Tolerances& tol = {}) {
  if (s.rows() != dims.phase_dim() || s.cols() != dims.phase_dim())
    throw InvalidDimension("project_ball: matrix side " + std::to_string(s.rows()) +
                           " does not match phase dimension " + std::to_string(dims.phase_dim()));
  if (center.size() != dims.phase_dim())
    throw InvalidDimension("project_ball: center has wrong length");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidInput("project_ball: radius must be positive");
  const double defect = symplecticity_defect(s, dims);
  if (!(defect <= tol.symplectic_input))
    throw InvalidInput("project_ball: matrix is not symplectic (defect " + std::to_string(defect) +
                       ")");

  const PhaseMatrix p = spd_inverse(s * s.transpose(), "project_ball: S S^T", tol);
  const BlockSplit blocks = block_split(p, dims);
  const PhaseMatrix schur = schur_complement(blocks, tol);
  const WilliamsonDecomposition w = williamson_diagonalize(schur, tol);

  const int a = 2 * dims.n_a();
  ProjectionResult r;
  r.omega_A = Ellipsoid{(s * center).head(a), schur, radius};
  r.S_A = w.S;
  r.spectrum = w.spectrum;
  r.degenerate = w.degenerate;
  r.entropy_increase = entropy_increase(w.spectrum);
  r.volume_ratio = 1.0 / w.spectrum.product();

  const double log_det_schur = spd_log_det(spd_factor(schur, "project_ball: P/P_BB", tol));
  r.log_det_pbb =
      dims.n_b() == 0 ? 0.0 : spd_log_det(spd_factor(blocks.BB, "project_ball: P_BB", tol));
  r.entropy_from_det = 0.5 * r.log_det_pbb;
  r.volume_ratio_from_det = std::exp(r.entropy_from_det);
  r.det_identity_residual = std::abs(std::expm1(log_det_schur + r.log_det_pbb));

  const double gap = std::abs(r.entropy_increase - r.entropy_from_det);
  if (gap > tol.cross_check * std::max(1.0, std::abs(r.entropy_increase)))
    throw NumericalInconsistency("project_ball: entropy routes disagree by " + std::to_string(gap));
  return r;
}

inline ProjectionResult project_ball(const PhaseMatrix& s, const Dimensions& dims, double radius,
                                     const Tolerances& tol = {}) {
  return project_ball(s, dims, radius, PhasePoint::Zero(dims.phase_dim()), tol);
}

/// Monte-Carlo witness of the inclusion: maps uniform samples of the sphere
/// of radius R through S_A, translates to the shadow center, and tests
/// membership of each image in omega_A.
template <class Rng>
bool containment_check(const ProjectionResult& result, double radius, int samples, Rng& rng,
                       const Tolerances& tol = {}) {
  const auto dim = result.S_A.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd u(dim);
  for (int i = 0; i < samples; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) u(k) = normal(rng);
    u *= radius / u.norm();
    const PhasePoint z = result.omega_A.center + result.S_A * u;
    if (!result.omega_A.contains(z, tol.containment_slack)) return false;
  }
  return true;
}

/// Area of the shadow of S(B_R) on the (x_j, p_j) plane, with mode j
/// counted from 0 in the layout given by dims.
inline double shadow_area_1dof(const PhaseMatrix& s, const Dimensions& dims, int mode,
                               double radius, const Tolerances& tol = {}) {
  if (mode < 0 || mode >= dims.n())
    throw OutOfRange("shadow_area_1dof: mode " + std::to_string(mode) + " outside [0, " +
                     std::to_string(dims.n()) + ")");
  if (s.rows() != dims.phase_dim() || s.cols() != dims.phase_dim())
    throw InvalidDimension("shadow_area_1dof: matrix side does not match dimensions");
  const int n = dims.n();
  std::vector<int> order{mode};
  for (int k = 0; k < n; ++k)
    if (k != mode) order.push_back(k);

  const Dimensions target(1, n - 1);
  const PhaseMatrix from = global_order_permutation(dims);
  const PhaseMatrix reorder = mode_permutation(Dimensions::single(n), order);
  const PhaseMatrix to = global_order_permutation(target);
  const PhaseMatrix moved = to.transpose() * reorder * from;
  const PhaseMatrix s_target = moved * s * moved.transpose();
  const auto r = project_ball(s_target, target, radius, tol);
  return std::numbers::pi * radius * radius * r.volume_ratio;
}

inline double shadow_area_1dof(const PhaseMatrix& s, int mode, double radius,
                               const Tolerances& tol = {}) {
  detail::require_even_square(s, "shadow_area_1dof");
  return shadow_area_1dof(s, Dimensions::single(static_cast<int>(s.rows() / 2)), mode, radius, tol);
}

}  // namespace symcamel
