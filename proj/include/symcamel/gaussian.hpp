#pragma once

// Gaussian states held as (mean, covariance Sigma, hbar). The Wigner function
//   rho(z) = exp(-1/2 Sigma^{-1}(z - mean)^2) / ((2 pi)^n sqrt(det Sigma))
// is never normalized explicitly except by density(), which exists for
// numerical cross-checks. M = (hbar/2) Sigma^{-1} is the shape matrix of the
// Wigner ellipsoid {z : M z^2 <= hbar}.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "symcamel/orbit.hpp"
#include "symcamel/williamson.hpp"

namespace symcamel {

class GaussianState {
 public:
  /// Rejects covariances that violate the quantum condition.
  static GaussianState make(const Dimensions& dims, PhasePoint mean, PhaseMatrix covariance,
                            double hbar, const Tolerances& tol = {}) {
    GaussianState s = unchecked(dims, std::move(mean), std::move(covariance), hbar, tol);
    const QuantumCheck q = quantum_condition(s.covariance_, hbar, dims, tol);
    if (!q.holds)
      throw InvalidInput("GaussianState: covariance violates the quantum condition (margin " +
                         std::to_string(q.margin) + ")");
    return s;
  }

  /// Skips the quantum condition; for purely classical ensembles.
  static GaussianState unchecked(const Dimensions& dims, PhasePoint mean, PhaseMatrix covariance,
                                 double hbar, const Tolerances& tol = {}) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("GaussianState: hbar must be positive");
    if (mean.size() != dims.phase_dim() || covariance.rows() != dims.phase_dim() ||
        covariance.cols() != dims.phase_dim())
      throw InvalidDimension("GaussianState: mean/covariance do not match phase dimension " +
                             std::to_string(dims.phase_dim()));
    if (!mean.allFinite() || !covariance.allFinite())
      throw InvalidInput("GaussianState: non-finite entries");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if (asymmetry(covariance) > tol.symmetry * scale)
      throw InvalidInput("GaussianState: covariance is not symmetric");
    covariance = symmetrized(covariance);
    spd_factor(covariance, "GaussianState: covariance", tol);
    return GaussianState(dims, std::move(mean), std::move(covariance), hbar);
  }

  const Dimensions& dims() const noexcept { return dims_; }
  const PhasePoint& mean() const noexcept { return mean_; }
  const PhaseMatrix& covariance() const noexcept { return covariance_; }
  double hbar() const noexcept { return hbar_; }

  /// M = (hbar/2) Sigma^{-1}.
  PhaseMatrix shape(const Tolerances& tol = {}) const {
    return 0.5 * hbar_ * spd_inverse(covariance_, "GaussianState::shape", tol);
  }

  /// Wigner ellipsoid {z : M (z - mean)^2 <= hbar}.
  Ellipsoid wigner_ellipsoid(const Tolerances& tol = {}) const {
    return Ellipsoid{mean_, shape(tol), std::sqrt(hbar_)};
  }

  double density(const PhasePoint& z) const {
    const auto llt = spd_factor(covariance_, "GaussianState::density");
    const PhasePoint d = z - mean_;
    const double q = d.dot(llt.solve(d));
    const double log_norm = static_cast<double>(dims_.n()) * std::log(2.0 * std::numbers::pi) +
                            0.5 * spd_log_det(llt);
    return std::exp(-0.5 * q - log_norm);
  }

 private:
  GaussianState(const Dimensions& dims, PhasePoint mean, PhaseMatrix covariance, double hbar)
      : dims_(dims), mean_(std::move(mean)), covariance_(std::move(covariance)), hbar_(hbar) {}

  Dimensions dims_;
  PhasePoint mean_;
  PhaseMatrix covariance_;
  double hbar_;
};

/// Pure state whose Wigner ellipsoid is center + S(B_sqrt(hbar)):
/// Sigma = (hbar/2) S S^T.
inline GaussianState state_from_symplectic_ball(const PhaseMatrix& s, const PhasePoint& center,
                                                double hbar, const Dimensions& dims,
                                                const Tolerances& tol = {}) {
  if (s.rows() != dims.phase_dim() || s.cols() != dims.phase_dim())
    throw InvalidDimension("state_from_symplectic_ball: matrix side does not match dimensions");
  const double defect = symplecticity_defect(s, dims);
  if (!(defect <= tol.symplectic_input))
    throw InvalidInput("state_from_symplectic_ball: matrix is not symplectic (defect " +
                       std::to_string(defect) + ")");
  return GaussianState::make(dims, center, 0.5 * hbar * s * s.transpose(), hbar, tol);
}

inline GaussianState state_from_symplectic_ball(const PhaseMatrix& s, const PhasePoint& center,
                                                double hbar, const Tolerances& tol = {}) {
  detail::require_even_square(s, "state_from_symplectic_ball");
  return state_from_symplectic_ball(s, center, hbar,
                                    Dimensions::single(static_cast<int>(s.rows() / 2)), tol);
}

/// G = R^T R with R = [[X^{1/2}, 0], [X^{-1/2} Y, X^{-1/2}]]: the shape of the
/// Wigner function of the squeezed state with complex width X + iY.
inline PhaseMatrix shape_from_XY(const PhaseMatrix& x, const PhaseMatrix& y,
                                 const Tolerances& tol = {}) {
  detail::require_square(x, "shape_from_XY (X)");
  detail::require_square(y, "shape_from_XY (Y)");
  if (x.rows() != y.rows()) throw InvalidDimension("shape_from_XY: X and Y differ in size");
  const double sx = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double sy = std::max(1.0, y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
  if (asymmetry(x) > tol.symmetry * sx) throw InvalidInput("shape_from_XY: X is not symmetric");
  if (asymmetry(y) > tol.symmetry * sy) throw InvalidInput("shape_from_XY: Y is not symmetric");
  Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(symmetrized(x));
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw InvalidInput("shape_from_XY: X is not positive definite");
  const PhaseMatrix& v = eig.eigenvectors();
  const PhaseMatrix root = v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
  const PhaseMatrix inv_root =
      v * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  const auto n = x.rows();
  PhaseMatrix r = PhaseMatrix::Zero(2 * n, 2 * n);
  r.topLeftCorner(n, n) = root;
  r.bottomLeftCorner(n, n) = inv_root * symmetrized(y);
  r.bottomRightCorner(n, n) = inv_root;
  return symmetrized(r.transpose() * r);
}

/// (hbar/2)^n (det Sigma)^{-1/2}.
inline double purity(const GaussianState& state) {
  const auto llt = spd_factor(state.covariance(), "purity");
  const double n = state.dims().n();
  return std::exp(n * std::log(0.5 * state.hbar()) - 0.5 * spd_log_det(llt));
}

/// Marginal over subsystem B: M_A = M/M_BB, Sigma_A = (hbar/2) M_A^{-1}.
/// The result is cross-checked against the AA block of Sigma.
inline GaussianState partial_trace(const GaussianState& state, const Tolerances& tol = {}) {
  const Dimensions& dims = state.dims();
  const PhaseMatrix m = state.shape(tol);
  const PhaseMatrix m_a = schur_complement(block_split(m, dims), tol);
  const PhaseMatrix sigma_a = 0.5 * state.hbar() * spd_inverse(m_a, "partial_trace: M/M_BB", tol);
  const int a = 2 * dims.n_a();
  const PhaseMatrix sigma_aa = state.covariance().topLeftCorner(a, a);
  const double diff = (sigma_a - sigma_aa).cwiseAbs().maxCoeff();
  if (diff > tol.schur_inverse * std::max(1.0, sigma_aa.cwiseAbs().maxCoeff()))
    throw NumericalInconsistency("partial_trace: Schur route and AA block differ by " +
                                 std::to_string(diff));
  return GaussianState::make(Dimensions::single(dims.n_a()), state.mean().head(a), sigma_a,
                             state.hbar(), tol);
}

/// Same as partial_trace(state), asserting that dims match the state's layout.
inline GaussianState partial_trace(const GaussianState& state, const Dimensions& dims,
                                   const Tolerances& tol = {}) {
  if (!(dims == state.dims()))
    throw InvalidDimension("partial_trace: dimensions do not match the state's layout");
  return partial_trace(state, tol);
}

/// Push-forward of the Wigner function by the affine flow.
inline GaussianState propagate(const GaussianState& state, const AffineFlow& u,
                               const Tolerances& tol = {}) {
  if (u.St.rows() != state.dims().phase_dim() || u.z0.size() != state.dims().phase_dim())
    throw InvalidDimension("propagate: flow and state dimensions differ");
  const double defect = symplecticity_defect(u.St, state.dims());
  if (!(defect <= tol.symplectic_input))
    throw InvalidInput("propagate: flow matrix is not symplectic (defect " + std::to_string(defect) +
                       ")");
  return GaussianState::make(state.dims(), apply_flow(u, state.mean()),
                             symmetrized(u.St * state.covariance() * u.St.transpose()),
                             state.hbar(), tol);
}

struct SubsystemOptions {
  IntegratorOptions integrator;
  // Initial pure state with Wigner ellipsoid z0 + S0(B_sqrt(hbar)); identity
  // (coherent state) when unset.
  std::optional<PhaseMatrix> initial_symplectic;
};

struct SubsystemTrace {
  Dimensions dims{1, 0};
  double hbar = 1.0;
  std::vector<double> times;
  std::vector<PhasePoint> points;          // reference orbit z_t
  std::vector<PhaseMatrix> shapes;         // M_A,t = P_t / P_BB,t
  std::vector<double> purity;              // 1 / sqrt(det P_BB,t)
  std::vector<double> purity_schur;        // sqrt(det M_A,t)
  std::vector<double> entropy_kB;          // -2 ln purity
  std::vector<double> capacity;            // pi hbar / lambda_max(M_A,t)
  std::vector<SymplecticSpectrum> spectra; // of M_A,t
  std::vector<double> volume_ratio;        // 1 / prod lambda_j
  std::vector<double> defect;              // symplecticity defect of S_t

  std::size_t size() const noexcept { return times.size(); }
};

/// Reduced-state observables at every knot of an already integrated orbit.
inline SubsystemTrace subsystem_trace(const ReferenceOrbit& orbit, double hbar,
                                      const std::optional<PhaseMatrix>& initial_symplectic = std::nullopt,
                                      const Tolerances& tol = {}) {
  detail::require_hbar(hbar);
  const Dimensions& dims = orbit.dims;
  if (initial_symplectic) {
    if (initial_symplectic->rows() != dims.phase_dim() || initial_symplectic->cols() != dims.phase_dim())
      throw InvalidDimension("subsystem_trace: initial symplectic matrix has wrong size");
    if (!(symplecticity_defect(*initial_symplectic, dims) <= tol.symplectic_input))
      throw InvalidInput("subsystem_trace: initial matrix is not symplectic");
  }
  SubsystemTrace tr;
  tr.dims = dims;
  tr.hbar = hbar;
  const std::size_t k_count = orbit.size();
  for (std::size_t k = 0; k < k_count; ++k) {
    const PhaseMatrix s = initial_symplectic ? PhaseMatrix(orbit.monodromy[k] * *initial_symplectic)
                                             : orbit.monodromy[k];
    const PhaseMatrix p = spd_inverse(s * s.transpose(), "subsystem_trace: S_t S_t^T", tol);
    const BlockSplit blocks = block_split(p, dims);
    const PhaseMatrix m_a = schur_complement(blocks, tol);
    const double log_det_pbb =
        dims.n_b() == 0 ? 0.0 : spd_log_det(spd_factor(blocks.BB, "subsystem_trace: P_BB", tol));
    const double log_det_ma = spd_log_det(spd_factor(m_a, "subsystem_trace: M_A", tol));
    const double mu = std::exp(-0.5 * log_det_pbb);
    const double mu_schur = std::exp(0.5 * log_det_ma);
    if (std::abs(mu - mu_schur) > tol.cross_check)
      throw NumericalInconsistency("subsystem_trace: purity routes differ at t = " +
                                   std::to_string(orbit.times[k]));
    SymplecticSpectrum spectrum = symplectic_eigenvalues(m_a, tol);
    tr.times.push_back(orbit.times[k]);
    tr.points.push_back(orbit.points[k]);
    tr.shapes.push_back(m_a);
    tr.purity.push_back(mu);
    tr.purity_schur.push_back(mu_schur);
    tr.entropy_kB.push_back(-2.0 * std::log(mu));
    tr.capacity.push_back(std::numbers::pi * hbar / spectrum.max());
    tr.volume_ratio.push_back(1.0 / spectrum.product());
    tr.spectra.push_back(std::move(spectrum));
    tr.defect.push_back(symplecticity_defect(orbit.monodromy[k], dims));
  }
  return tr;
}

/// Reduced dynamics of subsystem A for a bipartite system starting in the
/// coherent state at z0 (or the squeezed state S0 when configured).
inline SubsystemTrace subsystem_evolution(const HamiltonianModel& h, const PhasePoint& z0,
                                          const std::vector<double>& grid, double hbar,
                                          const SubsystemOptions& opts = {},
                                          const Tolerances& tol = {}) {
  const ReferenceOrbit orbit = integrate_orbit(h, z0, grid, opts.integrator, tol);
  return subsystem_trace(orbit, hbar, opts.initial_symplectic, tol);
}

}  // namespace symcamel
