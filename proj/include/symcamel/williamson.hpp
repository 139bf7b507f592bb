#pragma once

// Symplectic spectra and Williamson normal form of symmetric positive-definite
// matrices, plus the two quantities built on them: the symplectic capacity of
// an ellipsoid and the quantum (Robertson-Schroedinger) condition.
//
// For M = M^T > 0 of side 2m the symplectic eigenvalues lambda_j are read off
// the skew-symmetric K = M^{1/2} J M^{1/2}, whose eigenvalues are +-i lambda_j.
// We never touch a non-symmetric eigensolver: -K^2 = K^T K is symmetric with
// every lambda_j^2 appearing twice, and the invariant planes of K are rebuilt
// from its eigenvectors as pairs (e_j, f_j = -K e_j / lambda_j).

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "symcamel/phasespace.hpp"

namespace symcamel {

/// Positive symplectic eigenvalues, sorted descending.
struct SymplecticSpectrum {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double max() const { return values.front(); }
  double min() const { return values.back(); }
  double product() const {
    double p = 1.0;
    for (double v : values) p *= v;
    return p;
  }
};

struct WilliamsonDecomposition {
  PhaseMatrix S;  // symplectic, S^T M S = D
  PhaseMatrix D;  // diag(Lambda, Lambda) in the layout of the input
  SymplecticSpectrum spectrum;
  // Smallest relative gap between consecutive symplectic eigenvalues. When
  // below Tolerances::degeneracy_gap the decomposition is not unique.
  double min_relative_gap = 0.0;
  bool degenerate = false;
};

struct QuantumCheck {
  bool holds = false;
  double margin = 0.0;  // smallest symplectic eigenvalue of (2/hbar) Sigma, minus 1
};

namespace detail {

struct SpdRoots {
  PhaseMatrix sqrt;
  PhaseMatrix inv_sqrt;
};

inline PhaseMatrix validated_spd(const PhaseMatrix& m, const char* what, const Tolerances& tol) {
  require_even_square(m, what);
  if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = asymmetry(m);
  if (asym > tol.symmetry * scale)
    throw InvalidInput(std::string(what) + ": matrix is not symmetric (asymmetry " +
                       std::to_string(asym) + ")");
  return symmetrized(m);
}

inline SpdRoots spd_roots(const PhaseMatrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw InvalidInput(std::string(what) + ": eigendecomposition failed");
  const Eigen::VectorXd w = eig.eigenvalues();
  if (!(w.minCoeff() > 0.0))
    throw InvalidInput(std::string(what) + ": matrix is not positive definite (eigenvalue " +
                       std::to_string(w.minCoeff()) + ")");
  const PhaseMatrix& v = eig.eigenvectors();
  return SpdRoots{v * w.cwiseSqrt().asDiagonal() * v.transpose(),
                  v * w.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

inline PhaseMatrix skew_core(const PhaseMatrix& root) {
  const int m = static_cast<int>(root.rows() / 2);
  PhaseMatrix k = root * standard_J(m) * root;
  return 0.5 * (k - k.transpose());
}

inline std::vector<double> sorted_pairs_from_square(const Eigen::VectorXd& squares) {
  std::vector<double> sq(squares.data(), squares.data() + squares.size());
  std::sort(sq.begin(), sq.end(), std::greater<>());
  std::vector<double> out(sq.size() / 2);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = std::sqrt(std::max(0.0, 0.5 * (sq[2 * j] + sq[2 * j + 1])));
  return out;
}

inline double min_relative_gap(const std::vector<double>& values) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < values.size(); ++j)
    gap = std::min(gap, (values[j - 1] - values[j]) / values.front());
  return values.size() < 2 ? std::numeric_limits<double>::infinity() : gap;
}

// Williamson factorization in the global (x, p) order.
inline WilliamsonDecomposition williamson_global(const PhaseMatrix& m_in, const Tolerances& tol) {
  const PhaseMatrix m = validated_spd(m_in, "williamson_diagonalize", tol);
  const int dim = static_cast<int>(m.rows());
  const int half = dim / 2;
  const SpdRoots roots = spd_roots(m, "williamson_diagonalize");
  const PhaseMatrix k = skew_core(roots.sqrt);

  Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(k.transpose() * k);
  // Eigen returns ascending order; walk descending.
  const Eigen::VectorXd sq = eig.eigenvalues().reverse();
  const PhaseMatrix u = eig.eigenvectors().rowwise().reverse();

  PhaseMatrix o(dim, dim);
  std::vector<double> lambda(half);
  std::vector<Eigen::VectorXd> chosen;
  chosen.reserve(dim);

  auto residual = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : chosen) v -= c.dot(v) * c;
    return v;
  };

  // Process eigenvalue clusters (exact pairs, or larger groups when
  // symplectic eigenvalues coincide) so each invariant plane is extracted
  // from a subspace that actually contains it.
  int j = 0;
  int start = 0;
  while (start < dim) {
    int end = start + 1;
    while (end < dim && sq(start) - sq(end) <= std::max(tol.degeneracy_gap * sq(0), 1e-13 * sq(0)))
      ++end;
    if ((end - start) % 2 != 0) end = std::min(dim, end + 1);
    for (int picked = 0; picked < (end - start) / 2; ++picked) {
      Eigen::VectorXd best;
      double best_norm = -1.0;
      for (int c = start; c < end; ++c) {
        Eigen::VectorXd r = residual(u.col(c));
        const double nr = r.norm();
        if (nr > best_norm) {
          best_norm = nr;
          best = std::move(r);
        }
      }
      Eigen::VectorXd e = best / best_norm;
      const Eigen::VectorXd ke = k * e;
      const double lam = ke.norm();
      if (!(lam > 0.0)) throw InvalidInput("williamson_diagonalize: degenerate skew core");
      Eigen::VectorXd f = -ke / lam;
      f -= e.dot(f) * e;
      f.normalize();
      o.col(j) = e;
      o.col(half + j) = f;
      lambda[j] = lam;
      chosen.push_back(e);
      chosen.push_back(f);
      ++j;
    }
    start = end;
  }

  // Clusters are walked in descending order, but Rayleigh values inside a
  // cluster may come out in any order.
  std::vector<int> order(half);
  for (int i = 0; i < half; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lambda[a] > lambda[b]; });
  PhaseMatrix o_sorted(dim, dim);
  std::vector<double> lam_sorted(half);
  for (int i = 0; i < half; ++i) {
    o_sorted.col(i) = o.col(order[i]);
    o_sorted.col(half + i) = o.col(half + order[i]);
    lam_sorted[i] = lambda[order[i]];
  }

  Eigen::VectorXd d(dim);
  for (int i = 0; i < half; ++i) d(i) = d(half + i) = lam_sorted[i];

  WilliamsonDecomposition out;
  out.S = roots.inv_sqrt * o_sorted * d.cwiseSqrt().asDiagonal();
  out.D = d.asDiagonal();
  out.spectrum.values = lam_sorted;
  out.min_relative_gap = min_relative_gap(lam_sorted);
  out.degenerate = out.min_relative_gap < tol.degeneracy_gap;
  return out;
}

}  // namespace detail

/// Symplectic eigenvalues of M with respect to standard_J(m).
inline SymplecticSpectrum symplectic_eigenvalues(const PhaseMatrix& m_in,
                                                 const Tolerances& tol = {}) {
  const PhaseMatrix m = detail::validated_spd(m_in, "symplectic_eigenvalues", tol);
  const auto roots = detail::spd_roots(m, "symplectic_eigenvalues");
  const PhaseMatrix k = detail::skew_core(roots.sqrt);
  Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(k.transpose() * k, Eigen::EigenvaluesOnly);
  return SymplecticSpectrum{detail::sorted_pairs_from_square(eig.eigenvalues())};
}

/// Symplectic eigenvalues with respect to J_A (+) J_B for a matrix in storage layout.
inline SymplecticSpectrum symplectic_eigenvalues(const PhaseMatrix& m, const Dimensions& dims,
                                                 const Tolerances& tol = {}) {
  if (m.rows() != dims.phase_dim())
    throw InvalidDimension("symplectic_eigenvalues: matrix side does not match dimensions");
  const PhaseMatrix q = global_order_permutation(dims);
  return symplectic_eigenvalues(q * m * q.transpose(), tol);
}

inline WilliamsonDecomposition williamson_diagonalize(const PhaseMatrix& m,
                                                      const Tolerances& tol = {}) {
  return detail::williamson_global(m, tol);
}

/// Storage-layout variant: S is symplectic for J_A (+) J_B and D is the
/// normal form permuted into the same layout.
inline WilliamsonDecomposition williamson_diagonalize(const PhaseMatrix& m, const Dimensions& dims,
                                                      const Tolerances& tol = {}) {
  if (m.rows() != dims.phase_dim())
    throw InvalidDimension("williamson_diagonalize: matrix side does not match dimensions");
  const PhaseMatrix q = global_order_permutation(dims);
  auto w = detail::williamson_global(q * m * q.transpose(), tol);
  w.S = q.transpose() * w.S * q;
  w.D = q.transpose() * w.D * q;
  return w;
}

/// Residual max|(S^{-1})^T D S^{-1} - M| relative to max|M|.
inline double reconstruction_residual(const WilliamsonDecomposition& w, const PhaseMatrix& m) {
  const PhaseMatrix s_inv = w.S.inverse();
  const PhaseMatrix rebuilt = s_inv.transpose() * w.D * s_inv;
  return (rebuilt - m).cwiseAbs().maxCoeff() / std::max(1e-300, m.cwiseAbs().maxCoeff());
}

/// pi R^2 / lambda_max of the shape matrix; the center plays no role.
inline double ellipsoid_capacity(const Ellipsoid& e, const Tolerances& tol = {}) {
  if (!(e.radius > 0.0)) throw InvalidInput("ellipsoid_capacity: radius must be positive");
  const auto spectrum = symplectic_eigenvalues(e.shape, tol);
  return std::numbers::pi * e.radius * e.radius / spectrum.max();
}

inline double ellipsoid_capacity(const Ellipsoid& e, const Dimensions& dims,
                                 const Tolerances& tol = {}) {
  if (!(e.radius > 0.0)) throw InvalidInput("ellipsoid_capacity: radius must be positive");
  const auto spectrum = symplectic_eigenvalues(e.shape, dims, tol);
  return std::numbers::pi * e.radius * e.radius / spectrum.max();
}

namespace detail {
inline QuantumCheck quantum_from_spectrum(const SymplecticSpectrum& s, const Tolerances& tol) {
  const double margin = s.min() - 1.0;
  return QuantumCheck{margin >= -tol.quantum_margin, margin};
}
inline void require_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("hbar must be positive and finite");
}
}  // namespace detail

/// Sigma + (i hbar / 2) J >= 0, tested as lambda_min((2/hbar) Sigma) >= 1.
inline QuantumCheck quantum_condition(const PhaseMatrix& sigma, double hbar,
                                      const Tolerances& tol = {}) {
  detail::require_hbar(hbar);
  return detail::quantum_from_spectrum(symplectic_eigenvalues((2.0 / hbar) * sigma, tol), tol);
}

inline QuantumCheck quantum_condition(const PhaseMatrix& sigma, double hbar, const Dimensions& dims,
                                      const Tolerances& tol = {}) {
  detail::require_hbar(hbar);
  return detail::quantum_from_spectrum(symplectic_eigenvalues((2.0 / hbar) * sigma, dims, tol),
                                       tol);
}

}  // namespace symcamel
