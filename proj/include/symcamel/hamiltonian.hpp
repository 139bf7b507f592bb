#pragma once

// Hamiltonian models on the bipartite phase space and their local quadratic
// (Taylor) approximation along a reference point.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symcamel/phasespace.hpp"

namespace symcamel {

enum class ModelKind { QuadraticConstant, QuadraticTimeDependent, KineticPlusPotential, Custom };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::QuadraticConstant: return "quadratic-constant";
    case ModelKind::QuadraticTimeDependent: return "quadratic-time-dependent";
    case ModelKind::KineticPlusPotential: return "kinetic-plus-potential";
    case ModelKind::Custom: return "custom";
  }
  return "?";
}

/// H = 1/2 p^T m^{-1} p + V(x, t). Vectors x, p are indexed by mode
/// (0..n-1, A modes first), not by storage position.
struct KineticPotential {
  Eigen::MatrixXd inverse_mass;
  std::function<double(const Eigen::VectorXd&, double)> potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> potential_gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> potential_hessian;
};

inline Eigen::VectorXd positions(const Dimensions& dims, const PhasePoint& z) {
  Eigen::VectorXd x(dims.n());
  for (int k = 0; k < dims.n(); ++k) x(k) = z(dims.x_index(k));
  return x;
}

inline Eigen::VectorXd momenta(const Dimensions& dims, const PhasePoint& z) {
  Eigen::VectorXd p(dims.n());
  for (int k = 0; k < dims.n(); ++k) p(k) = z(dims.p_index(k));
  return p;
}

/// Central differences of a gradient, step 1e-6 * max(1, |z|), symmetrized.
template <class Gradient>
PhaseMatrix finite_difference_hessian(const Gradient& gradient, const Eigen::VectorXd& z,
                                      double relative_step = 1e-6) {
  const auto d = z.size();
  const double h = relative_step * std::max(1.0, z.norm());
  PhaseMatrix hess(d, d);
  Eigen::VectorXd zp = z;
  for (Eigen::Index i = 0; i < d; ++i) {
    zp(i) = z(i) + h;
    const Eigen::VectorXd gp = gradient(zp);
    zp(i) = z(i) - h;
    const Eigen::VectorXd gm = gradient(zp);
    zp(i) = z(i);
    hess.col(i) = (gp - gm) / (2.0 * h);
  }
  return symmetrized(hess);
}

class HamiltonianModel {
 public:
  using ValueFn = std::function<double(const PhasePoint&, double)>;
  using GradientFn = std::function<PhasePoint(const PhasePoint&, double)>;
  using HessianFn = std::function<PhaseMatrix(const PhasePoint&, double)>;

  /// An empty hessian evaluator selects finite differences of the gradient.
  HamiltonianModel(Dimensions dims, ModelKind kind, ValueFn value, GradientFn gradient,
                   HessianFn hessian = {}, std::optional<KineticPotential> split = std::nullopt,
                   std::string name = {}, Tolerances tol = {})
      : dims_(dims),
        kind_(kind),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)),
        split_(std::move(split)),
        name_(std::move(name)),
        tol_(tol) {
    if (!value_ || !gradient_) throw InvalidInput("HamiltonianModel: value and gradient required");
  }

  const Dimensions& dims() const noexcept { return dims_; }
  ModelKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool analytic_hessian() const noexcept { return static_cast<bool>(hessian_); }
  const std::optional<KineticPotential>& kinetic_potential() const noexcept { return split_; }

  double value(const PhasePoint& z, double t) const {
    check(z);
    return value_(z, t);
  }
  PhasePoint gradient(const PhasePoint& z, double t) const {
    check(z);
    return gradient_(z, t);
  }
  PhaseMatrix hessian(const PhasePoint& z, double t) const {
    check(z);
    if (!hessian_)
      return finite_difference_hessian([&](const Eigen::VectorXd& y) { return gradient_(y, t); }, z,
                                       tol_.fd_hessian_step);
    PhaseMatrix h = hessian_(z, t);
    const double asym = asymmetry(h);
    if (asym > tol_.symmetry * std::max(1.0, h.cwiseAbs().maxCoeff()))
      throw InvalidInput("HamiltonianModel '" + name_ + "': hessian asymmetry " +
                         std::to_string(asym));
    return symmetrized(h);
  }

 private:
  void check(const PhasePoint& z) const {
    if (z.size() != dims_.phase_dim())
      throw InvalidDimension("HamiltonianModel: point has length " + std::to_string(z.size()) +
                             ", expected " + std::to_string(dims_.phase_dim()));
  }

  Dimensions dims_;
  ModelKind kind_;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::optional<KineticPotential> split_;
  std::string name_;
  Tolerances tol_;
};

namespace models {

/// H = 1/2 z^T M z with constant symmetric M.
inline HamiltonianModel quadratic(const Dimensions& dims, PhaseMatrix m, std::string name = "quadratic") {
  if (m.rows() != dims.phase_dim() || m.cols() != dims.phase_dim())
    throw InvalidDimension("quadratic model: matrix side does not match dimensions");
  if (asymmetry(m) > Tolerances{}.symmetry * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw InvalidInput("quadratic model: matrix is not symmetric");
  m = symmetrized(m);
  return HamiltonianModel(
      dims, ModelKind::QuadraticConstant,
      [m](const PhasePoint& z, double) { return 0.5 * z.dot(m * z); },
      [m](const PhasePoint& z, double) -> PhasePoint { return m * z; },
      [m](const PhasePoint&, double) { return m; }, std::nullopt, std::move(name));
}

/// H = 1/2 z^T M(t) z.
inline HamiltonianModel quadratic_time_dependent(const Dimensions& dims,
                                                 std::function<PhaseMatrix(double)> m,
                                                 std::string name = "quadratic-time-dependent") {
  return HamiltonianModel(
      dims, ModelKind::QuadraticTimeDependent,
      [m](const PhasePoint& z, double t) { return 0.5 * z.dot(m(t) * z); },
      [m](const PhasePoint& z, double t) -> PhasePoint { return m(t) * z; },
      [m](const PhasePoint&, double t) { return symmetrized(m(t)); }, std::nullopt,
      std::move(name));
}

inline HamiltonianModel kinetic_plus_potential(const Dimensions& dims, KineticPotential kp,
                                               std::string name = "kinetic-plus-potential") {
  const int n = dims.n();
  if (kp.inverse_mass.rows() != n || kp.inverse_mass.cols() != n)
    throw InvalidDimension("kinetic_plus_potential: inverse mass must be n x n");
  Eigen::LLT<Eigen::MatrixXd> llt(kp.inverse_mass);
  if (llt.info() != Eigen::Success || asymmetry(kp.inverse_mass) > 1e-12)
    throw InvalidInput("kinetic_plus_potential: mass matrix must be symmetric positive definite");
  if (!kp.potential || !kp.potential_gradient)
    throw InvalidInput("kinetic_plus_potential: potential and its gradient are required");
  if (!kp.potential_hessian) {
    auto grad = kp.potential_gradient;
    kp.potential_hessian = [grad](const Eigen::VectorXd& x, double t) {
      return finite_difference_hessian([&](const Eigen::VectorXd& y) { return grad(y, t); }, x);
    };
  }
  const auto value = [dims, kp](const PhasePoint& z, double t) {
    const Eigen::VectorXd p = momenta(dims, z);
    return 0.5 * p.dot(kp.inverse_mass * p) + kp.potential(positions(dims, z), t);
  };
  const auto gradient = [dims, kp](const PhasePoint& z, double t) -> PhasePoint {
    const Eigen::VectorXd dv = kp.potential_gradient(positions(dims, z), t);
    const Eigen::VectorXd v = kp.inverse_mass * momenta(dims, z);
    PhasePoint g(dims.phase_dim());
    for (int k = 0; k < dims.n(); ++k) {
      g(dims.x_index(k)) = dv(k);
      g(dims.p_index(k)) = v(k);
    }
    return g;
  };
  const auto hessian = [dims, kp](const PhasePoint& z, double t) -> PhaseMatrix {
    const Eigen::MatrixXd vxx = kp.potential_hessian(positions(dims, z), t);
    PhaseMatrix h = PhaseMatrix::Zero(dims.phase_dim(), dims.phase_dim());
    for (int i = 0; i < dims.n(); ++i)
      for (int j = 0; j < dims.n(); ++j) {
        h(dims.x_index(i), dims.x_index(j)) = vxx(i, j);
        h(dims.p_index(i), dims.p_index(j)) = kp.inverse_mass(i, j);
      }
    return h;
  };
  return HamiltonianModel(dims, ModelKind::KineticPlusPotential, value, gradient, hessian, kp,
                          std::move(name));
}

inline HamiltonianModel custom(const Dimensions& dims, HamiltonianModel::ValueFn value,
                               HamiltonianModel::GradientFn gradient,
                               HamiltonianModel::HessianFn hessian = {},
                               std::string name = "custom") {
  return HamiltonianModel(dims, ModelKind::Custom, std::move(value), std::move(gradient),
                          std::move(hessian), std::nullopt, std::move(name));
}

/// V(x) = 1/2 x^T K x: quadratic potential with constant stiffness K.
inline HamiltonianModel quadratic_potential(const Dimensions& dims, const Eigen::MatrixXd& stiffness,
                                            const Eigen::MatrixXd& inverse_mass, std::string name) {
  KineticPotential kp;
  kp.inverse_mass = inverse_mass;
  kp.potential = [stiffness](const Eigen::VectorXd& x, double) { return 0.5 * x.dot(stiffness * x); };
  kp.potential_gradient = [stiffness](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    return stiffness * x;
  };
  kp.potential_hessian = [stiffness](const Eigen::VectorXd&, double) -> Eigen::MatrixXd {
    return stiffness;
  };
  return kinetic_plus_potential(dims, std::move(kp), std::move(name));
}

inline HamiltonianModel free_particle(const Dimensions& dims, double mass = 1.0) {
  if (!(mass > 0.0)) throw InvalidInput("free_particle: mass must be positive");
  const int n = dims.n();
  return quadratic_potential(dims, Eigen::MatrixXd::Zero(n, n),
                             Eigen::MatrixXd::Identity(n, n) / mass, "free_particle");
}

/// n independent oscillators, V = 1/2 sum m omega_k^2 x_k^2.
inline HamiltonianModel harmonic(const Dimensions& dims, const std::vector<double>& omega,
                                 double mass = 1.0) {
  if (static_cast<int>(omega.size()) != dims.n())
    throw InvalidDimension("harmonic: need one frequency per mode");
  if (!(mass > 0.0)) throw InvalidInput("harmonic: mass must be positive");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dims.n(), dims.n());
  for (int i = 0; i < dims.n(); ++i) k(i, i) = mass * omega[i] * omega[i];
  return quadratic_potential(dims, k, Eigen::MatrixXd::Identity(dims.n(), dims.n()) / mass,
                             "harmonic");
}

/// H = 1/2 (p_A^2 + wA^2 x_A^2) + 1/2 (p_B^2 + wB^2 x_B^2) + eps x_A x_B.
inline HamiltonianModel coupled_oscillators(double epsilon, double omega_a = 1.0,
                                            double omega_b = 1.0) {
  Eigen::Matrix2d k;
  k << omega_a * omega_a, epsilon, epsilon, omega_b * omega_b;
  return quadratic_potential(Dimensions(1, 1), k, Eigen::Matrix2d::Identity(),
                             "coupled_oscillators");
}

/// H = 1/2 p^2 / m + (a/4) x^4, one degree of freedom.
inline HamiltonianModel quartic(double coefficient = 1.0, double mass = 1.0) {
  KineticPotential kp;
  kp.inverse_mass = Eigen::MatrixXd::Constant(1, 1, 1.0 / mass);
  kp.potential = [coefficient](const Eigen::VectorXd& x, double) {
    return 0.25 * coefficient * std::pow(x(0), 4);
  };
  kp.potential_gradient = [coefficient](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, coefficient * std::pow(x(0), 3));
  };
  kp.potential_hessian = [coefficient](const Eigen::VectorXd& x, double) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, 3.0 * coefficient * x(0) * x(0));
  };
  return kinetic_plus_potential(Dimensions(1, 0), std::move(kp), "quartic");
}

/// One A oscillator coupled bilinearly to n_B bath oscillators:
/// V = 1/2 wA^2 x_A^2 + sum_k (1/2 w_k^2 x_k^2 + c_k x_A x_k).
inline HamiltonianModel bilinear_bath(double omega_a, const std::vector<double>& bath_omega,
                                      const std::vector<double>& couplings) {
  if (bath_omega.empty() || bath_omega.size() != couplings.size())
    throw InvalidDimension("bilinear_bath: need equal, non-empty frequency and coupling lists");
  const int nb = static_cast<int>(bath_omega.size());
  const int n = nb + 1;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  k(0, 0) = omega_a * omega_a;
  for (int i = 0; i < nb; ++i) {
    k(i + 1, i + 1) = bath_omega[i] * bath_omega[i];
    k(0, i + 1) = k(i + 1, 0) = couplings[i];
  }
  return quadratic_potential(Dimensions(1, nb), k, Eigen::MatrixXd::Identity(n, n),
                             "bilinear_bath");
}

}  // namespace models

/// Second-order Taylor model of H around z_ref at time t:
///   H0(z) = H(z_ref) + grad H(z_ref).(z - z_ref) + 1/2 H''(.)(z - z_ref)^2.
/// With frozen_at set, the Hessian is taken at that point instead of z_ref.
/// Kinetic-plus-potential models keep their split, with the potential
/// replaced by its local harmonic approximation.
inline HamiltonianModel local_hamiltonian(const HamiltonianModel& h, const PhasePoint& z_ref,
                                          double t,
                                          const std::optional<PhasePoint>& frozen_at = std::nullopt) {
  const Dimensions dims = h.dims();
  if (z_ref.size() != dims.phase_dim())
    throw InvalidDimension("local_hamiltonian: reference point has wrong length");
  if (h.kinetic_potential()) {
    const auto& kp = *h.kinetic_potential();
    const Eigen::VectorXd x_ref = positions(dims, z_ref);
    const Eigen::VectorXd x_hess = frozen_at ? positions(dims, *frozen_at) : x_ref;
    const double v0 = kp.potential(x_ref, t);
    const Eigen::VectorXd g0 = kp.potential_gradient(x_ref, t);
    const Eigen::MatrixXd h0 = symmetrized(kp.potential_hessian(x_hess, t));
    KineticPotential local;
    local.inverse_mass = kp.inverse_mass;
    local.potential = [=](const Eigen::VectorXd& x, double) {
      const Eigen::VectorXd d = x - x_ref;
      return v0 + g0.dot(d) + 0.5 * d.dot(h0 * d);
    };
    local.potential_gradient = [=](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
      return g0 + h0 * (x - x_ref);
    };
    local.potential_hessian = [=](const Eigen::VectorXd&, double) -> Eigen::MatrixXd { return h0; };
    auto out = models::kinetic_plus_potential(dims, std::move(local), h.name() + "/local");
    return out;
  }
  const double v0 = h.value(z_ref, t);
  const PhasePoint g0 = h.gradient(z_ref, t);
  const PhaseMatrix h0 = h.hessian(frozen_at ? *frozen_at : z_ref, t);
  return HamiltonianModel(
      dims, ModelKind::QuadraticConstant,
      [=](const PhasePoint& z, double) {
        const PhasePoint d = z - z_ref;
        return v0 + g0.dot(d) + 0.5 * d.dot(h0 * d);
      },
      [=](const PhasePoint& z, double) -> PhasePoint { return g0 + h0 * (z - z_ref); },
      [=](const PhasePoint&, double) { return h0; }, std::nullopt, h.name() + "/local");
}

}  // namespace symcamel
