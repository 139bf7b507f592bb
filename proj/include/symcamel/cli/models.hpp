#pragma once

// Model catalog for the run command.
//
//   free_particle        mass
//   harmonic             omega (one per mode), mass
//   coupled_oscillators  epsilon, omega_A, omega_B          (n_A = n_B = 1)
//   quartic              coefficient, mass                  (n_A = 1, n_B = 0)
//   bilinear_bath        omega_A, bath_omega, couplings     (n_A = 1)
//   quadratic            hessian (row-major 2n x 2n, storage layout)
//   custom               mass, potential_<k>, coupling
//
// The custom model is
//   H = sum_k p_k^2 / 2 m_k + sum_k V_k(x_k) + sum c_ij x_i x_j,
// with V_k(x) = c_0 + c_1 x + c_2 x^2 + ... given by potential_<k> = c_0, c_1, ...
// and coupling = i, j, c_ij, i, j, c_ij, ... over 0-based mode indices.

#include <set>
#include <string>
#include <vector>

#include "symcamel/cli/config.hpp"
#include "symcamel/hamiltonian.hpp"

namespace symcamel::cli {

namespace detail {

class Params {
 public:
  explicit Params(const RunConfig& c) : c_(c) {}

  ConfigError error(const std::string& name, const std::string& what) const {
    const auto it = c_.parameter_lines.find(name);
    return ConfigError("hamiltonian." + name, it == c_.parameter_lines.end() ? 0 : it->second, what);
  }

  void allow(const std::set<std::string>& names, bool potentials = false) const {
    for (const auto& [name, _] : c_.parameters) {
      const bool potential = name.rfind("potential_", 0) == 0;
      if (!names.count(name) && !(potentials && potential))
        throw error(name, "not a parameter of model '" + c_.model + "'");
    }
  }

  bool has(const std::string& name) const { return c_.parameters.count(name) > 0; }

  const std::vector<double>& list(const std::string& name) const {
    const auto it = c_.parameters.find(name);
    if (it == c_.parameters.end()) throw ConfigError("hamiltonian." + name, 0, "missing required field");
    return it->second;
  }

  double scalar(const std::string& name, std::optional<double> fallback = std::nullopt) const {
    if (!has(name)) {
      if (fallback) return *fallback;
      list(name);
    }
    const auto& v = list(name);
    if (v.size() != 1) throw error(name, "expected a single number");
    return v[0];
  }

  double positive(const std::string& name, double fallback) const {
    const double v = scalar(name, fallback);
    if (!(v > 0.0)) throw error(name, "must be positive");
    return v;
  }

 private:
  const RunConfig& c_;
};

inline void require_dims(const RunConfig& c, int n_a, int n_b) {
  if (n_a >= 0 && c.n_a != n_a)
    throw ConfigError("system.n_A", 0, "model '" + c.model + "' needs n_A = " + std::to_string(n_a));
  if (n_b >= 0 && c.n_b != n_b)
    throw ConfigError("system.n_B", 0, "model '" + c.model + "' needs n_B = " + std::to_string(n_b));
}

inline HamiltonianModel custom_polynomial(const RunConfig& c, const Params& p) {
  const Dimensions dims(c.n_a, c.n_b);
  const int n = dims.n();
  Eigen::VectorXd inv_mass(n);
  if (p.has("mass")) {
    const auto& m = p.list("mass");
    if (m.size() != 1 && static_cast<int>(m.size()) != n)
      throw p.error("mass", "expected 1 or " + std::to_string(n) + " values");
    for (int k = 0; k < n; ++k) {
      const double mk = m.size() == 1 ? m[0] : m[static_cast<std::size_t>(k)];
      if (!(mk > 0.0)) throw p.error("mass", "masses must be positive");
      inv_mass(k) = 1.0 / mk;
    }
  } else {
    inv_mass.setOnes();
  }

  std::vector<std::vector<double>> poly(static_cast<std::size_t>(n));
  for (int k = 0; k < 64; ++k) {
    const std::string name = "potential_" + std::to_string(k);
    if (!p.has(name)) continue;
    if (k >= n) throw p.error(name, "mode index out of range (n = " + std::to_string(n) + ")");
    poly[static_cast<std::size_t>(k)] = p.list(name);
  }
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
  if (p.has("coupling")) {
    const auto& t = p.list("coupling");
    if (t.size() % 3 != 0) throw p.error("coupling", "expected triples i, j, c");
    for (std::size_t q = 0; q < t.size(); q += 3) {
      const double fi = t[q], fj = t[q + 1];
      if (fi != std::floor(fi) || fj != std::floor(fj) || fi < 0 || fj < 0 || fi >= n || fj >= n)
        throw p.error("coupling", "mode indices must be integers in [0, " + std::to_string(n - 1) + "]");
      const int i = static_cast<int>(fi), j = static_cast<int>(fj);
      if (i == j) throw p.error("coupling", "use potential_<k> for single-mode terms");
      // c_ij x_i x_j contributes c_ij to both off-diagonal Hessian entries.
      coupling(i, j) += t[q + 2];
      coupling(j, i) += t[q + 2];
    }
  }

  KineticPotential kp;
  kp.inverse_mass = inv_mass.asDiagonal();
  kp.potential = [poly, coupling](const Eigen::VectorXd& x, double) {
    double v = 0.5 * x.dot(coupling * x);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      double acc = 0.0;
      for (auto it = poly[k].rbegin(); it != poly[k].rend(); ++it) acc = acc * x(static_cast<Eigen::Index>(k)) + *it;
      v += acc;
    }
    return v;
  };
  kp.potential_gradient = [poly, coupling](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    Eigen::VectorXd g = coupling * x;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      double acc = 0.0;
      for (std::size_t d = poly[k].size(); d-- > 1;) acc = acc * x(static_cast<Eigen::Index>(k)) + static_cast<double>(d) * poly[k][d];
      g(static_cast<Eigen::Index>(k)) += acc;
    }
    return g;
  };
  kp.potential_hessian = [poly, coupling](const Eigen::VectorXd& x, double) -> Eigen::MatrixXd {
    Eigen::MatrixXd h = coupling;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      double acc = 0.0;
      for (std::size_t d = poly[k].size(); d-- > 2;)
        acc = acc * x(static_cast<Eigen::Index>(k)) + static_cast<double>(d * (d - 1)) * poly[k][d];
      h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += acc;
    }
    return h;
  };
  return models::kinetic_plus_potential(dims, std::move(kp), "custom");
}

}  // namespace detail

inline HamiltonianModel build_model(const RunConfig& c) {
  const detail::Params p(c);
  const Dimensions dims(c.n_a, c.n_b);
  if (c.model == "free_particle") {
    p.allow({"mass"});
    return models::free_particle(dims, p.positive("mass", 1.0));
  }
  if (c.model == "harmonic") {
    p.allow({"omega", "mass"});
    const auto& omega = p.list("omega");
    if (static_cast<int>(omega.size()) != dims.n())
      throw p.error("omega", "expected " + std::to_string(dims.n()) + " frequencies");
    return models::harmonic(dims, omega, p.positive("mass", 1.0));
  }
  if (c.model == "coupled_oscillators") {
    p.allow({"epsilon", "omega_A", "omega_B"});
    detail::require_dims(c, 1, 1);
    const double wa = p.positive("omega_A", 1.0), wb = p.positive("omega_B", 1.0);
    const double eps = p.scalar("epsilon");
    if (!(eps * eps < wa * wa * wb * wb))
      throw p.error("epsilon", "|epsilon| must be below omega_A omega_B for a bounded potential");
    return models::coupled_oscillators(eps, wa, wb);
  }
  if (c.model == "quartic") {
    p.allow({"coefficient", "mass"});
    detail::require_dims(c, 1, 0);
    return models::quartic(p.scalar("coefficient", 1.0), p.positive("mass", 1.0));
  }
  if (c.model == "bilinear_bath") {
    p.allow({"omega_A", "bath_omega", "couplings"});
    detail::require_dims(c, 1, -1);
    const auto& w = p.list("bath_omega");
    const auto& g = p.list("couplings");
    if (static_cast<int>(w.size()) != c.n_b)
      throw p.error("bath_omega", "expected n_B = " + std::to_string(c.n_b) + " frequencies");
    if (g.size() != w.size()) throw p.error("couplings", "expected one coupling per bath mode");
    return models::bilinear_bath(p.positive("omega_A", 1.0), w, g);
  }
  if (c.model == "quadratic") {
    p.allow({"hessian"});
    const auto& v = p.list("hessian");
    const int d = dims.phase_dim();
    if (static_cast<int>(v.size()) != d * d)
      throw p.error("hessian", "expected " + std::to_string(d * d) + " entries (row-major)");
    PhaseMatrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = v[static_cast<std::size_t>(i * d + j)];
    try {
      return models::quadratic(dims, m);
    } catch (const InvalidInput& e) {
      throw p.error("hessian", e.what());
    }
  }
  if (c.model == "custom") {
    p.allow({"mass", "coupling"}, true);
    return detail::custom_polynomial(c, p);
  }
  throw ConfigError("hamiltonian.model", 0, "unknown model '" + c.model + "'");
}

}  // namespace symcamel::cli
