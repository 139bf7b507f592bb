#pragma once

// Reference orbits and the nearby-orbit (affine) propagator.
//
// Along the reference orbit z_t of H the monodromy S_t = d z_t / d z_0 solves
//   dS/dt = J H''(z_t, t) S,  S_0 = I,
// and the flow of the Taylor model around z_t is the affine map
//   u_0 |-> z_t + S_t (u_0 - z_0).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "symcamel/hamiltonian.hpp"

namespace symcamel {

enum class Scheme { RK4, Leapfrog };

struct IntegratorOptions {
  double step = 1e-3;
  Scheme scheme = Scheme::RK4;
  bool reproject = false;       // restore symplecticity when the defect exceeds the trigger
  bool frozen_hessian = false;  // variational equation uses H''(z_0, t)
};

struct ReferenceOrbit {
  Dimensions dims{1, 0};
  PhasePoint z0;
  std::vector<double> times;
  std::vector<PhasePoint> points;
  std::vector<PhaseMatrix> monodromy;

  std::size_t size() const noexcept { return times.size(); }
};

struct AffineFlow {
  PhasePoint z0;
  PhasePoint zt;
  PhaseMatrix St;
  double t = 0.0;  // time of the knot the flow was taken from
};

/// Non-finite state during integration. Carries the knots completed so far.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, ReferenceOrbit partial)
      : Error("integration diverged at t = " + std::to_string(time)),
        time_(time),
        partial_(std::move(partial)) {}
  double time() const noexcept { return time_; }
  const ReferenceOrbit& partial() const noexcept { return partial_; }

 private:
  double time_;
  ReferenceOrbit partial_;
};

/// Knots 0, h, 2h, ..., K h with K = round(t_end / h).
inline std::vector<double> uniform_grid(double t_end, double step) {
  if (!(step > 0.0) || !(t_end > 0.0) || !std::isfinite(t_end))
    throw InvalidInput("uniform_grid: t_end and step must be positive");
  const auto count = static_cast<long>(std::llround(t_end / step));
  std::vector<double> grid(static_cast<std::size_t>(count) + 1);
  for (long k = 0; k <= count; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(k) * step;
  return grid;
}

/// Newton iteration S <- S (I + 1/2 J E), E = S^T J S - J. Converges
/// quadratically for nearly symplectic S.
inline PhaseMatrix reproject_symplectic(PhaseMatrix s, const PhaseMatrix& j, double target = 1e-14,
                                        int max_iterations = 20) {
  const auto d = s.rows();
  for (int it = 0; it < max_iterations; ++it) {
    const PhaseMatrix e = s.transpose() * j * s - j;
    if (e.cwiseAbs().maxCoeff() <= target) break;
    s = s * (PhaseMatrix::Identity(d, d) + 0.5 * j * e);
  }
  return s;
}

namespace detail {

struct OrbitState {
  PhasePoint z;
  PhaseMatrix s;
};

class Stepper {
 public:
  Stepper(const HamiltonianModel& h, const PhasePoint& z0, const IntegratorOptions& opts)
      : h_(h), z0_(z0), opts_(opts), j_(standard_J(h.dims())) {
    if (opts.scheme == Scheme::Leapfrog && !h.kinetic_potential())
      throw InvalidInput("leapfrog requires a kinetic-plus-potential model, got '" + h.name() + "'");
  }

  const PhaseMatrix& j() const noexcept { return j_; }

  void step(OrbitState& st, double t, double dt) const {
    if (opts_.scheme == Scheme::RK4)
      rk4(st, t, dt);
    else
      leapfrog(st, t, dt);
  }

 private:
  OrbitState rhs(const OrbitState& st, double t) const {
    const PhaseMatrix hess = h_.hessian(opts_.frozen_hessian ? z0_ : st.z, t);
    return OrbitState{j_ * h_.gradient(st.z, t), j_ * hess * st.s};
  }

  void rk4(OrbitState& st, double t, double dt) const {
    const OrbitState k1 = rhs(st, t);
    const OrbitState k2 = rhs({st.z + 0.5 * dt * k1.z, st.s + 0.5 * dt * k1.s}, t + 0.5 * dt);
    const OrbitState k3 = rhs({st.z + 0.5 * dt * k2.z, st.s + 0.5 * dt * k2.s}, t + 0.5 * dt);
    const OrbitState k4 = rhs({st.z + dt * k3.z, st.s + dt * k3.s}, t + dt);
    st.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    st.s += dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
  }

  // Velocity Verlet together with its exact tangent map, so the monodromy
  // stays symplectic to rounding.
  void leapfrog(OrbitState& st, double t, double dt) const {
    const Dimensions& dims = h_.dims();
    const auto& kp = *h_.kinetic_potential();
    const int n = dims.n();
    Eigen::VectorXd x = positions(dims, st.z);
    Eigen::VectorXd p = momenta(dims, st.z);
    Eigen::MatrixXd dx(n, st.s.cols());
    Eigen::MatrixXd dp(n, st.s.cols());
    for (int k = 0; k < n; ++k) {
      dx.row(k) = st.s.row(dims.x_index(k));
      dp.row(k) = st.s.row(dims.p_index(k));
    }
    const Eigen::VectorXd x_frozen = positions(dims, z0_);
    auto hess_v = [&](const Eigen::VectorXd& at, double time) {
      return Eigen::MatrixXd(symmetrized(kp.potential_hessian(opts_.frozen_hessian ? x_frozen : at, time)));
    };

    p -= 0.5 * dt * kp.potential_gradient(x, t);
    dp -= 0.5 * dt * hess_v(x, t) * dx;
    x += dt * kp.inverse_mass * p;
    dx += dt * kp.inverse_mass * dp;
    p -= 0.5 * dt * kp.potential_gradient(x, t + dt);
    dp -= 0.5 * dt * hess_v(x, t + dt) * dx;

    for (int k = 0; k < n; ++k) {
      st.z(dims.x_index(k)) = x(k);
      st.z(dims.p_index(k)) = p(k);
      st.s.row(dims.x_index(k)) = dx.row(k);
      st.s.row(dims.p_index(k)) = dp.row(k);
    }
  }

  const HamiltonianModel& h_;
  PhasePoint z0_;
  IntegratorOptions opts_;
  PhaseMatrix j_;
};

}  // namespace detail

/// Integrates z and S_t jointly over the grid with fixed substeps no longer
/// than opts.step between consecutive knots.
inline ReferenceOrbit integrate_orbit(const HamiltonianModel& h, const PhasePoint& z0,
                                      const std::vector<double>& grid,
                                      const IntegratorOptions& opts = {},
                                      const Tolerances& tol = {}) {
  const Dimensions dims = h.dims();
  if (z0.size() != dims.phase_dim())
    throw InvalidDimension("integrate_orbit: z0 has length " + std::to_string(z0.size()) +
                           ", expected " + std::to_string(dims.phase_dim()));
  if (!z0.allFinite()) throw InvalidInput("integrate_orbit: z0 has non-finite entries");
  if (!(opts.step > 0.0) || !std::isfinite(opts.step))
    throw InvalidInput("integrate_orbit: step must be positive");
  if (grid.empty()) throw InvalidInput("integrate_orbit: empty time grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw InvalidInput("integrate_orbit: time grid is not strictly increasing at index " +
                         std::to_string(k));

  const detail::Stepper stepper(h, z0, opts);
  ReferenceOrbit orbit;
  orbit.dims = dims;
  orbit.z0 = z0;
  orbit.times.reserve(grid.size());
  orbit.points.reserve(grid.size());
  orbit.monodromy.reserve(grid.size());

  detail::OrbitState st{z0, PhaseMatrix::Identity(dims.phase_dim(), dims.phase_dim())};
  orbit.times.push_back(grid.front());
  orbit.points.push_back(st.z);
  orbit.monodromy.push_back(st.s);

  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const auto substeps = static_cast<long>(std::ceil(span / opts.step - 1e-9));
    const double dt = span / static_cast<double>(std::max(1L, substeps));
    double t = grid[k - 1];
    for (long i = 0; i < std::max(1L, substeps); ++i) {
      stepper.step(st, t, dt);
      t = grid[k - 1] + static_cast<double>(i + 1) * dt;
      if (!st.z.allFinite() || !st.s.allFinite()) throw DivergenceError(t, std::move(orbit));
      if (opts.reproject) {
        const double defect = (st.s.transpose() * stepper.j() * st.s - stepper.j()).cwiseAbs().maxCoeff();
        if (defect > tol.reproject_trigger)
          st.s = reproject_symplectic(st.s, stepper.j(), tol.reproject_target);
      }
    }
    if (opts.reproject) st.s = reproject_symplectic(st.s, stepper.j(), tol.reproject_target);
    orbit.times.push_back(grid[k]);
    orbit.points.push_back(st.z);
    orbit.monodromy.push_back(st.s);
  }
  return orbit;
}

/// Affine flow at the knot nearest to t; no interpolation between knots.
inline AffineFlow flow_at(const ReferenceOrbit& orbit, double t) {
  if (orbit.times.empty()) throw OutOfRange("flow_at: empty orbit");
  const double lo = orbit.times.front();
  const double hi = orbit.times.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (!(t >= lo - slack && t <= hi + slack))
    throw OutOfRange("flow_at: t = " + std::to_string(t) + " outside [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  const auto it = std::lower_bound(orbit.times.begin(), orbit.times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - orbit.times.begin());
  if (k == orbit.times.size()) k = orbit.times.size() - 1;
  if (k > 0 && std::abs(orbit.times[k - 1] - t) <= std::abs(orbit.times[k] - t)) --k;
  return AffineFlow{orbit.z0, orbit.points[k], orbit.monodromy[k], orbit.times[k]};
}

inline PhasePoint apply_flow(const AffineFlow& u, const PhasePoint& z) {
  if (z.size() != u.z0.size())
    throw InvalidDimension("apply_flow: point has length " + std::to_string(z.size()) +
                           ", flow acts on " + std::to_string(u.z0.size()));
  return u.zt + u.St * (z - u.z0);
}

/// Image of the ball B_R(z_0): center z_t, shape (S_t S_t^T)^{-1}.
inline Ellipsoid evolve_ball(const AffineFlow& u, double radius, const Tolerances& tol = {}) {
  if (!(radius > 0.0)) throw InvalidInput("evolve_ball: radius must be positive");
  return Ellipsoid{u.zt, spd_inverse(u.St * u.St.transpose(), "evolve_ball: S S^T", tol), radius};
}

struct EffectiveGenerator {
  PhaseMatrix Q;            // symmetric Hessian of the effective quadratic Hamiltonian
  double asymmetry = 0.0;   // of -J_A dS_A/dt S_A^{-1} before symmetrization
};

/// Hessian of the quadratic Hamiltonian generating a path of symplectic
/// matrices: Q = -J dS/dt S^{-1}, with dS/dt from a central difference.
inline EffectiveGenerator effective_subsystem_generator(const std::vector<PhaseMatrix>& path,
                                                        const std::vector<double>& times,
                                                        std::size_t knot) {
  if (path.size() != times.size())
    throw InvalidDimension("effective_subsystem_generator: path and times differ in length");
  if (path.size() < 3)
    throw InvalidInput("effective_subsystem_generator: need at least 3 knots, got " +
                       std::to_string(path.size()));
  if (knot < 1 || knot + 1 >= path.size())
    throw InvalidInput("effective_subsystem_generator: knot " + std::to_string(knot) +
                       " has no neighbour on both sides");
  const PhaseMatrix& s = path[knot];
  detail::require_even_square(s, "effective_subsystem_generator");
  const PhaseMatrix ds = (path[knot + 1] - path[knot - 1]) / (times[knot + 1] - times[knot - 1]);
  const PhaseMatrix j = standard_J(static_cast<int>(s.rows() / 2));
  const PhaseMatrix raw = -j * ds * s.inverse();
  return EffectiveGenerator{symmetrized(raw), asymmetry(raw)};
}

}  // namespace symcamel
