// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "support/expm_oracle.hpp"
#include "support/random_symplectic.hpp"
#include "symcamel/cli/commands.hpp"
#include "symcamel/symcamel.hpp"

using namespace symcamel;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs(const PhaseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Ensemble shared by criteria 1-3.
struct EnsembleStats {
  long cases = 0;
  double max_lambda = 0.0;
  long containment_failures = 0;
  double min_capacity_margin = INFINITY;  // capacity - pi R^2
  double min_area_margin = INFINITY;      // shadow area - pi R^2 (n_A = 1)
  long area_cases = 0;
  double max_det_residual = 0.0;
  double max_entropy_gap = 0.0;
  double seconds = 0.0;
};

EnsembleStats run_ensemble() {
  EnsembleStats st;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> radius_dist(0.5, 2.0), center_dist(-1.0, 1.0);
  const auto t0 = Clock::now();
  for (int n = 2; n <= 4; ++n) {
    for (int n_a = 1; n_a < n; ++n_a) {
      const Dimensions dims(n_a, n - n_a);
      for (int trial = 0; trial < 1000; ++trial) {
        const PhaseMatrix s = fixtures::random_symplectic(dims, rng);
        const double radius = radius_dist(rng);
        PhasePoint center(dims.phase_dim());
        for (Eigen::Index i = 0; i < center.size(); ++i) center(i) = center_dist(rng);
        const ProjectionResult r = project_ball(s, dims, radius, center);
        ++st.cases;
        st.max_lambda = std::max(st.max_lambda, r.spectrum.max());
        if (!containment_check(r, radius, 1000, rng)) ++st.containment_failures;
        st.min_capacity_margin =
            std::min(st.min_capacity_margin, ellipsoid_capacity(r.omega_A) - pi * radius * radius);
        if (n_a == 1) {
          ++st.area_cases;
          st.min_area_margin =
              std::min(st.min_area_margin, shadow_area_1dof(s, dims, 0, radius) - pi * radius * radius);
        }
        st.max_det_residual = std::max(st.max_det_residual, r.det_identity_residual);
        st.max_entropy_gap = std::max(st.max_entropy_gap, std::abs(r.entropy_increase - r.entropy_from_det));
      }
    }
  }
  st.seconds = seconds_since(t0);
  return st;
}

Outcome integrator_oracles() {
  std::ostringstream d;
  bool ok = true;
  const IntegratorOptions opts{.step = 1e-3};

  double free_err = 0.0, harm_err = 0.0;
  {
    const auto orbit = integrate_orbit(models::free_particle(Dimensions(1, 0)), PhasePoint::Zero(2),
                                       uniform_grid(10.0, 0.1), opts);
    for (std::size_t k = 0; k < orbit.size(); ++k) {
      PhaseMatrix e(2, 2);
      e << 1, orbit.times[k], 0, 1;
      free_err = std::max(free_err, max_abs(orbit.monodromy[k] - e));
    }
  }
  {
    const double w = 1.3;
    const auto orbit = integrate_orbit(models::harmonic(Dimensions(1, 0), {w}),
                                       (PhasePoint(2) << 1.0, 0.0).finished(), uniform_grid(10.0, 0.1), opts);
    for (std::size_t k = 0; k < orbit.size(); ++k) {
      const double t = orbit.times[k];
      PhaseMatrix e(2, 2);
      e << std::cos(w * t), std::sin(w * t) / w, -w * std::sin(w * t), std::cos(w * t);
      harm_err = std::max(harm_err, max_abs(orbit.monodromy[k] - e));
    }
  }
  ok &= free_err <= 1e-8 && harm_err <= 1e-8;

  PhaseMatrix mq(4, 4);
  mq << 2, .3, .1, 0, .3, 1, 0, .2, .1, 0, 1.5, -.4, 0, .2, -.4, .8;
  // scipy.linalg.expm(J M) at t = 1.
  PhaseMatrix frozen(4, 4);
  frozen << 0.39777199850037737, 0.6978849626807275, -0.161102648853431, 0.1579666993191694,
      -1.4117984627450928, -0.023821217926565996, 0.05504080539111142, -0.20419968613444286,
      -0.16527323820275122, 0.05020376305415451, 0.1902772725165236, 0.6533342989190059,
      0.0011593372586039884, -0.14679145476089733, -1.2450374822026828, 0.8533431834184523;
  const auto quad = integrate_orbit(models::quadratic(Dimensions(1, 1), mq), PhasePoint::Zero(4),
                                    uniform_grid(1.0, 1.0), opts);
  const double quad_err = std::max(max_abs(quad.monodromy.back() - frozen),
                                   max_abs(quad.monodromy.back() -
                                           fixtures::expm(standard_J(Dimensions(1, 1)) * mq)));
  ok &= quad_err <= 1e-6;

  auto fd_error = [&](const HamiltonianModel& h, const PhasePoint& z0) {
    const auto grid = uniform_grid(1.0, 1.0);
    const PhaseMatrix s = integrate_orbit(h, z0, grid, opts).monodromy.back();
    PhaseMatrix jac(z0.size(), z0.size());
    const double eps = 1e-5;
    for (Eigen::Index i = 0; i < z0.size(); ++i) {
      PhasePoint a = z0, b = z0;
      a(i) += eps;
      b(i) -= eps;
      jac.col(i) = (integrate_orbit(h, a, grid, opts).points.back() -
                    integrate_orbit(h, b, grid, opts).points.back()) / (2 * eps);
    }
    return max_abs(s - jac);
  };
  const double fd_quartic = fd_error(models::quartic(1.0), (PhasePoint(2) << 0.9, -0.3).finished());
  const double fd_coupled = fd_error(models::coupled_oscillators(0.2, 1.0, 1.4),
                                     (PhasePoint(4) << 0.3, 0.1, -0.4, 0.6).finished());
  ok &= fd_quartic <= 1e-4 && fd_coupled <= 1e-4;

  d << "free " << sci(free_err) << ", harmonic " << sci(harm_err) << " (<= 1e-8); expm " << sci(quad_err)
    << " (<= 1e-6); FD Jacobian quartic " << sci(fd_quartic) << ", coupled " << sci(fd_coupled)
    << " (<= 1e-4)";
  return {ok, d.str()};
}

Outcome semiclassical_pipeline() {
  const auto t0 = Clock::now();
  const double hbar = 1.0;
  const auto grid = uniform_grid(20.0, 1e-3);
  const SubsystemOptions opts{.integrator = {.step = 1e-3}};
  const SubsystemTrace tr =
      subsystem_evolution(models::coupled_oscillators(0.2), PhasePoint::Zero(4), grid, hbar, opts);
  const SubsystemTrace free =
      subsystem_evolution(models::coupled_oscillators(0.0), PhasePoint::Zero(4), grid, hbar, opts);
  const double elapsed = seconds_since(t0);

  double route_gap = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k)
    route_gap = std::max(route_gap, std::abs(tr.purity[k] - tr.purity_schur[k]));

  PhaseMatrix m = PhaseMatrix::Identity(4, 4);
  m(0, 2) = m(2, 0) = 0.2;
  const PhaseMatrix a = standard_J(Dimensions(1, 1)) * m;
  double oracle_gap = 0.0;
  for (std::size_t k = 0; k < tr.size(); k += 100) {
    const PhaseMatrix s = fixtures::expm(tr.times[k] * a);
    const PhaseMatrix p = (s * s.transpose()).inverse();
    oracle_gap = std::max(oracle_gap,
                          std::abs(tr.purity[k] - 1.0 / std::sqrt(p.bottomRightCorner(2, 2).determinant())));
  }
  // numpy/scipy evaluation (tests/oracles/derive_values.py).
  const std::pair<double, double> frozen[] = {
      {0.5, 0.995435200568821},  {1.0, 0.986162030879889},   {2.0, 0.9840758492145301},
      {5.0, 0.9882096949692992}, {10.0, 0.9925393945525597}, {20.0, 0.9953645900935756}};
  for (const auto& [t, mu] : frozen)
    oracle_gap = std::max(oracle_gap, std::abs(tr.purity[static_cast<std::size_t>(std::llround(t / 1e-3))] - mu));

  double free_gap = 0.0, free_entropy = 0.0;
  for (std::size_t k = 0; k < free.size(); ++k) {
    free_gap = std::max(free_gap, std::abs(free.purity[k] - 1.0));
    free_entropy = std::max(free_entropy, std::abs(free.entropy_kB[k]));
  }
  const bool ok = route_gap <= 1e-8 && oracle_gap <= 1e-6 && free_gap <= 1e-8 && free_entropy <= 1e-8 &&
                  elapsed < 10.0;
  std::ostringstream d;
  d << tr.size() << " knots; purity routes " << sci(route_gap) << " (<= 1e-8), oracle " << sci(oracle_gap)
    << " (<= 1e-6), eps=0 |mu-1| " << sci(free_gap) << ", |S| " << sci(free_entropy) << " (<= 1e-8); "
    << sci(elapsed) << " s (< 10 s)";
  return {ok, d.str()};
}

Outcome quantum_condition_preservation() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> hbar_dist(0.1, 2.0);
  double min_margin = INFINITY, max_purity = 0.0, min_purity = INFINITY;
  for (int trial = 0; trial < 500; ++trial) {
    const int n_a = 1 + trial % 3, n_b = 1 + (trial / 3) % 3;
    const Dimensions dims(n_a, n_b);
    const PhaseMatrix s = fixtures::random_symplectic(dims, rng);
    const double hbar = hbar_dist(rng);
    const GaussianState state = state_from_symplectic_ball(s, PhasePoint::Zero(dims.phase_dim()), hbar, dims);
    const GaussianState reduced = partial_trace(state);
    min_margin = std::min(min_margin, quantum_condition(reduced.covariance(), hbar).margin);
    const double mu = purity(reduced);
    max_purity = std::max(max_purity, mu);
    min_purity = std::min(min_purity, mu);
  }
  const bool ok = min_margin >= -1e-9 && min_purity > 0.0 && max_purity <= 1.0 + 1e-9;
  std::ostringstream d;
  d << "500 states; min margin " << sci(min_margin) << " (>= -1e-9); purity in [" << sci(min_purity) << ", "
    << sci(max_purity) << "] (within (0, 1+1e-9])";
  return {ok, d.str()};
}

// Marginal density of z_A by midpoint-rule integration over z_B.
double grid_marginal(const GaussianState& state, const Eigen::Vector2d& za) {
  const PhaseMatrix& sigma = state.covariance();
  const double sx = std::sqrt(sigma(2, 2)), sp = std::sqrt(sigma(3, 3));
  const int nodes = 256;
  const double hx = 16.0 * sx / nodes, hp = 16.0 * sp / nodes;
  double sum = 0.0;
  PhasePoint z(4);
  z(0) = za(0);
  z(1) = za(1);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      z(2) = state.mean()(2) - 8.0 * sx + (i + 0.5) * hx;
      z(3) = state.mean()(3) - 8.0 * sp + (j + 0.5) * hp;
      sum += state.density(z);
    }
  return sum * hx * hp;
}

Outcome marginalization_oracle() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const Dimensions dims(1, 1);
    const PhaseMatrix s = fixtures::random_symplectic(dims, rng, 8, 0.5);
    const PhasePoint mean = (PhasePoint(4) << 0.1 * trial, -0.2, 0.3, 0.05 * trial).finished();
    const GaussianState state = state_from_symplectic_ball(s, mean, 1.0, dims);
    const GaussianState reduced = partial_trace(state);

    // Least-squares fit ln rho_A = c + b.z + 1/2 z^T Q z on a 7 x 7 stencil;
    // the marginal covariance is -Q^{-1}.
    const PhaseMatrix& sa = state.covariance();
    const double ax = std::sqrt(sa(0, 0)), ap = std::sqrt(sa(1, 1));
    Eigen::MatrixXd design(49, 6);
    Eigen::VectorXd rhs(49);
    int row = 0;
    for (int i = -3; i <= 3; ++i)
      for (int j = -3; j <= 3; ++j, ++row) {
        const double dx = 0.5 * i * ax, dp = 0.5 * j * ap;
        const Eigen::Vector2d za(mean(0) + dx, mean(1) + dp);
        design.row(row) << 1.0, dx, dp, 0.5 * dx * dx, dx * dp, 0.5 * dp * dp;
        rhs(row) = std::log(grid_marginal(state, za));
      }
    const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
    Eigen::Matrix2d q;
    q << c(3), c(4), c(4), c(5);
    const Eigen::Matrix2d sigma_fit = -q.inverse();
    worst = std::max(worst, (sigma_fit - reduced.covariance()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (sigma_fit - sa.topLeftCorner(2, 2)).cwiseAbs().maxCoeff());
  }
  std::ostringstream d;
  d << "4 two-mode states, 256^2 grid over +-8 sigma; max covariance entry error " << sci(worst)
    << " (<= 1e-4)";
  return {worst <= 1e-4, d.str()};
}

Outcome entropy_purity_law() {
  // Entropy from the symplectic spectrum of the reduced shape, purity from
  // det P_BB: S = -2 sum ln lambda_j must equal -2 ln mu.
  double worst = 0.0;
  std::size_t knots = 0;
  auto check = [&](const HamiltonianModel& h, const PhasePoint& z0, double t_end,
                   const std::optional<PhaseMatrix>& s0) {
    const auto grid = uniform_grid(t_end, 0.01);
    const ReferenceOrbit orbit = integrate_orbit(h, z0, grid);
    const SubsystemTrace tr = subsystem_trace(orbit, 0.7, s0);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      double spectral = 0.0;
      for (double v : tr.spectra[k].values) spectral -= 2.0 * std::log(v);
      worst = std::max(worst, std::abs(spectral + 2.0 * std::log(tr.purity[k])));
      worst = std::max(worst, std::abs(tr.entropy_kB[k] + 2.0 * std::log(tr.purity[k])));
      ++knots;
    }
  };
  check(models::coupled_oscillators(0.2), PhasePoint::Zero(4), 20.0, std::nullopt);
  check(models::bilinear_bath(1.0, {0.7, 1.1, 1.6}, {0.15, -0.2, 0.1}), PhasePoint::Zero(8), 20.0,
        std::nullopt);
  std::mt19937_64 rng(5);
  const Dimensions dims(2, 1);
  const PhaseMatrix s0 = fixtures::random_symplectic(dims, rng);
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  k(0, 2) = k(2, 0) = 0.3;
  k(1, 2) = k(2, 1) = -0.2;
  check(models::quadratic_potential(dims, k, Eigen::MatrixXd::Identity(3, 3), "bath"), PhasePoint::Zero(6),
        10.0, s0);
  std::ostringstream d;
  d << knots << " knots; max |dS + 2 ln mu| " << sci(worst) << " (<= 1e-8)";
  return {worst <= 1e-8, d.str()};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "symcamel_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream((dir / name).string()) << text;
    return (dir / name).string();
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string config = write(
      "run.conf",
      "system.n_A = 1\nsystem.n_B = 1\nhamiltonian.model = coupled_oscillators\nhamiltonian.epsilon = 0.2\n"
      "initial.z0 = 0.5, 0, -0.3, 0.2\nintegration.t_end = 20\nintegration.step = 1e-3\n"
      "sweep.key = hamiltonian.epsilon\nsweep.values = 0.1; 0.2; 0.3\n");
  std::ostringstream err;
  bool ok = true;
  const int a = cli::cmd_run(config, {.seed = 9, .jobs = 1, .output = (dir / "a.csv").string()}, err);
  const int b = cli::cmd_run(config, {.seed = 9, .jobs = 3, .output = (dir / "b.csv").string()}, err);
  const int c = cli::cmd_run(config, {.seed = 9, .jobs = 1, .output = (dir / "c.jsonl").string()}, err);
  const int e = cli::cmd_run(config, {.seed = 9, .jobs = 2, .output = (dir / "e.jsonl").string()}, err);
  ok &= a == 0 && b == 0 && c == 0 && e == 0;
  int identical = 0;
  for (int i = 0; i < 3; ++i) {
    const auto fa = slurp(dir / ("a_" + std::to_string(i) + ".csv"));
    const auto fc = slurp(dir / ("c_" + std::to_string(i) + ".jsonl"));
    if (!fa.empty() && fa == slurp(dir / ("b_" + std::to_string(i) + ".csv")) && !fc.empty() &&
        fc == slurp(dir / ("e_" + std::to_string(i) + ".jsonl")))
      ++identical;
  }
  ok &= identical == 3;

  const std::pair<std::string, std::string> malformed[] = {
      {"system.n_B = 1\nhamiltonian.model = free_particle\nintegration.t_end = 1\n", "'system.n_A'"},
      {"system.n_A = 1\nsystem.n_B = one\nhamiltonian.model = free_particle\nintegration.t_end = 1\n",
       "line 2: field 'system.n_B'"},
      {"system.n_A = 1\nsystem.n_B = 1\nhamiltonian.model = free_particle\n", "'integration.t_end'"},
      {"system.n_A = 1\nsystem.n_B = 1\nhamiltonian.model = free_particle\nintegration.t_end = 1\n"
       "integration.step = 0\n",
       "line 5: field 'integration.step'"},
  };
  int precise = 0;
  for (const auto& [text, needle] : malformed) {
    std::ostringstream msg;
    const int code = cli::cmd_run(write("bad.conf", text), {}, msg);
    if (code == 2 && msg.str().find(needle) != std::string::npos) ++precise;
  }
  ok &= precise == 4;
  fs::remove_all(dir);
  std::ostringstream d;
  d << identical << "/3 sweep outputs byte-identical across runs and --jobs (CSV and JSONL); " << precise
    << "/4 malformed configs exit 2 naming the field";
  return {ok, d.str()};
}

}  // namespace

int main() {
  const EnsembleStats ens = run_ensemble();

  report(1, "Extended camel suite", [&] {
    std::ostringstream d;
    d << ens.cases << " maps (2n = 4, 6, 8, every split); max lambda " << std::setprecision(17) << ens.max_lambda
      << " (<= 1 + 1e-9); containment failures " << ens.containment_failures << "; " << sci(ens.seconds)
      << " s (< 30 s)";
    return Outcome{ens.max_lambda <= 1.0 + 1e-9 && ens.containment_failures == 0 && ens.seconds < 30.0,
                   d.str()};
  });
  report(2, "Non-squeezing shadow", [&] {
    std::ostringstream d;
    d << "min capacity - pi R^2 = " << sci(ens.min_capacity_margin) << " (>= -1e-9); min area - pi R^2 over "
      << ens.area_cases << " n_A = 1 cases = " << sci(ens.min_area_margin) << " (>= -1e-9)";
    return Outcome{ens.min_capacity_margin >= -1e-9 && ens.min_area_margin >= -1e-9, d.str()};
  });
  report(3, "Determinant/entropy consistency", [&] {
    std::ostringstream d;
    d << "max |det(P/P_BB) det P_BB - 1| " << sci(ens.max_det_residual) << ", max entropy route gap "
      << sci(ens.max_entropy_gap) << " (both <= 1e-8)";
    return Outcome{ens.max_det_residual <= 1e-8 && ens.max_entropy_gap <= 1e-8, d.str()};
  });
  report(4, "Integrator oracles", integrator_oracles);
  report(5, "Semiclassical subsystem pipeline", semiclassical_pipeline);
  report(6, "Quantum-condition preservation", quantum_condition_preservation);
  report(7, "Gaussian marginalization oracle", marginalization_oracle);
  report(8, "Entropy-purity law", entropy_purity_law);
  report(9, "CLI determinism", cli_determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
