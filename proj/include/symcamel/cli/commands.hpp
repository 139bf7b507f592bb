#pragma once

// Subcommands of the symcamel tool. Each returns a process exit code:
//   0 success, 1 internal failure, 2 malformed configuration or arguments,
//   3 divergence (partial output written), 4 invalid numerical input.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "symcamel/camel.hpp"
#include "symcamel/cli/config.hpp"
#include "symcamel/cli/models.hpp"
#include "symcamel/cli/output.hpp"
#include "symcamel/gaussian.hpp"

namespace symcamel::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kDiverged = 3, kInvalidInput = 4 };

inline constexpr const char* tolerance_profile_env = "SYMCAMEL_TOLERANCE_PROFILE";

struct CommonOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::string> output{};
};

struct ProjectOptions {
  std::string matrix;
  std::optional<int> n_a{};
  std::optional<int> n_b{};
  double radius = 1.0;
  int samples = 10000;
};

struct MatrixOptions {
  std::string matrix;
  double radius = 1.0;
};

inline Tolerances tolerances_from_env() {
  const char* name = std::getenv(tolerance_profile_env);
  if (!name || !*name) return tolerance_profile("default");
  try {
    return tolerance_profile(name);
  } catch (const InvalidInput&) {
    throw ConfigError(tolerance_profile_env, 0,
                      std::string("unknown tolerance profile '") + name + "' (default|strict|loose)");
  }
}

/// Maps exceptions to exit codes, printing the message on err.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const NumericalInconsistency& e) {
    err << "error: internal consistency check failed: " << e.what() << '\n';
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

namespace detail {

inline void write_trace(const RunConfig& c, const ReferenceOrbit& orbit, const Tolerances& tol,
                        TraceWriter& writer) {
  const double radius = c.ball_radius();
  for (std::size_t k = 0; k < orbit.size(); k += static_cast<std::size_t>(c.stride)) {
    ReferenceOrbit knot;
    knot.dims = orbit.dims;
    knot.z0 = orbit.z0;
    knot.times = {orbit.times[k]};
    knot.points = {orbit.points[k]};
    knot.monodromy = {orbit.monodromy[k]};
    const SubsystemTrace tr = subsystem_trace(knot, c.hbar, std::nullopt, tol);
    writer.row(make_row(tr, 0, radius));
  }
}

/// Runs one configuration and writes its trace to `path`.
inline int run_single(const RunConfig& c, const std::string& path, const Tolerances& tol,
                      std::ostream& err) {
  return guarded(err, [&]() -> int {
    const HamiltonianModel h = build_model(c);
    const Dimensions dims(c.n_a, c.n_b);
    PhasePoint z0 = PhasePoint::Zero(dims.phase_dim());
    for (std::size_t i = 0; i < c.z0.size(); ++i) z0(static_cast<Eigen::Index>(i)) = c.z0[i];
    IntegratorOptions opts;
    opts.step = c.step;
    opts.scheme = c.scheme == "leapfrog" ? Scheme::Leapfrog : Scheme::RK4;
    opts.reproject = c.reproject;
    opts.frozen_hessian = c.frozen_hessian;
    if (opts.scheme == Scheme::Leapfrog && !h.kinetic_potential())
      throw ConfigError("integration.scheme", 0, "leapfrog needs a kinetic-plus-potential model");
    const auto grid = uniform_grid(c.t_end, c.step);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output.path", 0, "cannot open '" + path + "' for writing");
    TraceWriter writer(out, c.format, c.fields, dims);
    writer.header();
    try {
      const ReferenceOrbit orbit = integrate_orbit(h, z0, grid, opts, tol);
      write_trace(c, orbit, tol, writer);
    } catch (const DivergenceError& e) {
      try {
        write_trace(c, e.partial(), tol, writer);
      } catch (const Error&) {
        // The last finite knots may already be too ill-conditioned to reduce.
      }
      writer.diverged(e.time(), e.what());
      err << "error: " << e.what() << " (partial output in " << path << ")\n";
      return kDiverged;
    }
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
    return kOk;
  });
}

inline PhaseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("matrix", 0, "cannot open '" + path + "'");
  try {
    return read_matrix(in);
  } catch (const InvalidInput& e) {
    throw ConfigError("matrix", 0, path + ": " + e.what());
  }
}

inline std::vector<std::vector<double>> rows(const PhaseMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

inline void emit(const nlohmann::ordered_json& j, const CommonOptions& common, std::ostream& out) {
  if (common.output) {
    std::ofstream f(*common.output, std::ios::binary);
    if (!f) throw ConfigError("--output", 0, "cannot open '" + *common.output + "' for writing");
    f << j.dump(2) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
}

inline PhaseMatrix validated_spd_input(const PhaseMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw InvalidDimension("matrix must be square with even side, got " + std::to_string(m.rows()) +
                           " x " + std::to_string(m.cols()));
  const double asym = asymmetry(m);
  if (asym > tol.symmetry * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw InvalidInput("matrix is not symmetric (asymmetry " + format_number(asym) + ")");
  Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(symmetrized(m), Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw InvalidInput("matrix is not positive definite (smallest eigenvalue " +
                       format_number(eig.eigenvalues().minCoeff()) + ")");
  return symmetrized(m);
}

}  // namespace detail

/// Integrates the configured system (or each member of its sweep) and
/// writes one trace file per member.
inline int cmd_run(const std::string& config_path, const CommonOptions& common,
                   std::ostream& err = std::cerr) {
  std::vector<RunConfig> configs;
  std::vector<std::string> paths;
  Tolerances tol;
  const int parsed = guarded(err, [&]() -> int {
    tol = tolerances_from_env();
    if (common.jobs < 1) throw ConfigError("--jobs", 0, "must be at least 1");
    const RawConfig raw = read_raw_config(config_path);
    const auto members = expand_sweep(raw);
    for (const auto& m : members) configs.push_back(build_config(m));
    for (std::size_t i = 0; i < configs.size(); ++i) {
      build_model(configs[i]);  // model parameters are checked before any work starts
      const std::string base = common.output ? *common.output : configs[i].path;
      paths.push_back(members.size() > 1 ? sweep_path(base, i) : base);
    }
    return kOk;
  });
  if (parsed != kOk) return parsed;

  std::vector<int> codes(configs.size(), kOk);
  std::vector<std::string> messages(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream msg;
      codes[i] = detail::run_single(configs[i], paths[i], tol, msg);
      messages[i] = msg.str();
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<int>(common.jobs, static_cast<int>(configs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  int code = kOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    err << messages[i];
    if (code == kOk) code = codes[i];
  }
  return code;
}

/// Shadow of the ball B_R under the symplectic matrix read from a file.
inline int cmd_project(const ProjectOptions& p, const CommonOptions& common,
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&]() -> int {
    Tolerances tol = tolerances_from_env();
    const PhaseMatrix s = detail::load_matrix(p.matrix);
    if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() < 4)
      throw InvalidDimension("project: need a square matrix with even side >= 4, got " +
                             std::to_string(s.rows()) + " x " + std::to_string(s.cols()));
    const int n = static_cast<int>(s.rows() / 2);
    const int n_a = p.n_a.value_or(1);
    const int n_b = p.n_b.value_or(n - n_a);
    if (n_a < 1 || n_b < 1 || n_a + n_b != n)
      throw ConfigError("--n-a/--n-b", 0,
                        "need n_A, n_B >= 1 with n_A + n_B = " + std::to_string(n));
    if (!(p.radius > 0.0)) throw ConfigError("--radius", 0, "must be positive");
    if (p.samples < 1) throw ConfigError("--samples", 0, "must be positive");
    const Dimensions dims(n_a, n_b);
    const double defect = symplecticity_defect(s, dims);
    if (!(defect <= tol.cli_symplectic_input))
      throw InvalidInput("matrix is not symplectic: defect " + format_number(defect) +
                         " exceeds " + format_number(tol.cli_symplectic_input));
    // Inputs within the CLI tolerance but above the library one are snapped
    // onto the symplectic group so that the determinant identities hold.
    const bool reprojected = defect > tol.symplectic_input;
    const PhaseMatrix snapped =
        reprojected ? reproject_symplectic(s, standard_J(dims), tol.reproject_target) : s;

    const ProjectionResult r = project_ball(snapped, dims, p.radius, tol);
    std::mt19937_64 rng(common.seed);
    const bool contained = containment_check(r, p.radius, p.samples, rng, tol);

    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["command"] = "project";
    j["n_A"] = n_a;
    j["n_B"] = n_b;
    j["radius"] = p.radius;
    j["symplecticity_defect"] = defect;
    j["reprojected"] = reprojected;
    j["spectrum"] = r.spectrum.values;
    j["entropy_kB"] = r.entropy_increase;
    j["entropy_from_det"] = r.entropy_from_det;
    j["volume_ratio"] = r.volume_ratio;
    j["capacity"] = ellipsoid_capacity(r.omega_A, tol);
    j["det_identity_residual"] = r.det_identity_residual;
    j["shadow_shape"] = detail::rows(r.omega_A.shape);
    j["containment"] = {{"passed", contained}, {"samples", p.samples}, {"seed", common.seed}};
    detail::emit(j, common, out);
    return kOk;
  });
}

inline int cmd_williamson(const MatrixOptions& p, const CommonOptions& common,
                          std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&]() -> int {
    const Tolerances tol = tolerances_from_env();
    const PhaseMatrix m = detail::validated_spd_input(detail::load_matrix(p.matrix), tol);
    const WilliamsonDecomposition w = williamson_diagonalize(m, tol);
    const Eigen::VectorXd d = w.D.diagonal();
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["command"] = "williamson";
    j["symplectic_eigenvalues"] = w.spectrum.values;
    j["D"] = std::vector<double>(d.data(), d.data() + d.size());
    j["S"] = detail::rows(w.S);
    j["reconstruction_residual"] = reconstruction_residual(w, m);
    j["symplecticity_defect"] = symplecticity_defect(w.S);
    j["degenerate"] = w.degenerate;
    detail::emit(j, common, out);
    return kOk;
  });
}

inline int cmd_capacity(const MatrixOptions& p, const CommonOptions& common,
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&]() -> int {
    const Tolerances tol = tolerances_from_env();
    if (!(p.radius > 0.0)) throw ConfigError("--radius", 0, "must be positive");
    const PhaseMatrix m = detail::validated_spd_input(detail::load_matrix(p.matrix), tol);
    const WilliamsonDecomposition w = williamson_diagonalize(m, tol);
    const Ellipsoid e{PhasePoint::Zero(m.rows()), m, p.radius};
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["command"] = "capacity";
    j["radius"] = p.radius;
    j["capacity"] = ellipsoid_capacity(e, tol);
    j["symplectic_eigenvalues"] = w.spectrum.values;
    j["reconstruction_residual"] = reconstruction_residual(w, m);
    detail::emit(j, common, out);
    return kOk;
  });
}

}  // namespace symcamel::cli
