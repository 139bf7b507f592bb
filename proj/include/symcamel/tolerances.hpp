#pragma once

#include <string_view>

#include "symcamel/errors.hpp"

namespace symcamel {

// Every threshold used by the library lives here; tests read the same record.
struct Tolerances {
  double symplectic = 1e-9;            // defect bound for matrices flagged symplectic
  double symplectic_input = 1e-8;      // accepted defect of caller-supplied S
  double symmetry = 1e-10;             // max |M - M^T| entry for "symmetric" inputs
  double rcond_floor = 1e-12;          // SPD solves below this are singular
  double degeneracy_gap = 1e-10;       // symplectic eigenvalue gap flagged as degenerate
  double quantum_margin = 1e-10;       // slack of the quantum condition
  double reproject_trigger = 1e-8;     // monodromy defect that triggers reprojection
  double reproject_target = 1e-14;
  double containment_slack = 1e-9;     // relative slack on ellipsoid membership
  double cross_check = 1e-8;           // agreement of two routes (entropy, purity)
  double schur_inverse = 1e-10;        // Sigma_A vs AA block of Sigma
  double fd_hessian_step = 1e-6;       // relative step for gradient differences
  double cli_symplectic_input = 1e-6;  // matrices read from files
};

inline Tolerances scaled(Tolerances t, double factor) {
  t.symplectic *= factor;
  t.symplectic_input *= factor;
  t.symmetry *= factor;
  t.containment_slack *= factor;
  t.cross_check *= factor;
  t.schur_inverse *= factor;
  t.cli_symplectic_input *= factor;
  t.quantum_margin *= factor;
  return t;
}

/// Named profiles: "default", "strict" (0.1x) and "loose" (100x).
inline Tolerances tolerance_profile(std::string_view name) {
  if (name.empty() || name == "default") return Tolerances{};
  if (name == "strict") return scaled(Tolerances{}, 0.1);
  if (name == "loose") return scaled(Tolerances{}, 100.0);
  throw InvalidInput("unknown tolerance profile '" + std::string(name) + "'");
}

}  // namespace symcamel
