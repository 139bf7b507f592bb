#pragma once

// Phase-space primitives. Every vector and matrix uses the storage layout
// (x_A, p_A, x_B, p_B): the first 2*n_A coordinates belong to subsystem A
// (positions then momenta), the remaining 2*n_B to subsystem B.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "symcamel/errors.hpp"
#include "symcamel/tolerances.hpp"

namespace symcamel {

using PhasePoint = Eigen::VectorXd;
using PhaseMatrix = Eigen::MatrixXd;

class Dimensions {
 public:
  Dimensions(int n_a, int n_b) : n_a_(n_a), n_b_(n_b) {
    if (n_a < 1) throw InvalidDimension("n_A must be >= 1, got " + std::to_string(n_a));
    if (n_b < 0) throw InvalidDimension("n_B must be >= 0, got " + std::to_string(n_b));
  }
  /// Single system with m degrees of freedom (no B part).
  static Dimensions single(int m) { return Dimensions(m, 0); }

  int n_a() const noexcept { return n_a_; }
  int n_b() const noexcept { return n_b_; }
  int n() const noexcept { return n_a_ + n_b_; }
  int phase_dim() const noexcept { return 2 * n(); }

  // Storage index of position/momentum of mode k, where modes 0..n_A-1 are A.
  int x_index(int mode) const {
    check_mode(mode);
    return mode < n_a_ ? mode : 2 * n_a_ + (mode - n_a_);
  }
  int p_index(int mode) const {
    check_mode(mode);
    return mode < n_a_ ? n_a_ + mode : 2 * n_a_ + n_b_ + (mode - n_a_);
  }

  friend bool operator==(const Dimensions&, const Dimensions&) = default;

 private:
  void check_mode(int mode) const {
    if (mode < 0 || mode >= n())
      throw OutOfRange("mode index " + std::to_string(mode) + " outside [0, " +
                       std::to_string(n()) + ")");
  }

  int n_a_;
  int n_b_;
};

struct BlockSplit {
  PhaseMatrix AA, AB, BA, BB;
};

/// Omega = {z : (z - center)^T shape (z - center) <= radius^2}.
struct Ellipsoid {
  PhasePoint center;
  PhaseMatrix shape;
  double radius;

  double quadratic_form(const PhasePoint& z) const {
    const PhasePoint d = z - center;
    return d.dot(shape * d);
  }
  bool contains(const PhasePoint& z, double relative_slack = 0.0) const {
    return quadratic_form(z) <= radius * radius * (1.0 + relative_slack);
  }
};

namespace detail {

inline void require_square(const PhaseMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw InvalidDimension(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected square");
}

inline void require_even_square(const PhaseMatrix& m, const char* what) {
  require_square(m, what);
  if (m.rows() == 0 || m.rows() % 2 != 0)
    throw InvalidDimension(std::string(what) + ": side " + std::to_string(m.rows()) +
                           " is not a positive even number");
}

}  // namespace detail

inline double asymmetry(const PhaseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline PhaseMatrix symmetrized(const PhaseMatrix& m) { return 0.5 * (m + m.transpose()); }

/// Standard symplectic form on m degrees of freedom in (x, p) order.
inline PhaseMatrix standard_J(int m) {
  if (m < 1) throw InvalidDimension("standard_J: dimension must be >= 1, got " + std::to_string(m));
  PhaseMatrix j = PhaseMatrix::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  return j;
}

inline PhaseMatrix direct_sum(const PhaseMatrix& a, const PhaseMatrix& b) {
  detail::require_even_square(a, "direct_sum (left operand)");
  if (b.size() != 0) detail::require_even_square(b, "direct_sum (right operand)");
  PhaseMatrix out = PhaseMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// J_A (+) J_B in the storage layout.
inline PhaseMatrix standard_J(const Dimensions& dims) {
  if (dims.n_b() == 0) return standard_J(dims.n_a());
  return direct_sum(standard_J(dims.n_a()), standard_J(dims.n_b()));
}

/// max |S^T J S - J|, with J the standard form of matching size.
inline double symplecticity_defect(const PhaseMatrix& s) {
  detail::require_even_square(s, "symplecticity_defect");
  const PhaseMatrix j = standard_J(static_cast<int>(s.rows() / 2));
  return (s.transpose() * j * s - j).cwiseAbs().maxCoeff();
}

/// Defect against J_A (+) J_B, the form of the storage layout.
inline double symplecticity_defect(const PhaseMatrix& s, const Dimensions& dims) {
  if (s.rows() != dims.phase_dim() || s.cols() != dims.phase_dim())
    throw InvalidDimension("symplecticity_defect: matrix side does not match dimensions");
  const PhaseMatrix j = standard_J(dims);
  return (s.transpose() * j * s - j).cwiseAbs().maxCoeff();
}

/// Permutation Q with Q * z_storage = (x_0..x_{n-1}, p_0..p_{n-1}).
/// Q^T standard_J(n) Q = standard_J(dims).
inline PhaseMatrix global_order_permutation(const Dimensions& dims) {
  const int n = dims.n();
  PhaseMatrix q = PhaseMatrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    q(k, dims.x_index(k)) = 1.0;
    q(n + k, dims.p_index(k)) = 1.0;
  }
  return q;
}

inline BlockSplit block_split(const PhaseMatrix& m, const Dimensions& dims) {
  const int a = 2 * dims.n_a();
  const int b = 2 * dims.n_b();
  if (m.rows() != a + b || m.cols() != a + b)
    throw InvalidDimension("block_split: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", dimensions require side " +
                           std::to_string(a + b));
  return BlockSplit{m.topLeftCorner(a, a), m.topRightCorner(a, b), m.bottomLeftCorner(b, a),
                    m.bottomRightCorner(b, b)};
}

inline PhaseMatrix reassemble(const BlockSplit& blocks) {
  const auto a = blocks.AA.rows();
  const auto b = blocks.BB.rows();
  PhaseMatrix m(a + b, a + b);
  m.topLeftCorner(a, a) = blocks.AA;
  m.topRightCorner(a, b) = blocks.AB;
  m.bottomLeftCorner(b, a) = blocks.BA;
  m.bottomRightCorner(b, b) = blocks.BB;
  return m;
}

/// Cholesky factor of an SPD matrix; throws SingularBlock when the
/// factorization fails or the reciprocal condition estimate is too small.
inline Eigen::LLT<PhaseMatrix> spd_factor(const PhaseMatrix& m, const char* what,
                                          const Tolerances& tol = {}) {
  Eigen::LLT<PhaseMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularBlock(std::string(what) + ": not positive definite", 0.0);
  const double rc = llt.rcond();
  if (!(rc >= tol.rcond_floor))
    throw SingularBlock(std::string(what) + ": reciprocal condition " + std::to_string(rc) +
                            " below floor",
                        rc);
  return llt;
}

inline PhaseMatrix spd_inverse(const PhaseMatrix& m, const char* what, const Tolerances& tol = {}) {
  const auto llt = spd_factor(m, what, tol);
  return symmetrized(llt.solve(PhaseMatrix::Identity(m.rows(), m.cols())));
}

inline double spd_log_det(const Eigen::LLT<PhaseMatrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

/// AA - AB BB^{-1} BA. An empty BB (n_B = 0) returns AA unchanged.
inline PhaseMatrix schur_complement(const BlockSplit& blocks, const Tolerances& tol = {}) {
  if (blocks.BB.size() == 0) return blocks.AA;
  if (asymmetry(blocks.BB) > tol.symmetry * std::max(1.0, blocks.BB.cwiseAbs().maxCoeff()))
    throw InvalidInput("schur_complement: BB block is not symmetric");
  const auto llt = spd_factor(blocks.BB, "schur_complement: BB block", tol);
  PhaseMatrix out = blocks.AA - blocks.AB * llt.solve(blocks.BA);
  const double scale = std::max(1.0, blocks.AA.cwiseAbs().maxCoeff());
  if (asymmetry(blocks.AA) <= tol.symmetry * scale &&
      (blocks.AB - blocks.BA.transpose()).cwiseAbs().maxCoeff() <= tol.symmetry * scale)
    out = symmetrized(out);
  return out;
}

/// Symplectic matrix that permutes modes: new mode k is old mode order[k].
inline PhaseMatrix mode_permutation(const Dimensions& dims, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != dims.n())
    throw InvalidDimension("mode_permutation: order has wrong length");
  const int d = dims.phase_dim();
  PhaseMatrix perm = PhaseMatrix::Zero(d, d);
  for (int k = 0; k < dims.n(); ++k) {
    perm(dims.x_index(k), dims.x_index(order[k])) = 1.0;
    perm(dims.p_index(k), dims.p_index(order[k])) = 1.0;
  }
  return perm;
}

inline double ball_volume(int dim, double radius) {
  // (pi R^2)^m / m! for even dim = 2m.
  const int m = dim / 2;
  return std::pow(std::numbers::pi * radius * radius, m) / std::tgamma(m + 1.0);
}

// Matrix text format: one row per line, entries separated by whitespace.
// Blank lines and lines starting with '#' are ignored.
inline PhaseMatrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v))
        throw InvalidInput("matrix text line " + std::to_string(line_no) + ": bad entry '" + tok +
                           "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("matrix text line " + std::to_string(line_no) + ": expected " +
                         std::to_string(rows.front().size()) + " entries, got " +
                         std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("matrix text: no rows");
  PhaseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline void write_matrix(std::ostream& out, const PhaseMatrix& m) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  out << os.str();
}

}  // namespace symcamel
