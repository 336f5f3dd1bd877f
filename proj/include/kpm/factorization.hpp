#pragma once

#include <Eigen/Core>
#include <cstddef>

#include "kpm/points.hpp"

namespace kpm {

/// Unpivoted LDL^T factorization of a symmetric positive definite Gram
/// matrix, K = L D L^T with unit lower-triangular L and pivots d_1..d_n.
///
/// No row exchanges are performed: the pivot sequence is the sequence of
/// Schur complements along the filtration F_1 c F_2 c ..., so bordering by
/// one point appends exactly one pivot and the log-determinant is the
/// running sum of log pivots. Determinants are kept in log space only.
///
/// Values are immutable through the public API; border_extend returns a new
/// factorization. Scan loops that own their chain may use extend() to grow
/// in place (storage is reserved geometrically, or up front via reserve()).
class GramFactorization {
 public:
  GramFactorization() = default;

  /// Factorizes a symmetric Gram matrix. Throws NotPositiveDefinite at the
  /// first pivot <= eps_pd * max diagonal entry (1-based pivot index).
  static GramFactorization factorize(const GramMatrix& gram, double eps_pd = 1e-12);

  std::size_t size() const { return n_; }
  double log_det() const { return log_det_; }
  double pivot(std::size_t i) const { return d_(static_cast<Eigen::Index>(i)); }
  Eigen::VectorXd pivots() const { return d_.head(static_cast<Eigen::Index>(n_)); }
  double max_diagonal() const { return maxdiag_; }

  /// Pivot-ratio condition estimate, max d_i / min d_i.
  double condition_estimate() const;

  /// Solves K v = rhs (forward, diagonal, backward substitution).
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// (K^-1)_{ij}, computed from the two unit forward solutions so the result
  /// is exactly symmetric in (i, j).
  double inverse_entry(std::size_t i, std::size_t j) const;

  /// c^T K c evaluated through the factors as ||D^(1/2) L^T c||^2.
  double quad_form(const Eigen::VectorXd& c) const;

  /// L D L^T, for residual checks.
  Eigen::MatrixXd reconstruct() const;

  /// Factorization of the (n+1)x(n+1) bordered matrix [[K, b], [b^T, c]].
  /// The new pivot is the Schur complement s = c - b^T K^-1 b; throws
  /// NotPositiveDefinite when s <= eps_pd * max diagonal (corner included).
  GramFactorization border_extend(const Eigen::VectorXd& new_column, double corner,
                                  double eps_pd = 1e-12) const;

  /// In-place bordering step; same contract as border_extend. Returns the
  /// new pivot.
  double extend(const Eigen::VectorXd& new_column, double corner, double eps_pd = 1e-12);

  /// Preallocates storage for in-place growth up to `capacity` points.
  void reserve(std::size_t capacity);

  // Building blocks used by the filtration scans.

  /// Solves L y = rhs.
  Eigen::VectorXd forward(const Eigen::VectorXd& rhs) const;
  /// Solves L^T u = rhs.
  Eigen::VectorXd backward(const Eigen::VectorXd& rhs) const;
  /// sum_i y_i^2 / d_i; equals rhs^T K^-1 rhs when y = forward(rhs).
  double diag_quad(const Eigen::VectorXd& y) const;
  /// Appends one entry to a maintained forward solution z of L z = e_x:
  /// the value of z at the row just added by extend().
  double next_forward_entry(const Eigen::VectorXd& z) const;

 private:
  void ensure_capacity(std::size_t needed);

  std::size_t n_ = 0;
  // L is stored transposed: column i of ut_ is row i of L, so the forward
  // sweep reads contiguous memory. Top-left n x n valid; unit diagonal stored.
  Eigen::MatrixXd ut_;
  Eigen::VectorXd d_;  // capacity-sized; leading n valid
  double log_det_ = 0.0;
  double maxdiag_ = 0.0;
};

}  // namespace kpm
