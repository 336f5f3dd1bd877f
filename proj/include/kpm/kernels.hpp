#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "kpm/points.hpp"

namespace kpm {

/// Built-in kernels. Domain rules are enforced at Gram assembly:
///   Min      — points in (0, inf), strictly increasing
///   Bridge   — points in the open interval (0, 1), strictly increasing
///   Binomial — nonnegative integer points
///   Sinc     — any real points
///   MatrixBacked — integer indices into a user-supplied symmetric matrix
enum class BuiltinKernelId { Min, Bridge, Binomial, Sinc, MatrixBacked };

std::optional<BuiltinKernelId> kernel_id_from_name(std::string_view name);
const char* to_string(BuiltinKernelId id);

Kernel make_min_kernel();
Kernel make_bridge_kernel();
Kernel make_binomial_kernel();
Kernel make_sinc_kernel();

/// Kernel backed by an explicit symmetric matrix; points are row indices.
/// Throws InputError if the matrix is not exactly symmetric.
Kernel make_matrix_kernel(Eigen::MatrixXd entries);

/// MatrixBacked requires the matrix overload above.
Kernel make_kernel(BuiltinKernelId id);

// Closed-form oracles.

/// log det of the min-kernel Gram on strictly increasing positive points:
/// log x_1 + sum_i log(x_{i+1} - x_i).
double min_log_det(const std::vector<double>& points);

struct DeltaNormValue {
  double value;
  bool window_edge;  // last index of a finite window; the value is the n = i case
};

/// Squared norm of the point mass at index i (0-based) for the min kernel,
/// (x_{i+1} - x_{i-1}) / ((x_i - x_{i-1})(x_{i+1} - x_i)) with the virtual
/// origin x_{-1} := 0. For the last index of a finite window the one-sided
/// value 1 / (x_i - x_{i-1}) is returned and flagged window_edge.
DeltaNormValue min_delta_norm_sq(const std::vector<double>& points, std::size_t i);

/// log det of the bridge-kernel Gram on increasing points inside (0, 1):
/// log x_1 + sum log(x_{i+1} - x_i) + log(1 - x_n).
double bridge_log_det(const std::vector<double>& points);

// Pascal-triangle machinery, exact in 64-bit integers with overflow
// detection (IntegerOverflow); entries stay representable through row 66.

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// C(n, k) by the Pascal recurrence (never factorial ratios).
std::int64_t binomial_coefficient(int n, int k);

/// (n+1) x (n+1) lower-triangular matrix with entries C(x, y), y <= x.
IntMatrix pascal_lower(int n);

/// Its exact inverse, entries (-1)^(x-y) C(x, y).
IntMatrix pascal_lower_inverse(int n);

/// Binomial-kernel Gram on {0, ..., n}; equals pascal_lower * pascal_lower^T.
IntMatrix binomial_gram(int n);

/// Exact inverse of the binomial-kernel Gram via the triangular factors;
/// the diagonal entry at x is sum_{k=x}^{n} C(k, x)^2.
IntMatrix binomial_gram_inverse(int n);

struct SincGapReport {
  double head_integral;      // integral of |psi'|^2 over [0, T]
  double tail_integral;      // same over [T, 2T]
  double max_zero_residual;  // max |psi(n pi)| over n pi <= T
};

/// Checks the gap function psi(t) = sin t / t: psi vanishes at the positive
/// multiples of pi while its derivative keeps positive finite energy.
/// Composite-Simpson quadrature with step h and the analytic derivative
/// psi'(t) = (t cos t - sin t) / t^2, psi'(0) = 0.
SincGapReport sinc_gap_check(double horizon, double step);

}  // namespace kpm
