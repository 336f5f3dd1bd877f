#pragma once

#include <cstddef>
#include <vector>

#include "kpm/factorization.hpp"
#include "kpm/points.hpp"

namespace kpm {

/// Stopping rules for filtration scans. The underlying question is a
/// supremum over all finite subsets, so the scan can only report evidence:
/// a monotone sequence with vanishing window increments certifies a bound,
/// a cap breach or sustained positive log-slope flags divergence, anything
/// else stays inconclusive.
struct ScanPolicy {
  std::size_t max_n = 200;      // cap on filtration size
  std::size_t window = 5;       // plateau / slope window, in steps
  double rel_tol = 1e-9;        // relative plateau tolerance
  double divergence_cap = 1e12; // absolute value cap
  double slope_tol = 1e-3;      // log-scale slope that flags divergence
  double eps_pd = 1e-12;        // relative pivot floor for the bordered chain
  std::size_t audit_interval = 64;   // conditioning audit stride (0 disables)
  double audit_condition_cap = 1e12; // pivot-ratio estimate that triggers refactorization
  bool stop_at_verdict = true;  // stop as soon as a verdict is reached

  void validate() const;
};

enum class ScanVerdict { CertifiedBounded, Diverging, Inconclusive };
const char* to_string(ScanVerdict verdict);

struct TraceStep {
  std::size_t n;  // number of points in the working set
  double value;
};

/// Record of one filtration scan.
struct FiltrationTrace {
  double target = 0.0;
  std::size_t target_index = 0;
  std::vector<TraceStep> steps;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  double estimate = 0.0;     // last recorded value; the limit when certified
  double growth_rate = 0.0;  // fitted log-scale slope over the last window
  bool saturated = false;    // bordering hit the pivot floor before max_n
  std::size_t refactorizations = 0;  // conditioning fallbacks taken
  ScanPolicy policy;
};

/// Coefficients of the projected point mass: K_F^{-1} delta_x over F.
Eigen::VectorXd projection_coeffs(const GramFactorization& fact, std::size_t x_index);

/// (K_F^{-1} delta_x)(x), the squared norm of the projected point mass.
double projected_delta_norm_sq(const GramFactorization& fact, std::size_t x_index);

/// Scans (K_{F_n}^{-1} delta_x)(x) for n from (index of x)+1 up to
/// policy.max_n, growing the factorization by bordering. The sequence is
/// nondecreasing by construction. If the bordered chain hits the pivot
/// floor before max_n the trace is marked saturated and classified from the
/// recorded steps.
FiltrationTrace membership_scan(const Kernel& kernel, const PointConfiguration& config,
                                double x, const ScanPolicy& policy);

struct NormEstimate {
  double estimate = 0.0;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  FiltrationTrace trace;
};

/// Estimate of ||delta_x||^2 as the limit of the membership scan. The
/// estimate is numeric only when the verdict certifies it.
NormEstimate delta_norm_sq(const Kernel& kernel, const PointConfiguration& config, double x,
                           const ScanPolicy& policy);

/// det(minor of K_{F_n} omitting row/column of x) / det(K_{F_n}), computed
/// in log space from two factorizations. Equals the projected-norm value by
/// Cramer's rule; the empty minor has determinant 1.
double minor_det_ratio(const Kernel& kernel, const PointConfiguration& config, double x,
                       std::size_t n, double eps_pd = 1e-12);

struct EntryEstimate {
  double estimate = 0.0;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  std::vector<TraceStep> steps;
  bool saturated = false;
};

/// Estimate of the induced inner product <delta_x, delta_y> as the
/// filtration limit of (K_{F_n}^{-1})_{xy}, with plateau detection on the
/// absolute window differences.
EntryEstimate induced_kernel_entry(const Kernel& kernel, const PointConfiguration& config,
                                   double x, double y, const ScanPolicy& policy);

struct L2RowTrace {
  std::vector<TraceStep> partial_sums;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  double estimate = 0.0;
  bool saturated = false;
  ScanVerdict diag_verdict = ScanVerdict::Inconclusive;  // membership verdict for x itself
};

/// Partial sums of sum_y (K_{F_n}^{-1})_{xy}^2 along the filtration, the
/// working estimate of the squared l^2 norm of the induced-kernel row at x.
/// Inconclusive whenever the row entries themselves fail to converge (the
/// membership scan for x does not certify).
L2RowTrace l2_row_test(const Kernel& kernel, const PointConfiguration& config, double x,
                       const ScanPolicy& policy);

struct DelProjection {
  Eigen::VectorXd coeffs;       // kernel-expansion coefficients over F
  double residual_norm_sq = 0;  // ||f - projection||^2 in the finite model
};

/// Orthogonal projection of f = sum_y c_y k_y onto span{delta_s : s in
/// subset} inside the finite model. In the model <delta_s, f> = c_s and the
/// delta Gram is the (subset, subset) block of K_F^{-1}.
DelProjection del_projection(const GramFactorization& fact, const Eigen::VectorXd& f_coeffs,
                             const std::vector<std::size_t>& subset);

/// Same, but first membership-scans every subset point and throws
/// SubsetMembershipUnverified if any scan comes back Diverging.
DelProjection del_projection_checked(const Kernel& kernel, const PointConfiguration& config,
                                     std::size_t n, const Eigen::VectorXd& f_coeffs,
                                     const std::vector<std::size_t>& subset,
                                     const ScanPolicy& policy);

}  // namespace kpm
