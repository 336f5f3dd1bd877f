#pragma once

#include "kpm/scan.hpp"

namespace kpm {

/// Low-order moments of the spectral measure attached to a point, computed
/// through the finite Gram data (the measures themselves live on infinite-
/// dimensional spaces and are never discretized).
struct MomentReport {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double covariance = 0.0;  // m2 - m1^2 when both scans certify, else NaN
  ScanVerdict m1_verdict = ScanVerdict::Inconclusive;
  ScanVerdict m2_verdict = ScanVerdict::Inconclusive;
  bool m1_infinite = false;  // membership scan diverges: the point mass has no finite norm
};

/// Moments of the measure attached to delta_x on the sequence side:
/// m0 = 1, m1 = ||delta_x||^2 (membership-scan limit), m2 = the l^2 row sum
/// of the induced kernel, covariance = m2 - m1^2.
MomentReport delta_side_moments(const Kernel& kernel, const PointConfiguration& config,
                                double x, const ScanPolicy& policy);

/// Moments of the measure attached to k_x on the function-space side:
/// m0 = k(x, x), m1 = 1, m2 = ||delta_x||^2.
MomentReport kernel_side_moments(const Kernel& kernel, const PointConfiguration& config,
                                 double x, const ScanPolicy& policy);

struct CrossMomentCheck {
  double lhs = 0.0;  // first delta-side moment, from the bordered-scan route
  double rhs = 0.0;  // second kernel-side moment, from the determinant-ratio route
  bool pass = false;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
};

/// The two routes to ||delta_x||^2 must agree: the filtration-scan limit
/// and the minor-determinant ratio at the final truncation.
CrossMomentCheck cross_moment_identity(const Kernel& kernel, const PointConfiguration& config,
                                       double x, const ScanPolicy& policy,
                                       double rel_tol = 1e-8);

}  // namespace kpm
