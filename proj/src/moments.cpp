#include "kpm/moments.hpp"

#include <cmath>
#include <limits>

namespace kpm {

MomentReport delta_side_moments(const Kernel& kernel, const PointConfiguration& config,
                                double x, const ScanPolicy& policy) {
  MomentReport report;
  report.m0 = 1.0;

  const NormEstimate norm = delta_norm_sq(kernel, config, x, policy);
  report.m1_verdict = norm.verdict;
  if (norm.verdict == ScanVerdict::Diverging) {
    report.m1_infinite = true;
    report.m1 = std::numeric_limits<double>::infinity();
  } else {
    report.m1 = norm.estimate;
  }

  const L2RowTrace row = l2_row_test(kernel, config, x, policy);
  report.m2_verdict = row.verdict;
  report.m2 = row.verdict == ScanVerdict::Diverging ? std::numeric_limits<double>::infinity()
                                                    : row.estimate;

  if (report.m1_verdict == ScanVerdict::CertifiedBounded &&
      report.m2_verdict == ScanVerdict::CertifiedBounded) {
    report.covariance = report.m2 - report.m1 * report.m1;
  } else {
    report.covariance = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

MomentReport kernel_side_moments(const Kernel& kernel, const PointConfiguration& config,
                                 double x, const ScanPolicy& policy) {
  MomentReport report;
  report.m0 = kernel.evaluate(x, x);
  report.m1 = 1.0;
  report.m1_verdict = ScanVerdict::CertifiedBounded;

  const NormEstimate norm = delta_norm_sq(kernel, config, x, policy);
  report.m2_verdict = norm.verdict;
  report.m2 = norm.verdict == ScanVerdict::Diverging ? std::numeric_limits<double>::infinity()
                                                     : norm.estimate;
  report.covariance = std::numeric_limits<double>::quiet_NaN();
  return report;
}

CrossMomentCheck cross_moment_identity(const Kernel& kernel, const PointConfiguration& config,
                                       double x, const ScanPolicy& policy, double rel_tol) {
  CrossMomentCheck check;
  const NormEstimate norm = delta_norm_sq(kernel, config, x, policy);
  check.verdict = norm.verdict;
  check.lhs = norm.estimate;

  const std::size_t n = std::min(policy.max_n, config.size());
  check.rhs = minor_det_ratio(kernel, config, x, n, policy.eps_pd);

  if (norm.verdict == ScanVerdict::CertifiedBounded) {
    const double scale = std::max({std::abs(check.lhs), std::abs(check.rhs), 1e-300});
    check.pass = std::abs(check.lhs - check.rhs) / scale <= rel_tol;
  }
  return check;
}

}  // namespace kpm
