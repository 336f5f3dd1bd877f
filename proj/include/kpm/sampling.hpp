#pragma once

#include <cstddef>
#include <vector>

#include "kpm/points.hpp"
#include "kpm/scan.hpp"

namespace kpm {

/// Indices of the sample points inside a configuration.
struct SampleSet {
  std::vector<std::size_t> indices;
};

/// Largest epsilon with sum_{s in S} |f(s)|^2 >= epsilon ||f||^2 over the
/// span of {k_x : x in F_n}: the smallest eigenvalue of the generalized
/// problem (K_{.S} K_{S.}) v = epsilon K v. Returns 0 when the sampling map
/// is rank deficient on the model (S is not a sample set at this
/// truncation). Whether S samples the full space is a density question the
/// finite data cannot settle; only the per-truncation bound is reported.
double frame_lower_bound(const Kernel& kernel, const PointConfiguration& config,
                         const SampleSet& samples, std::size_t n, double eps_pd = 1e-12);

/// f = sum_s c_s k_s with finite support inside a configuration.
struct KernelExpansion {
  std::vector<std::size_t> support;  // indices into the configuration
  Eigen::VectorXd coefficients;
  double norm_sq = 0.0;  // c^T K_S c, the double-sum quadratic form
};

/// Builds the reconstruction f = sum_{s in S} pairing(s) k_s from the
/// point-mass pairings <delta_s, f>. Throws NormDivergent when the
/// quadratic-form norm exceeds the cap.
KernelExpansion interpolate(const Kernel& kernel, const PointConfiguration& config,
                            const SampleSet& samples, const Eigen::VectorXd& pairings,
                            double divergence_cap = 1e12);

/// Same, but first membership-scans every sample point and throws
/// SubsetMembershipUnverified on a Diverging verdict.
KernelExpansion interpolate_checked(const Kernel& kernel, const PointConfiguration& config,
                                    const SampleSet& samples, const Eigen::VectorXd& pairings,
                                    const ScanPolicy& policy);

/// Pointwise value of an expansion: f(x) = sum_s c_s k(x_s, x).
double evaluate_expansion(const Kernel& kernel, const PointConfiguration& config,
                          const KernelExpansion& expansion, double x);

/// Point-mass pairings of a function given by its values on F_n: within the
/// finite model <delta_s, f> is coefficient s of K^{-1} (f values).
Eigen::VectorXd pairings_from_values(const Kernel& kernel, const PointConfiguration& config,
                                     std::size_t n, const Eigen::VectorXd& values,
                                     double eps_pd = 1e-12);

/// Compares ||sum xi_s k_s|| computed from the restricted Gram against the
/// same norm through the full Gram, over seeded random coefficient vectors.
/// The two quadratic forms are the same submatrix, so the discrepancy is
/// roundoff only.
double restriction_isometry_check(const Kernel& kernel, const PointConfiguration& config,
                                  const SampleSet& samples, int trials, unsigned seed);

}  // namespace kpm
