#include "kpm/sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kpm/factorization.hpp"

namespace kpm {

namespace {

void validate_samples(const SampleSet& samples, std::size_t limit) {
  if (samples.indices.empty()) throw InputError("sample set must be nonempty");
  std::vector<std::size_t> sorted = samples.indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("sample set has repeated indices");
  if (sorted.back() >= limit) throw InputError("sample index out of range");
}

}  // namespace

double frame_lower_bound(const Kernel& kernel, const PointConfiguration& config,
                         const SampleSet& samples, std::size_t n, double eps_pd) {
  if (n == 0 || n > config.size()) throw InputError("invalid slice size");
  validate_samples(samples, n);

  const GramMatrix gram = assemble_gram(kernel, config, n);
  GramFactorization::factorize(gram, eps_pd);  // propagate NotPositiveDefinite

  const Eigen::Index ns = static_cast<Eigen::Index>(samples.indices.size());
  Eigen::MatrixXd sampled(static_cast<Eigen::Index>(n), ns);
  for (Eigen::Index a = 0; a < ns; ++a)
    sampled.col(a) =
        gram.entries.col(static_cast<Eigen::Index>(samples.indices[static_cast<std::size_t>(a)]));

  const Eigen::MatrixXd lhs = sampled * sampled.transpose();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(lhs, gram.entries,
                                                                   Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NotPositiveDefinite("generalized eigenproblem failed", 0);
  const double smallest = solver.eigenvalues().minCoeff();
  const double scale = std::max(1.0, solver.eigenvalues().maxCoeff());
  return smallest > 1e-12 * scale ? smallest : 0.0;
}

KernelExpansion interpolate(const Kernel& kernel, const PointConfiguration& config,
                            const SampleSet& samples, const Eigen::VectorXd& pairings,
                            double divergence_cap) {
  validate_samples(samples, config.size());
  if (static_cast<std::size_t>(pairings.size()) != samples.indices.size())
    throw InputError("one pairing per sample index is required");

  KernelExpansion out;
  out.support = samples.indices;
  out.coefficients = pairings;

  const PointConfiguration sub = config.subset(samples.indices);
  const GramMatrix gram = assemble_gram(kernel, sub);
  out.norm_sq = pairings.dot(gram.entries * pairings);
  if (!(out.norm_sq <= divergence_cap)) {
    std::ostringstream msg;
    msg << "reconstruction norm^2 " << out.norm_sq << " exceeds the cap " << divergence_cap;
    throw NormDivergent(msg.str());
  }
  return out;
}

KernelExpansion interpolate_checked(const Kernel& kernel, const PointConfiguration& config,
                                    const SampleSet& samples, const Eigen::VectorXd& pairings,
                                    const ScanPolicy& policy) {
  validate_samples(samples, config.size());
  for (std::size_t s : samples.indices) {
    const FiltrationTrace trace = membership_scan(kernel, config, config.point(s), policy);
    if (trace.verdict == ScanVerdict::Diverging) {
      std::ostringstream msg;
      msg << "point mass at " << config.point(s) << " has a diverging membership scan";
      throw SubsetMembershipUnverified(msg.str());
    }
  }
  return interpolate(kernel, config, samples, pairings, policy.divergence_cap);
}

double evaluate_expansion(const Kernel& kernel, const PointConfiguration& config,
                          const KernelExpansion& expansion, double x) {
  double acc = 0.0;
  for (std::size_t a = 0; a < expansion.support.size(); ++a)
    acc += expansion.coefficients(static_cast<Eigen::Index>(a)) *
           kernel.evaluate(config.point(expansion.support[a]), x);
  return acc;
}

Eigen::VectorXd pairings_from_values(const Kernel& kernel, const PointConfiguration& config,
                                     std::size_t n, const Eigen::VectorXd& values,
                                     double eps_pd) {
  if (static_cast<std::size_t>(values.size()) != n) throw InputError("value vector length mismatch");
  const GramFactorization fact =
      GramFactorization::factorize(assemble_gram(kernel, config, n), eps_pd);
  return fact.solve(values);
}

double restriction_isometry_check(const Kernel& kernel, const PointConfiguration& config,
                                  const SampleSet& samples, int trials, unsigned seed) {
  validate_samples(samples, config.size());
  const std::size_t n = config.size();
  const Eigen::Index ns = static_cast<Eigen::Index>(samples.indices.size());

  const GramMatrix restricted = assemble_gram(kernel, config.subset(samples.indices));
  const GramMatrix full = assemble_gram(kernel, config);

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  Eigen::VectorXd xi(ns);
  Eigen::VectorXd embedded(static_cast<Eigen::Index>(n));
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index a = 0; a < ns; ++a) xi(a) = gauss(rng);
    embedded.setZero();
    for (Eigen::Index a = 0; a < ns; ++a)
      embedded(static_cast<Eigen::Index>(samples.indices[static_cast<std::size_t>(a)])) = xi(a);
    const double q_restricted = xi.dot(restricted.entries * xi);
    const double q_full = embedded.dot(full.entries * embedded);
    const double scale = std::max({std::abs(q_restricted), std::abs(q_full), 1e-300});
    worst = std::max(worst, std::abs(q_restricted - q_full) / scale);
  }
  return worst;
}

}  // namespace kpm
