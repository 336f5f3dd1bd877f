#include "kpm/scan.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpm {

namespace {

constexpr double kValueFloor = 1e-300;

std::size_t require_index(const PointConfiguration& config, double x) {
  const auto idx = config.index_of(x);
  if (!idx) {
    std::ostringstream msg;
    msg << "target point " << x << " not in configuration";
    throw InputError(msg.str());
  }
  return *idx;
}

// Least-squares slope of log|value| against n over the trailing `count`
// steps of the trace.
double trailing_log_slope(const std::vector<TraceStep>& steps, std::size_t count) {
  if (steps.size() < 2) return 0.0;
  count = std::min(count, steps.size());
  if (count < 2) count = 2;
  const std::size_t begin = steps.size() - count;
  double mean_n = 0.0, mean_y = 0.0;
  for (std::size_t k = begin; k < steps.size(); ++k) {
    mean_n += static_cast<double>(steps[k].n);
    mean_y += std::log(std::max(std::abs(steps[k].value), kValueFloor));
  }
  mean_n /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double num = 0.0, den = 0.0;
  for (std::size_t k = begin; k < steps.size(); ++k) {
    const double dn = static_cast<double>(steps[k].n) - mean_n;
    num += dn * (std::log(std::max(std::abs(steps[k].value), kValueFloor)) - mean_y);
    den += dn * dn;
  }
  return den > 0.0 ? num / den : 0.0;
}

bool plateau_at_tail(const std::vector<TraceStep>& steps, std::size_t window, double rel_tol) {
  if (steps.size() <= window) return false;
  const double last = steps.back().value;
  const double base = steps[steps.size() - 1 - window].value;
  return std::abs(last - base) / std::max(std::abs(last), kValueFloor) < rel_tol;
}

// Growth must hold at every step of the trailing window; an early jump
// followed by flat steps is a transient, not divergence.
bool sustained_growth(const std::vector<TraceStep>& steps, std::size_t window) {
  if (steps.size() < window + 1) return false;
  for (std::size_t k = steps.size() - window; k < steps.size(); ++k)
    if (!(std::abs(steps[k].value) > std::abs(steps[k - 1].value))) return false;
  return true;
}

// Verdict for a finished (or saturated) trace: plateau first, then the cap,
// then the fitted log-slope over a full window of sustained growth.
ScanVerdict classify_tail(const std::vector<TraceStep>& steps, const ScanPolicy& policy,
                          double* growth_rate) {
  const double slope = trailing_log_slope(steps, policy.window + 1);
  if (growth_rate) *growth_rate = slope;
  if (plateau_at_tail(steps, policy.window, policy.rel_tol)) return ScanVerdict::CertifiedBounded;
  if (!steps.empty() && std::abs(steps.back().value) > policy.divergence_cap)
    return ScanVerdict::Diverging;
  if (slope > policy.slope_tol && sustained_growth(steps, policy.window))
    return ScanVerdict::Diverging;
  return ScanVerdict::Inconclusive;
}

// Bordered factorization chain over a configuration prefix, with the
// periodic conditioning audit. The full refactorization is the fallback
// path: it runs only when the pivot-ratio estimate crosses the cap.
struct Chain {
  const Kernel& kernel;
  const PointConfiguration& config;
  const ScanPolicy& policy;
  GramFactorization fact;
  std::size_t refactorizations = 0;

  Chain(const Kernel& k, const PointConfiguration& c, std::size_t n0, std::size_t n_max,
        const ScanPolicy& p)
      : kernel(k), config(c), policy(p) {
    fact = GramFactorization::factorize(assemble_gram(kernel, config, n0), policy.eps_pd);
    fact.reserve(n_max);
  }

  Eigen::VectorXd next_column() const {
    const std::size_t m = fact.size();
    Eigen::VectorXd col(static_cast<Eigen::Index>(m));
    const double p_new = config.point(m);
    for (std::size_t j = 0; j < m; ++j)
      col(static_cast<Eigen::Index>(j)) = kernel.evaluate(config.point(j), p_new);
    return col;
  }

  double next_corner() const {
    const double p_new = config.point(fact.size());
    return kernel.evaluate(p_new, p_new);
  }

  // True when the audit replaced the factorization (callers must rebuild
  // any forward solutions they maintain).
  bool audit() {
    if (policy.audit_interval == 0) return false;
    if (fact.size() == 0 || fact.size() % policy.audit_interval != 0) return false;
    if (fact.condition_estimate() <= policy.audit_condition_cap) return false;
    GramFactorization fresh =
        GramFactorization::factorize(assemble_gram(kernel, config, fact.size()), policy.eps_pd);
    fresh.reserve(std::min(policy.max_n, config.size()));
    fact = std::move(fresh);
    ++refactorizations;
    return true;
  }
};

Eigen::VectorXd unit_vector(std::size_t n, std::size_t i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(i)) = 1.0;
  return e;
}

}  // namespace

void ScanPolicy::validate() const {
  if (window < 2) throw InputError("scan window must be at least 2");
  if (max_n < window) throw InputError("max_n must be at least the window size");
  if (!(rel_tol > 0.0)) throw InputError("rel_tol must be positive");
  if (!(divergence_cap > 0.0)) throw InputError("divergence_cap must be positive");
  if (!(slope_tol > 0.0)) throw InputError("slope_tol must be positive");
}

const char* to_string(ScanVerdict verdict) {
  switch (verdict) {
    case ScanVerdict::CertifiedBounded: return "certified-bounded";
    case ScanVerdict::Diverging: return "diverging";
    case ScanVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Eigen::VectorXd projection_coeffs(const GramFactorization& fact, std::size_t x_index) {
  if (x_index >= fact.size()) throw InputError("index out of range");
  return fact.solve(unit_vector(fact.size(), x_index));
}

double projected_delta_norm_sq(const GramFactorization& fact, std::size_t x_index) {
  if (x_index >= fact.size()) throw InputError("index out of range");
  return fact.diag_quad(fact.forward(unit_vector(fact.size(), x_index)));
}

FiltrationTrace membership_scan(const Kernel& kernel, const PointConfiguration& config,
                                double x, const ScanPolicy& policy) {
  policy.validate();
  const std::size_t ix = require_index(config, x);
  const std::size_t n0 = ix + 1;
  const std::size_t n_max = std::min(policy.max_n, config.size());
  if (n0 > n_max) throw InputError("policy.max_n is smaller than the target's filtration rank");

  FiltrationTrace trace;
  trace.target = x;
  trace.target_index = ix;
  trace.policy = policy;

  Chain chain(kernel, config, n0, n_max, policy);
  Eigen::VectorXd z = chain.fact.forward(unit_vector(n0, ix));
  double zeta = chain.fact.diag_quad(z);
  trace.steps.push_back({n0, zeta});

  for (std::size_t m = n0 + 1; m <= n_max; ++m) {
    const Eigen::VectorXd col = chain.next_column();
    const double corner = chain.next_corner();
    double pivot;
    try {
      pivot = chain.fact.extend(col, corner, policy.eps_pd);
    } catch (const NotPositiveDefinite&) {
      trace.saturated = true;
      break;
    }
    const double z_new = chain.fact.next_forward_entry(z);
    z.conservativeResize(z.size() + 1);
    z(z.size() - 1) = z_new;
    zeta += z_new * z_new / pivot;

    if (chain.audit()) {
      z = chain.fact.forward(unit_vector(m, ix));
      zeta = chain.fact.diag_quad(z);
    }
    trace.steps.push_back({m, zeta});

    if (zeta > policy.divergence_cap) {
      trace.verdict = ScanVerdict::Diverging;
      trace.growth_rate = trailing_log_slope(trace.steps, policy.window + 1);
      break;
    }
    if (policy.stop_at_verdict && plateau_at_tail(trace.steps, policy.window, policy.rel_tol)) {
      trace.verdict = ScanVerdict::CertifiedBounded;
      break;
    }
  }

  if (trace.verdict == ScanVerdict::Inconclusive)
    trace.verdict = classify_tail(trace.steps, policy, &trace.growth_rate);
  trace.estimate = trace.steps.back().value;
  trace.refactorizations = chain.refactorizations;
  return trace;
}

NormEstimate delta_norm_sq(const Kernel& kernel, const PointConfiguration& config, double x,
                           const ScanPolicy& policy) {
  NormEstimate out;
  out.trace = membership_scan(kernel, config, x, policy);
  out.estimate = out.trace.estimate;
  out.verdict = out.trace.verdict;
  return out;
}

double minor_det_ratio(const Kernel& kernel, const PointConfiguration& config, double x,
                       std::size_t n, double eps_pd) {
  if (n == 0 || n > config.size()) throw InputError("invalid slice size");
  const std::size_t ix = require_index(config, x);
  if (ix >= n) throw InputError("target outside the requested slice");

  const GramMatrix gram = assemble_gram(kernel, config, n);
  const double log_full = GramFactorization::factorize(gram, eps_pd).log_det();

  std::vector<std::size_t> keep;
  keep.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (i != ix) keep.push_back(i);
  double log_minor = 0.0;  // det of the empty minor is 1
  if (!keep.empty()) {
    const GramMatrix minor = assemble_gram(kernel, config.subset(keep));
    log_minor = GramFactorization::factorize(minor, eps_pd).log_det();
  }
  return std::exp(log_minor - log_full);
}

EntryEstimate induced_kernel_entry(const Kernel& kernel, const PointConfiguration& config,
                                   double x, double y, const ScanPolicy& policy) {
  policy.validate();
  const std::size_t ix = require_index(config, x);
  const std::size_t iy = require_index(config, y);
  const std::size_t n0 = std::max(ix, iy) + 1;
  const std::size_t n_max = std::min(policy.max_n, config.size());
  if (n0 > n_max) throw InputError("policy.max_n is smaller than the targets' filtration rank");

  EntryEstimate out;
  Chain chain(kernel, config, n0, n_max, policy);
  Eigen::VectorXd zx = chain.fact.forward(unit_vector(n0, ix));
  Eigen::VectorXd zy = ix == iy ? zx : chain.fact.forward(unit_vector(n0, iy));
  double entry = 0.0;
  for (Eigen::Index r = 0; r < zx.size(); ++r)
    entry += zx(r) * zy(r) / chain.fact.pivot(static_cast<std::size_t>(r));
  out.steps.push_back({n0, entry});

  for (std::size_t m = n0 + 1; m <= n_max; ++m) {
    const Eigen::VectorXd col = chain.next_column();
    const double corner = chain.next_corner();
    double pivot;
    try {
      pivot = chain.fact.extend(col, corner, policy.eps_pd);
    } catch (const NotPositiveDefinite&) {
      out.saturated = true;
      break;
    }
    const double zx_new = chain.fact.next_forward_entry(zx);
    const double zy_new = ix == iy ? zx_new : chain.fact.next_forward_entry(zy);
    zx.conservativeResize(zx.size() + 1);
    zx(zx.size() - 1) = zx_new;
    if (ix == iy) {
      zy = zx;
    } else {
      zy.conservativeResize(zy.size() + 1);
      zy(zy.size() - 1) = zy_new;
    }
    entry += zx_new * zy_new / pivot;

    if (chain.audit()) {
      zx = chain.fact.forward(unit_vector(m, ix));
      zy = ix == iy ? zx : chain.fact.forward(unit_vector(m, iy));
      entry = 0.0;
      for (Eigen::Index r = 0; r < zx.size(); ++r)
        entry += zx(r) * zy(r) / chain.fact.pivot(static_cast<std::size_t>(r));
    }
    out.steps.push_back({m, entry});

    if (std::abs(entry) > policy.divergence_cap) {
      out.verdict = ScanVerdict::Diverging;
      break;
    }
    if (policy.stop_at_verdict && plateau_at_tail(out.steps, policy.window, policy.rel_tol)) {
      out.verdict = ScanVerdict::CertifiedBounded;
      break;
    }
  }

  if (out.verdict == ScanVerdict::Inconclusive)
    out.verdict = classify_tail(out.steps, policy, nullptr);
  out.estimate = out.steps.back().value;
  return out;
}

L2RowTrace l2_row_test(const Kernel& kernel, const PointConfiguration& config, double x,
                       const ScanPolicy& policy) {
  policy.validate();
  const std::size_t ix = require_index(config, x);
  const std::size_t n0 = ix + 1;
  const std::size_t n_max = std::min(policy.max_n, config.size());
  if (n0 > n_max) throw InputError("policy.max_n is smaller than the target's filtration rank");

  L2RowTrace out;
  {
    // The row entries are inner products of point masses only if the
    // diagonal scan itself converges.
    FiltrationTrace diag = membership_scan(kernel, config, x, policy);
    out.diag_verdict = diag.verdict;
  }

  Chain chain(kernel, config, n0, n_max, policy);
  Eigen::VectorXd w(static_cast<Eigen::Index>(n_max));
  w.head(static_cast<Eigen::Index>(n0)) = chain.fact.solve(unit_vector(n0, ix));
  std::size_t len = n0;
  double sum = w.head(static_cast<Eigen::Index>(len)).squaredNorm();
  out.partial_sums.push_back({n0, sum});

  for (std::size_t m = n0 + 1; m <= n_max; ++m) {
    const Eigen::VectorXd col = chain.next_column();
    const double corner = chain.next_corner();
    const Eigen::VectorXd u = chain.fact.solve(col);
    double pivot;
    try {
      pivot = chain.fact.extend(col, corner, policy.eps_pd);
    } catch (const NotPositiveDefinite&) {
      out.saturated = true;
      break;
    }
    const double ux = u(static_cast<Eigen::Index>(ix));
    w.head(static_cast<Eigen::Index>(len)) += (ux / pivot) * u;
    w(static_cast<Eigen::Index>(len)) = -ux / pivot;
    ++len;

    if (chain.audit()) {
      w.head(static_cast<Eigen::Index>(len)) = chain.fact.solve(unit_vector(len, ix));
    }
    sum = w.head(static_cast<Eigen::Index>(len)).squaredNorm();
    out.partial_sums.push_back({m, sum});

    if (sum > policy.divergence_cap) {
      out.verdict = ScanVerdict::Diverging;
      break;
    }
    if (policy.stop_at_verdict &&
        plateau_at_tail(out.partial_sums, policy.window, policy.rel_tol)) {
      out.verdict = ScanVerdict::CertifiedBounded;
      break;
    }
  }

  if (out.verdict == ScanVerdict::Inconclusive)
    out.verdict = classify_tail(out.partial_sums, policy, nullptr);
  if (out.diag_verdict != ScanVerdict::CertifiedBounded &&
      out.verdict == ScanVerdict::CertifiedBounded) {
    out.verdict = ScanVerdict::Inconclusive;
  }
  out.estimate = out.partial_sums.back().value;
  return out;
}

DelProjection del_projection(const GramFactorization& fact, const Eigen::VectorXd& f_coeffs,
                             const std::vector<std::size_t>& subset) {
  const std::size_t n = fact.size();
  if (static_cast<std::size_t>(f_coeffs.size()) != n)
    throw InputError("coefficient vector length mismatch");
  if (subset.empty()) throw InputError("projection subset must be nonempty");
  for (std::size_t s : subset)
    if (s >= n) throw InputError("projection subset index out of range");

  const Eigen::Index ns = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd zeta(static_cast<Eigen::Index>(n), ns);
  for (Eigen::Index a = 0; a < ns; ++a)
    zeta.col(a) = fact.solve(unit_vector(n, subset[static_cast<std::size_t>(a)]));

  // Gram of the projected point masses: the (subset, subset) block of K^-1.
  Eigen::MatrixXd gram(ns, ns);
  Eigen::VectorXd pairings(ns);
  for (Eigen::Index a = 0; a < ns; ++a) {
    pairings(a) = f_coeffs(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]));
    for (Eigen::Index b = 0; b < ns; ++b)
      gram(a, b) = zeta(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]), b);
  }
  gram = 0.5 * (gram + gram.transpose().eval());

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("point-mass Gram is not positive definite", 0);
  const Eigen::VectorXd alpha = llt.solve(pairings);

  DelProjection out;
  out.coeffs = zeta * alpha;
  const double f_norm_sq = fact.quad_form(f_coeffs);
  const double proj_norm_sq = alpha.dot(pairings);
  out.residual_norm_sq = std::max(0.0, f_norm_sq - proj_norm_sq);
  return out;
}

DelProjection del_projection_checked(const Kernel& kernel, const PointConfiguration& config,
                                     std::size_t n, const Eigen::VectorXd& f_coeffs,
                                     const std::vector<std::size_t>& subset,
                                     const ScanPolicy& policy) {
  for (std::size_t s : subset) {
    if (s >= n) throw InputError("projection subset index out of range");
    const FiltrationTrace trace = membership_scan(kernel, config, config.point(s), policy);
    if (trace.verdict == ScanVerdict::Diverging) {
      std::ostringstream msg;
      msg << "point mass at " << config.point(s) << " has a diverging membership scan";
      throw SubsetMembershipUnverified(msg.str());
    }
  }
  const GramFactorization fact =
      GramFactorization::factorize(assemble_gram(kernel, config, n), policy.eps_pd);
  return del_projection(fact, f_coeffs, subset);
}

}  // namespace kpm
