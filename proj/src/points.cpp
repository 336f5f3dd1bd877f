#include "kpm/points.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kpm {

std::optional<std::size_t> PointConfiguration::index_of(double value) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] == value) return i;
  }
  return std::nullopt;
}

PointConfiguration PointConfiguration::prefix(std::size_t n) const {
  PointConfiguration out;
  out.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(n));
  out.ordered_ = ordered_;
  return out;
}

PointConfiguration PointConfiguration::subset(const std::vector<std::size_t>& indices) const {
  PointConfiguration out;
  out.points_.reserve(indices.size());
  for (std::size_t i : indices) out.points_.push_back(points_.at(i));
  out.ordered_ = false;
  return out;
}

PointConfiguration build_config(std::vector<double> points, bool ordered) {
  if (points.empty()) throw InputError("point configuration must be nonempty");
  if (ordered) {
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i - 1] < points[i])) {
        std::ostringstream msg;
        msg << "ordered configuration violated at position " << i << ": " << points[i - 1]
            << " then " << points[i];
        if (points[i - 1] == points[i]) throw DuplicatePoint(msg.str());
        throw NotIncreasing(msg.str());
      }
    }
  } else {
    std::vector<double> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i - 1] == sorted[i]) {
        std::ostringstream msg;
        msg << "duplicate point " << sorted[i];
        throw DuplicatePoint(msg.str());
      }
    }
  }
  PointConfiguration out;
  out.points_ = std::move(points);
  out.ordered_ = ordered;
  return out;
}

GramMatrix assemble_gram(const Kernel& kernel, const PointConfiguration& config,
                         std::size_t n) {
  if (n > config.size()) throw InputError("gram slice exceeds configuration size");
  PointConfiguration slice = config.prefix(n);
  kernel.check_domain(slice);

  GramMatrix gram;
  gram.points = slice.points();
  gram.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel.evaluate(slice.point(i), slice.point(j));
      gram.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      gram.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return gram;
}

GramMatrix assemble_gram(const Kernel& kernel, const PointConfiguration& config) {
  return assemble_gram(kernel, config, config.size());
}

const char* to_string(PdKind kind) {
  switch (kind) {
    case PdKind::StrictlyPositive: return "strictly-positive";
    case PdKind::Degenerate: return "degenerate";
    case PdKind::Indefinite: return "indefinite";
  }
  return "?";
}

PdVerdict validate_pd(const GramMatrix& gram, double eps_pd) {
  const Eigen::Index n = gram.entries.rows();
  Eigen::MatrixXd s = gram.entries;
  const double maxdiag = n > 0 ? std::max(0.0, s.diagonal().maxCoeff()) : 0.0;
  const double tol = eps_pd * maxdiag;
  // A PSD matrix with a vanishing diagonal entry must have the whole row
  // vanish; surviving coupling there means indefiniteness.
  const double coupling_tol = std::sqrt(tol * std::max(maxdiag, 1.0));

  PdVerdict verdict;
  bool degenerate = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pivot = s(i, i);
    if (pivot > tol) {
      // Elimination touches only the lower triangle; later steps never read
      // above the diagonal.
      ++verdict.rank;
      for (Eigen::Index r = i + 1; r < n; ++r) {
        const double f = s(r, i) / pivot;
        if (f == 0.0) continue;
        for (Eigen::Index c = i + 1; c <= r; ++c) s(r, c) -= f * s(c, i);
      }
      continue;
    }
    if (pivot < -tol) {
      verdict.kind = PdKind::Indefinite;
      verdict.pivot_index = static_cast<int>(i) + 1;
      return verdict;
    }
    double coupling = 0.0;
    for (Eigen::Index r = i + 1; r < n; ++r) coupling = std::max(coupling, std::abs(s(r, i)));
    if (coupling > coupling_tol) {
      verdict.kind = PdKind::Indefinite;
      verdict.pivot_index = static_cast<int>(i) + 1;
      return verdict;
    }
    degenerate = true;
  }
  verdict.kind = degenerate ? PdKind::Degenerate : PdKind::StrictlyPositive;
  return verdict;
}

double evaluation_bound_probe(const GramMatrix& gram, const Eigen::VectorXd& f_values,
                              int trials, unsigned seed) {
  const Eigen::Index n = gram.entries.rows();
  if (f_values.size() != n) throw InputError("probe vector length mismatch");
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  Eigen::VectorXd xi(n);
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = gauss(rng);
    const double pairing = xi.dot(f_values);
    const double energy = xi.dot(gram.entries * xi);
    if (energy <= 0.0) continue;
    best = std::max(best, pairing * pairing / energy);
  }
  return best;
}

}  // namespace kpm
