#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kpm/errors.hpp"

namespace kpm {

/// Ordered, duplicate-free sequence of points. The position of a point is
/// its filtration rank: the first n points form the nested working set F_n.
///
/// Points are doubles; abstract labels are stored as exact integer values.
/// Duplicates are detected by exact equality — merging near-duplicates would
/// silently change the model, so that is left to the caller.
class PointConfiguration {
 public:
  PointConfiguration() = default;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double point(std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  bool ordered() const { return ordered_; }

  /// Index of a point by exact value match.
  std::optional<std::size_t> index_of(double value) const;

  /// The leading n points, same order.
  PointConfiguration prefix(std::size_t n) const;

  /// The points at the given indices, in the given order.
  PointConfiguration subset(const std::vector<std::size_t>& indices) const;

  friend PointConfiguration build_config(std::vector<double> points, bool ordered);

 private:
  std::vector<double> points_;
  bool ordered_ = false;
};

/// Validates and wraps a point list.
/// Throws DuplicatePoint on repeated values (the Gram matrix would be
/// singular), NotIncreasing when `ordered` is set and the sequence is not
/// strictly increasing, InputError on empty input.
PointConfiguration build_config(std::vector<double> points, bool ordered = false);

/// Symmetric real kernel. evaluate() routes both argument orders through a
/// single call on the canonically ordered pair, so symmetry is exact.
/// An optional domain check runs at Gram assembly and throws DomainViolation.
class Kernel {
 public:
  using Evaluator = std::function<double(double, double)>;
  using DomainCheck = std::function<void(const PointConfiguration&)>;

  Kernel() = default;
  Kernel(std::string name, Evaluator evaluator, bool strict_claimed = false,
         DomainCheck domain_check = nullptr)
      : name_(std::move(name)),
        evaluator_(std::move(evaluator)),
        strict_claimed_(strict_claimed),
        domain_check_(std::move(domain_check)) {}

  double evaluate(double x, double y) const {
    return x <= y ? evaluator_(x, y) : evaluator_(y, x);
  }

  const std::string& name() const { return name_; }
  bool strict_claimed() const { return strict_claimed_; }

  void check_domain(const PointConfiguration& config) const {
    if (domain_check_) domain_check_(config);
  }

 private:
  std::string name_;
  Evaluator evaluator_;
  bool strict_claimed_ = false;
  DomainCheck domain_check_;
};

/// Dense symmetric Gram matrix over a leading slice of a configuration.
struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<double> points;  // the F_n slice the matrix was built from

  std::size_t size() const { return points.size(); }
};

/// Assembles K_{F_n} = (k(x_i, x_j)) over the first n points. Runs the
/// kernel's domain check against the slice; the result is exactly symmetric.
GramMatrix assemble_gram(const Kernel& kernel, const PointConfiguration& config,
                         std::size_t n);
GramMatrix assemble_gram(const Kernel& kernel, const PointConfiguration& config);

enum class PdKind { StrictlyPositive, Degenerate, Indefinite };

struct PdVerdict {
  PdKind kind = PdKind::StrictlyPositive;
  int rank = 0;         // number of positive pivots (meaningful for Degenerate)
  int pivot_index = 0;  // 1-based offending pivot (meaningful for Indefinite)
};

const char* to_string(PdKind kind);

/// Classifies a symmetric matrix by unpivoted symmetric elimination.
/// StrictlyPositive: every pivot exceeds eps_pd * max diagonal entry.
/// Degenerate(rank): some pivot sits inside the +/- floor and its Schur row
/// vanishes (consistent with positive semidefiniteness).
/// Indefinite(pivot): a pivot below the negative floor, or a vanishing pivot
/// with nonzero coupling left in its row.
PdVerdict validate_pd(const GramMatrix& gram, double eps_pd = 1e-12);

/// Running maximum of |<xi, f>|^2 / (xi^T K xi) over seeded random probes.
/// A lower bound for the least constant C with |sum xi(x) f(x)|^2 <=
/// C * ||xi||_K^2; the bound is reported, not claimed attained.
double evaluation_bound_probe(const GramMatrix& gram, const Eigen::VectorXd& f_values,
                              int trials, unsigned seed);

}  // namespace kpm
