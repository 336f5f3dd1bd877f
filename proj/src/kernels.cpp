#include "kpm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace kpm {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_nonnegative_integer(double x) {
  return x >= 0.0 && std::floor(x) == x && x <= 9.007199254740992e15;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw IntegerOverflow("binomial coefficient exceeds 64-bit range");
  return out;
}

// Row n of Pascal's triangle by the additive recurrence.
std::vector<std::int64_t> pascal_row(int n) {
  std::vector<std::int64_t> row{1};
  for (int r = 1; r <= n; ++r) {
    std::vector<std::int64_t> next(static_cast<std::size_t>(r) + 1, 1);
    for (int k = 1; k < r; ++k)
      next[static_cast<std::size_t>(k)] =
          checked_add(row[static_cast<std::size_t>(k - 1)], row[static_cast<std::size_t>(k)]);
    row = std::move(next);
  }
  return row;
}

void require_increasing_in(const PointConfiguration& config, double lo, double hi,
                           const char* kernel_name) {
  double prev = lo;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const double x = config.point(i);
    if (!(x > lo) || !(x < hi)) {
      std::ostringstream msg;
      msg << kernel_name << " kernel point " << x << " outside (" << lo << ", " << hi << ")";
      throw DomainViolation(msg.str());
    }
    if (i > 0 && !(x > prev)) {
      std::ostringstream msg;
      msg << kernel_name << " kernel requires strictly increasing points, got " << prev
          << " then " << x;
      throw DomainViolation(msg.str());
    }
    prev = x;
  }
}

}  // namespace

std::optional<BuiltinKernelId> kernel_id_from_name(std::string_view name) {
  if (name == "min") return BuiltinKernelId::Min;
  if (name == "bridge") return BuiltinKernelId::Bridge;
  if (name == "binomial") return BuiltinKernelId::Binomial;
  if (name == "sinc") return BuiltinKernelId::Sinc;
  if (name == "matrix") return BuiltinKernelId::MatrixBacked;
  return std::nullopt;
}

const char* to_string(BuiltinKernelId id) {
  switch (id) {
    case BuiltinKernelId::Min: return "min";
    case BuiltinKernelId::Bridge: return "bridge";
    case BuiltinKernelId::Binomial: return "binomial";
    case BuiltinKernelId::Sinc: return "sinc";
    case BuiltinKernelId::MatrixBacked: return "matrix";
  }
  return "?";
}

Kernel make_min_kernel() {
  return Kernel(
      "min", [](double x, double y) { return std::min(x, y); }, true,
      [](const PointConfiguration& config) {
        require_increasing_in(config, 0.0, std::numeric_limits<double>::infinity(), "min");
      });
}

Kernel make_bridge_kernel() {
  return Kernel(
      "bridge", [](double x, double y) { return std::min(x, y) - x * y; }, true,
      [](const PointConfiguration& config) {
        require_increasing_in(config, 0.0, 1.0, "bridge");
      });
}

Kernel make_binomial_kernel() {
  return Kernel(
      "binomial",
      [](double x, double y) {
        const int xi = static_cast<int>(x);
        const int yi = static_cast<int>(y);
        const int m = std::min(xi, yi);
        const auto row_x = pascal_row(xi);
        const auto row_y = pascal_row(yi);
        std::int64_t sum = 0;
        for (int j = 0; j <= m; ++j) {
          std::int64_t term;
          if (__builtin_mul_overflow(row_x[static_cast<std::size_t>(j)],
                                     row_y[static_cast<std::size_t>(j)], &term))
            throw IntegerOverflow("binomial kernel value exceeds 64-bit range");
          sum = checked_add(sum, term);
        }
        return static_cast<double>(sum);
      },
      true,
      [](const PointConfiguration& config) {
        for (double x : config.points()) {
          if (!is_nonnegative_integer(x)) {
            std::ostringstream msg;
            msg << "binomial kernel requires nonnegative integer points, got " << x;
            throw DomainViolation(msg.str());
          }
        }
      });
}

Kernel make_sinc_kernel() {
  return Kernel(
      "sinc",
      [](double x, double y) {
        const double d = x - y;
        if (d == 0.0) return 1.0;
        // Exact zeros at integer separations, so integer grids give the
        // identity Gram rather than sin(pi k) roundoff.
        if (std::round(d) == d) return 0.0;
        return std::sin(kPi * d) / (kPi * d);
      },
      true, nullptr);
}

Kernel make_matrix_kernel(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols()) throw InputError("matrix kernel must be square");
  for (Eigen::Index i = 0; i < entries.rows(); ++i)
    for (Eigen::Index j = i + 1; j < entries.cols(); ++j)
      if (entries(i, j) != entries(j, i)) {
        std::ostringstream msg;
        msg << "matrix kernel asymmetric at (" << i << ", " << j << ")";
        throw InputError(msg.str());
      }
  const Eigen::Index m = entries.rows();
  auto table = std::make_shared<Eigen::MatrixXd>(std::move(entries));
  return Kernel(
      "matrix",
      [table](double x, double y) {
        return (*table)(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      },
      false,
      [m](const PointConfiguration& config) {
        for (double x : config.points()) {
          if (!(std::floor(x) == x) || x < 0.0 || x >= static_cast<double>(m)) {
            std::ostringstream msg;
            msg << "matrix kernel index " << x << " outside 0.." << (m - 1);
            throw DomainViolation(msg.str());
          }
        }
      });
}

Kernel make_kernel(BuiltinKernelId id) {
  switch (id) {
    case BuiltinKernelId::Min: return make_min_kernel();
    case BuiltinKernelId::Bridge: return make_bridge_kernel();
    case BuiltinKernelId::Binomial: return make_binomial_kernel();
    case BuiltinKernelId::Sinc: return make_sinc_kernel();
    case BuiltinKernelId::MatrixBacked:
      throw InputError("matrix kernel needs an explicit matrix; use make_matrix_kernel");
  }
  throw InputError("unknown kernel id");
}

double min_log_det(const std::vector<double>& points) {
  if (points.empty()) return 0.0;
  double logdet = std::log(points.front());
  for (std::size_t i = 1; i < points.size(); ++i)
    logdet += std::log(points[i] - points[i - 1]);
  return logdet;
}

DeltaNormValue min_delta_norm_sq(const std::vector<double>& points, std::size_t i) {
  if (i >= points.size()) throw InputError("index out of range");
  const double prev = i == 0 ? 0.0 : points[i - 1];
  if (i + 1 == points.size()) return {1.0 / (points[i] - prev), true};
  const double next = points[i + 1];
  return {(next - prev) / ((points[i] - prev) * (next - points[i])), false};
}

double bridge_log_det(const std::vector<double>& points) {
  if (points.empty()) return 0.0;
  double logdet = std::log(points.front());
  for (std::size_t i = 1; i < points.size(); ++i)
    logdet += std::log(points[i] - points[i - 1]);
  logdet += std::log(1.0 - points.back());
  return logdet;
}

std::int64_t binomial_coefficient(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  return pascal_row(n)[static_cast<std::size_t>(k)];
}

IntMatrix pascal_lower(int n) {
  if (n < 0) throw InputError("pascal matrix order must be nonnegative");
  const Eigen::Index m = n + 1;
  IntMatrix lower = IntMatrix::Zero(m, m);
  lower(0, 0) = 1;
  for (Eigen::Index x = 1; x < m; ++x) {
    lower(x, 0) = 1;
    for (Eigen::Index y = 1; y <= x; ++y)
      lower(x, y) = checked_add(lower(x - 1, y - 1), lower(x - 1, y));
  }
  return lower;
}

IntMatrix pascal_lower_inverse(int n) {
  IntMatrix inv = pascal_lower(n);
  for (Eigen::Index x = 0; x <= n; ++x)
    for (Eigen::Index y = 0; y <= x; ++y)
      if ((x - y) % 2 != 0) inv(x, y) = -inv(x, y);
  return inv;
}

namespace {

// Products of Pascal entries can pass 64 bits well before the entries do;
// accumulate in 128-bit and narrow once.
IntMatrix checked_product(const IntMatrix& a, const IntMatrix& b) {
  const Eigen::Index m = a.rows();
  IntMatrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      __int128 acc = 0;
      for (Eigen::Index k = 0; k < m; ++k)
        acc += static_cast<__int128>(a(i, k)) * static_cast<__int128>(b(k, j));
      if (acc > std::numeric_limits<std::int64_t>::max() ||
          acc < std::numeric_limits<std::int64_t>::min())
        throw IntegerOverflow("integer matrix product exceeds 64-bit range");
      out(i, j) = static_cast<std::int64_t>(acc);
    }
  }
  return out;
}

}  // namespace

IntMatrix binomial_gram(int n) {
  const IntMatrix lower = pascal_lower(n);
  return checked_product(lower, IntMatrix(lower.transpose()));
}

IntMatrix binomial_gram_inverse(int n) {
  const IntMatrix inv = pascal_lower_inverse(n);
  return checked_product(IntMatrix(inv.transpose()), inv);
}

SincGapReport sinc_gap_check(double horizon, double step) {
  if (!(horizon > 0.0) || !(step > 0.0)) throw InputError("horizon and step must be positive");

  const auto dpsi_sq = [](double t) {
    if (t == 0.0) return 0.0;
    const double d = (t * std::cos(t) - std::sin(t)) / (t * t);
    return d * d;
  };
  const auto simpson = [&](double a, double b) {
    auto intervals = static_cast<std::size_t>(std::ceil((b - a) / step));
    if (intervals % 2 != 0) ++intervals;
    if (intervals < 2) intervals = 2;
    const double h = (b - a) / static_cast<double>(intervals);
    double sum = dpsi_sq(a) + dpsi_sq(b);
    for (std::size_t i = 1; i < intervals; ++i)
      sum += dpsi_sq(a + h * static_cast<double>(i)) * (i % 2 == 0 ? 2.0 : 4.0);
    return sum * h / 3.0;
  };

  SincGapReport report;
  report.head_integral = simpson(0.0, horizon);
  report.tail_integral = simpson(horizon, 2.0 * horizon);
  report.max_zero_residual = 0.0;
  for (int k = 1; static_cast<double>(k) * kPi <= horizon; ++k) {
    const double t = static_cast<double>(k) * kPi;
    report.max_zero_residual = std::max(report.max_zero_residual, std::abs(std::sin(t) / t));
  }
  return report;
}

}  // namespace kpm
