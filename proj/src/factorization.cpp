#include "kpm/factorization.hpp"

#include <cmath>
#include <sstream>

namespace kpm {

namespace {

[[noreturn]] void throw_not_pd(double pivot, double floor, std::size_t index) {
  std::ostringstream msg;
  msg << "pivot " << (index + 1) << " is " << pivot << " (floor " << floor << ")";
  throw NotPositiveDefinite(msg.str(), static_cast<int>(index) + 1);
}

}  // namespace

void GramFactorization::ensure_capacity(std::size_t needed) {
  const std::size_t cap = static_cast<std::size_t>(ut_.rows());
  if (needed <= cap) return;
  std::size_t newcap = cap == 0 ? 8 : cap * 2;
  if (newcap < needed) newcap = needed;
  ut_.conservativeResize(static_cast<Eigen::Index>(newcap), static_cast<Eigen::Index>(newcap));
  d_.conservativeResize(static_cast<Eigen::Index>(newcap));
}

void GramFactorization::reserve(std::size_t capacity) { ensure_capacity(capacity); }

GramFactorization GramFactorization::factorize(const GramMatrix& gram, double eps_pd) {
  const Eigen::Index n = gram.entries.rows();
  GramFactorization fact;
  fact.reserve(static_cast<std::size_t>(n));
  if (n > 0) fact.maxdiag_ = std::max(0.0, gram.entries.diagonal().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    fact.extend(gram.entries.col(i).head(i), gram.entries(i, i), eps_pd);
  }
  return fact;
}

double GramFactorization::extend(const Eigen::VectorXd& new_column, double corner,
                                 double eps_pd) {
  if (static_cast<std::size_t>(new_column.size()) != n_)
    throw InputError("bordering column length mismatch");
  ensure_capacity(n_ + 1);
  maxdiag_ = std::max(maxdiag_, corner);

  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd y = new_column;
  double schur = corner;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) y(i) -= ut_.col(i).head(i).dot(y.head(i));
    schur -= y(i) * y(i) / d_(i);
  }

  const double floor = eps_pd * maxdiag_;
  if (!(schur > floor)) throw_not_pd(schur, floor, n_);

  for (Eigen::Index i = 0; i < n; ++i) ut_(i, n) = y(i) / d_(i);
  ut_(n, n) = 1.0;
  d_(n) = schur;
  log_det_ += std::log(schur);
  ++n_;
  return schur;
}

GramFactorization GramFactorization::border_extend(const Eigen::VectorXd& new_column,
                                                   double corner, double eps_pd) const {
  GramFactorization out = *this;
  out.extend(new_column, corner, eps_pd);
  return out;
}

Eigen::VectorXd GramFactorization::forward(const Eigen::VectorXd& rhs) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  if (rhs.size() != n) throw InputError("rhs length mismatch");
  Eigen::VectorXd y = rhs;
  for (Eigen::Index i = 1; i < n; ++i) y(i) -= ut_.col(i).head(i).dot(y.head(i));
  return y;
}

Eigen::VectorXd GramFactorization::backward(const Eigen::VectorXd& rhs) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  if (rhs.size() != n) throw InputError("rhs length mismatch");
  Eigen::VectorXd u = rhs;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index j = i + 1; j < n; ++j) u(i) -= ut_(i, j) * u(j);
  }
  return u;
}

double GramFactorization::diag_quad(const Eigen::VectorXd& y) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  double q = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) q += y(i) * y(i) / d_(i);
  return q;
}

double GramFactorization::next_forward_entry(const Eigen::VectorXd& z) const {
  const Eigen::Index m = z.size();
  if (m + 1 != static_cast<Eigen::Index>(n_))
    throw InputError("forward-solution length must be one short of the factorization");
  return -ut_.col(m).head(m).dot(z);
}

Eigen::VectorXd GramFactorization::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd y = forward(rhs);
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  for (Eigen::Index i = 0; i < n; ++i) y(i) /= d_(i);
  return backward(y);
}

double GramFactorization::inverse_entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw InputError("inverse entry index out of range");
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
  ei(static_cast<Eigen::Index>(i)) = 1.0;
  const Eigen::VectorXd zi = forward(ei);
  if (i == j) return diag_quad(zi);
  Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
  ej(static_cast<Eigen::Index>(j)) = 1.0;
  const Eigen::VectorXd zj = forward(ej);
  double entry = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) entry += zi(r) * zj(r) / d_(r);
  return entry;
}

double GramFactorization::quad_form(const Eigen::VectorXd& c) const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  if (c.size() != n) throw InputError("vector length mismatch");
  double q = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = c(i);
    for (Eigen::Index r = i + 1; r < n; ++r) t += ut_(i, r) * c(r);
    q += d_(i) * t * t;
  }
  return q;
}

double GramFactorization::condition_estimate() const {
  if (n_ == 0) return 1.0;
  const auto head = d_.head(static_cast<Eigen::Index>(n_));
  return head.maxCoeff() / head.minCoeff();
}

Eigen::MatrixXd GramFactorization::reconstruct() const {
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) lower(i, j) = ut_(j, i);
  return lower * d_.head(n).asDiagonal() * lower.transpose();
}

}  // namespace kpm
