#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kpm/kernels.hpp"
#include "kpm/scan.hpp"
#include "test_support.hpp"

using namespace kpm;

namespace {

ScanPolicy full_policy(std::size_t max_n) {
  ScanPolicy policy;
  policy.max_n = max_n;
  return policy;
}

ScanPolicy small_policy(std::size_t max_n, std::size_t window) {
  ScanPolicy policy;
  policy.max_n = max_n;
  policy.window = window;
  return policy;
}

GramFactorization fact_of(const Kernel& kernel, const PointConfiguration& config) {
  return GramFactorization::factorize(assemble_gram(kernel, config));
}

}  // namespace

TEST_CASE("projection coefficients") {
  const auto config = build_config({1.0, 2.0, 3.0}, true);
  const auto fact = fact_of(make_min_kernel(), config);
  const Eigen::VectorXd zeta = projection_coeffs(fact, 0);
  CHECK(zeta(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(zeta(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(zeta(2) == doctest::Approx(0.0));

  const auto config4 = build_config({1.0, 2.0, 3.0, 4.0}, true);
  const auto fact4 = fact_of(make_min_kernel(), config4);
  // Coefficient at the target itself: (x4 - x2) / ((x3 - x2)(x4 - x3)).
  CHECK(projection_coeffs(fact4, 2)(2) == doctest::Approx(2.0).epsilon(1e-12));

  GramMatrix scalar;
  scalar.entries.resize(1, 1);
  scalar.entries << 4.0;
  scalar.points = {7.0};
  const auto sf = GramFactorization::factorize(scalar);
  CHECK(projection_coeffs(sf, 0)(0) == doctest::Approx(0.25));
}

TEST_CASE("projected point-mass norms") {
  CHECK(projected_delta_norm_sq(fact_of(make_min_kernel(), build_config({1.0, 2.0}, true)), 0) ==
        doctest::Approx(2.0));
  CHECK(projected_delta_norm_sq(fact_of(make_min_kernel(), build_config({1.0}, true)), 0) ==
        doctest::Approx(1.0));
  CHECK(projected_delta_norm_sq(fact_of(make_min_kernel(), build_config({1.0, 2.0, 3.0}, true)),
                                1) == doctest::Approx(2.0));
}

TEST_CASE("membership scan: min kernel certifies with plateau at the neighbor step") {
  const auto config = kpmtest::integer_points(50);
  const FiltrationTrace trace = membership_scan(make_min_kernel(), config, 1.0, full_policy(50));
  CHECK(trace.verdict == ScanVerdict::CertifiedBounded);
  CHECK(trace.estimate == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(trace.steps.size() >= 2);
  CHECK(trace.steps[0].n == 1);
  CHECK(trace.steps[0].value == doctest::Approx(1.0));
  for (std::size_t k = 1; k < trace.steps.size(); ++k)
    CHECK(trace.steps[k].value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("membership scan: binomial kernel diverges with the known prefix") {
  std::vector<double> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back(i);
  ScanPolicy policy = full_policy(21);
  const FiltrationTrace trace =
      membership_scan(make_binomial_kernel(), build_config(pts, false), 1.0, policy);
  CHECK(trace.verdict == ScanVerdict::Diverging);
  REQUIRE(trace.steps.size() >= 4);
  CHECK(trace.steps[0].value == doctest::Approx(1.0));
  CHECK(trace.steps[1].value == doctest::Approx(5.0));
  CHECK(trace.steps[2].value == doctest::Approx(14.0));
  CHECK(trace.steps[3].value == doctest::Approx(30.0));
}

TEST_CASE("membership scan: sinc kernel is flat at 1") {
  std::vector<double> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(i);
  const FiltrationTrace trace =
      membership_scan(make_sinc_kernel(), build_config(pts, false), 0.0, full_policy(20));
  CHECK(trace.verdict == ScanVerdict::CertifiedBounded);
  CHECK(trace.estimate == doctest::Approx(1.0));
  for (const TraceStep& s : trace.steps) CHECK(s.value == doctest::Approx(1.0));
}

TEST_CASE("membership scan traces are nondecreasing for every builtin") {
  const auto check_monotone = [](const FiltrationTrace& trace) {
    for (std::size_t k = 1; k < trace.steps.size(); ++k)
      CHECK(trace.steps[k].value >= trace.steps[k - 1].value * (1.0 - 1e-12));
  };
  ScanPolicy policy = full_policy(40);
  policy.stop_at_verdict = false;

  check_monotone(membership_scan(make_min_kernel(), kpmtest::integer_points(40), 7.0, policy));
  {
    std::vector<double> pts;
    for (int i = 1; i <= 40; ++i) pts.push_back(i / 41.0);
    check_monotone(membership_scan(make_bridge_kernel(), build_config(pts, true), pts[10], policy));
  }
  {
    std::vector<double> pts;
    for (int i = 0; i < 18; ++i) pts.push_back(i);
    ScanPolicy p = full_policy(18);
    p.stop_at_verdict = false;
    check_monotone(membership_scan(make_binomial_kernel(), build_config(pts, false), 2.0, p));
    check_monotone(membership_scan(make_sinc_kernel(), build_config(pts, false), 3.0, p));
  }
}

TEST_CASE("full-mode scan plateaus exactly at the step after the target") {
  const auto config = kpmtest::integer_points(30);
  ScanPolicy policy = full_policy(30);
  policy.stop_at_verdict = false;
  for (double x : {3.0, 11.0, 20.0}) {
    const FiltrationTrace trace = membership_scan(make_min_kernel(), config, x, policy);
    const std::size_t i = static_cast<std::size_t>(x);  // 1-based rank of x
    REQUIRE(trace.steps.front().n == i);
    CHECK(trace.steps[0].value < trace.steps[1].value);
    for (std::size_t k = 1; k < trace.steps.size(); ++k)
      CHECK(trace.steps[k].value == doctest::Approx(trace.steps[1].value).epsilon(1e-12));
    CHECK(trace.verdict == ScanVerdict::CertifiedBounded);
  }
}

TEST_CASE("delta norm estimates") {
  SUBCASE("sparse family value at the third paper point") {
    std::vector<double> pts;
    for (int j = 1; j <= 12; ++j) pts.push_back(j * (j + 1) / 2.0);
    const NormEstimate est =
        delta_norm_sq(make_min_kernel(), build_config(pts, true), 3.0, full_policy(12));
    CHECK(est.estimate == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(est.verdict == ScanVerdict::CertifiedBounded);
  }
  SUBCASE("bridge three-point value against the dense oracle") {
    const auto config = build_config({0.25, 0.5, 0.75}, true);
    const NormEstimate est = delta_norm_sq(make_bridge_kernel(), config, 0.5, small_policy(3, 2));
    CHECK(est.estimate == doctest::Approx(8.0).epsilon(1e-10));
    const GramMatrix gram = assemble_gram(make_bridge_kernel(), config);
    const Eigen::MatrixXd inv = kpmtest::brute_inverse(gram.entries);
    CHECK(est.estimate == doctest::Approx(inv(1, 1)).epsilon(1e-10));
  }
  SUBCASE("window edge: last point of a two-point set") {
    const NormEstimate est =
        delta_norm_sq(make_min_kernel(), build_config({1.0, 2.0}, true), 2.0, small_policy(2, 2));
    CHECK(est.estimate == doctest::Approx(1.0));
  }
}

TEST_CASE("minor determinant ratio") {
  const auto config = build_config({1.0, 2.0, 3.0}, true);
  CHECK(minor_det_ratio(make_min_kernel(), config, 1.0, 3) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(minor_det_ratio(make_min_kernel(), config, 1.0, 1) == doctest::Approx(1.0));

  std::vector<double> pts{0, 1, 2, 3};
  CHECK(minor_det_ratio(make_binomial_kernel(), build_config(pts, false), 1.0, 4) ==
        doctest::Approx(14.0).epsilon(1e-9));
}

TEST_CASE("Cramer consistency between the ratio and the projected norm") {
  std::mt19937 rng(61);
  SUBCASE("min kernel at n = 200") {
    const auto pts = kpmtest::random_increasing(rng, 200, 1e-2, 0.5, 0.1);
    const auto config = build_config(pts, true);
    const auto fact = fact_of(make_min_kernel(), config);
    for (std::size_t i : {std::size_t{0}, std::size_t{57}, std::size_t{199}}) {
      const double via_solve = projected_delta_norm_sq(fact, i);
      const double via_dets = minor_det_ratio(make_min_kernel(), config, pts[i], 200);
      CHECK(kpmtest::rel_err(via_solve, via_dets) < 1e-8);
    }
  }
  SUBCASE("bridge kernel at n = 60") {
    auto pts = kpmtest::random_increasing(rng, 60, 1e-3, 1e-2, 1e-3);
    const double scale = pts.back() + 0.02;
    for (auto& p : pts) p /= scale;
    const auto config = build_config(pts, true);
    const auto fact = fact_of(make_bridge_kernel(), config);
    for (std::size_t i : {std::size_t{3}, std::size_t{30}}) {
      const double via_solve = projected_delta_norm_sq(fact, i);
      const double via_dets = minor_det_ratio(make_bridge_kernel(), config, pts[i], 60);
      CHECK(kpmtest::rel_err(via_solve, via_dets) < 1e-8);
    }
  }
}

TEST_CASE("induced kernel entries") {
  const auto config = kpmtest::integer_points(50);
  const ScanPolicy policy = full_policy(50);
  const Kernel kernel = make_min_kernel();

  const EntryEstimate neighbor = induced_kernel_entry(kernel, config, 1.0, 2.0, policy);
  CHECK(neighbor.verdict == ScanVerdict::CertifiedBounded);
  CHECK(neighbor.estimate == doctest::Approx(-1.0).epsilon(1e-12));

  const EntryEstimate separated = induced_kernel_entry(kernel, config, 1.0, 3.0, policy);
  CHECK(separated.estimate == doctest::Approx(0.0));
  CHECK(separated.verdict == ScanVerdict::CertifiedBounded);

  const EntryEstimate diagonal = induced_kernel_entry(kernel, config, 4.0, 4.0, policy);
  const NormEstimate norm = delta_norm_sq(kernel, config, 4.0, policy);
  CHECK(kpmtest::rel_err(diagonal.estimate, norm.estimate) < 1e-8);
}

TEST_CASE("induced kernel entry is symmetric") {
  std::mt19937 rng(67);
  const auto pts = kpmtest::random_increasing(rng, 30, 0.05, 1.0, 0.2);
  const auto config = build_config(pts, true);
  const ScanPolicy policy = full_policy(30);
  for (int t = 0; t < 10; ++t) {
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    const double x = pts[pick(rng)], y = pts[pick(rng)];
    const EntryEstimate xy = induced_kernel_entry(make_min_kernel(), config, x, y, policy);
    const EntryEstimate yx = induced_kernel_entry(make_min_kernel(), config, y, x, policy);
    CHECK(xy.estimate == doctest::Approx(yx.estimate).epsilon(1e-12));
  }
}

TEST_CASE("l2 row sums") {
  const ScanPolicy policy = full_policy(50);
  const L2RowTrace row = l2_row_test(make_min_kernel(), kpmtest::integer_points(50), 2.0, policy);
  CHECK(row.verdict == ScanVerdict::CertifiedBounded);
  CHECK(row.estimate == doctest::Approx(6.0).epsilon(1e-10));  // row (-1, 2, -1)

  std::vector<double> ints;
  for (int i = 0; i < 30; ++i) ints.push_back(i);
  const L2RowTrace sinc_row =
      l2_row_test(make_sinc_kernel(), build_config(ints, false), 0.0, full_policy(30));
  CHECK(sinc_row.verdict == ScanVerdict::CertifiedBounded);
  CHECK(sinc_row.estimate == doctest::Approx(1.0));

  const L2RowTrace single =
      l2_row_test(Kernel("const4", [](double, double) { return 4.0; }),
                  build_config({3.0}, false), 3.0, small_policy(2, 2));
  CHECK(single.estimate == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("l2 row verdict follows the diagonal scan") {
  std::vector<double> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back(i);
  const L2RowTrace row =
      l2_row_test(make_binomial_kernel(), build_config(pts, false), 1.0, full_policy(21));
  CHECK(row.diag_verdict == ScanVerdict::Diverging);
  CHECK(row.verdict != ScanVerdict::CertifiedBounded);
}

TEST_CASE("reproducing identity and min-kernel locality of the coefficients") {
  std::mt19937 rng(71);
  const auto pts = kpmtest::random_increasing(rng, 40, 0.05, 1.0, 0.3);
  const auto config = build_config(pts, true);
  const GramMatrix gram = assemble_gram(make_min_kernel(), config);
  const auto fact = GramFactorization::factorize(gram);
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{39}}) {
    const Eigen::VectorXd zeta = projection_coeffs(fact, i);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(40);
    delta(static_cast<Eigen::Index>(i)) = 1.0;
    CHECK((gram.entries * zeta - delta).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index j = 0; j < zeta.size(); ++j) {
      const auto dist = std::abs(j - static_cast<Eigen::Index>(i));
      if (dist > 1) CHECK(std::abs(zeta(j)) < 1e-9);
    }
  }
}

TEST_CASE("projection onto point-mass spans") {
  const auto config = build_config({1.0, 2.0, 3.0}, true);
  const auto fact = fact_of(make_min_kernel(), config);

  SUBCASE("full subset spans the model") {
    std::mt19937 rng(73);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd f(3);
    for (Eigen::Index i = 0; i < 3; ++i) f(i) = gauss(rng);
    const DelProjection proj = del_projection(fact, f, {0, 1, 2});
    CHECK(proj.residual_norm_sq < 1e-10);
    CHECK((proj.coeffs - f).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("projecting a member of the span is idempotent") {
    const Eigen::VectorXd f = projection_coeffs(fact, 1);  // delta_2 in the model
    const DelProjection proj = del_projection(fact, f, {1});
    CHECK(proj.residual_norm_sq < 1e-12);
    CHECK((proj.coeffs - f).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("kernel vector against a single point mass") {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(3);
    f(0) = 1.0;  // f = k_1
    const DelProjection proj = del_projection(fact, f, {0});
    // alpha = <delta_1, k_1> / ||delta_1||^2 = 1/2; coefficients 0.5 * zeta.
    const Eigen::VectorXd zeta = projection_coeffs(fact, 0);
    CHECK((proj.coeffs - 0.5 * zeta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(proj.residual_norm_sq == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("checked projection rejects diverging subsets") {
  std::vector<double> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back(i);
  const auto config = build_config(pts, false);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(21);
  f(0) = 1.0;
  CHECK_THROWS_AS(del_projection_checked(make_binomial_kernel(), config, 21, f, {1},
                                         full_policy(21)),
                  SubsetMembershipUnverified);
}

TEST_CASE("binomial scan saturates the pivot floor yet classifies as diverging") {
  std::vector<double> pts;
  for (int i = 0; i <= 29; ++i) pts.push_back(i);
  ScanPolicy policy = full_policy(30);
  policy.stop_at_verdict = false;
  for (double x : {0.0, 3.0, 5.0}) {
    const FiltrationTrace trace =
        membership_scan(make_binomial_kernel(), build_config(pts, false), x, policy);
    CHECK(trace.verdict == ScanVerdict::Diverging);
  }
}

TEST_CASE("scan policy validation") {
  ScanPolicy bad;
  bad.window = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = ScanPolicy{};
  bad.max_n = 3;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = ScanPolicy{};
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);

  CHECK_THROWS_AS(membership_scan(make_min_kernel(), kpmtest::integer_points(10), 2.5,
                                  full_policy(10)),
                  InputError);
}
