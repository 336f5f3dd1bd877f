#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kpm/kernels.hpp"
#include "kpm/moments.hpp"
#include "kpm/network.hpp"
#include "test_support.hpp"

using namespace kpm;

namespace {

ScanPolicy policy_for(std::size_t max_n) {
  ScanPolicy policy;
  policy.max_n = max_n;
  return policy;
}

}  // namespace

TEST_CASE("delta-side moments on the unit path energy kernel") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(30), 0);
  const EnergyKernel ek = energy_kernel(graph);
  const MomentReport report =
      delta_side_moments(ek.kernel, ek.config, 9.0, policy_for(ek.config.size()));
  CHECK(report.m0 == 1.0);
  CHECK(report.m1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.m2 == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(report.covariance == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(report.m1_verdict == ScanVerdict::CertifiedBounded);
  CHECK(report.m2_verdict == ScanVerdict::CertifiedBounded);
}

TEST_CASE("delta-side moments on the sinc kernel are a point mass at 1") {
  std::vector<double> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(i);
  const auto config = build_config(pts, false);
  const MomentReport report =
      delta_side_moments(make_sinc_kernel(), config, 7.0, policy_for(25));
  CHECK(report.m0 == 1.0);
  CHECK(report.m1 == doctest::Approx(1.0));
  CHECK(report.m2 == doctest::Approx(1.0));
  CHECK(report.covariance == doctest::Approx(0.0));
}

TEST_CASE("delta-side first moment diverges for the binomial kernel") {
  std::vector<double> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back(i);
  const auto config = build_config(pts, false);
  const MomentReport report =
      delta_side_moments(make_binomial_kernel(), config, 2.0, policy_for(21));
  CHECK(report.m1_infinite);
  CHECK(std::isinf(report.m1));
  CHECK(report.m1_verdict == ScanVerdict::Diverging);
  CHECK(std::isnan(report.covariance));
}

TEST_CASE("kernel-side moments") {
  SUBCASE("min kernel at the first point") {
    const auto config = kpmtest::integer_points(30);
    const MomentReport report =
        kernel_side_moments(make_min_kernel(), config, 1.0, policy_for(30));
    CHECK(report.m0 == 1.0);  // k(1,1)
    CHECK(report.m1 == 1.0);
    CHECK(report.m2 == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("sinc on integers") {
    std::vector<double> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(i);
    const MomentReport report =
        kernel_side_moments(make_sinc_kernel(), build_config(pts, false), 4.0, policy_for(20));
    CHECK(report.m0 == 1.0);
    CHECK(report.m1 == 1.0);
    CHECK(report.m2 == doctest::Approx(1.0));
  }
  SUBCASE("bridge three points") {
    const auto config = build_config({0.25, 0.5, 0.75}, true);
    ScanPolicy policy = policy_for(3);
    policy.window = 2;
    const MomentReport report = kernel_side_moments(make_bridge_kernel(), config, 0.5, policy);
    CHECK(report.m0 == doctest::Approx(0.25));
    CHECK(report.m1 == 1.0);
    CHECK(report.m2 == doctest::Approx(8.0).epsilon(1e-10));
  }
}

TEST_CASE("cross-moment identity on the paper kernels") {
  SUBCASE("min kernel") {
    const auto config = kpmtest::integer_points(30);
    const CrossMomentCheck check =
        cross_moment_identity(make_min_kernel(), config, 1.0, policy_for(30));
    CHECK(check.pass);
    CHECK(check.lhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(check.rhs == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("path energy kernel") {
    const auto graph = NetworkGraph::load(kpmtest::path_edges(25), 0);
    const EnergyKernel ek = energy_kernel(graph);
    const CrossMomentCheck check =
        cross_moment_identity(ek.kernel, ek.config, 8.0, policy_for(ek.config.size()));
    CHECK(check.pass);
    CHECK(check.lhs == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("sinc kernel") {
    std::vector<double> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(i);
    const CrossMomentCheck check =
        cross_moment_identity(make_sinc_kernel(), build_config(pts, false), 3.0, policy_for(20));
    CHECK(check.pass);
    CHECK(check.lhs == doctest::Approx(1.0));
    CHECK(check.rhs == doctest::Approx(1.0));
  }
}

TEST_CASE("normalization and covariance sign across kernels and points") {
  std::mt19937 rng(107);
  const auto config = kpmtest::integer_points(40);
  std::uniform_int_distribution<int> pick(1, 35);
  for (int t = 0; t < 8; ++t) {
    const double x = pick(rng);
    const MomentReport report =
        delta_side_moments(make_min_kernel(), config, x, policy_for(40));
    CHECK(report.m0 == 1.0);
    if (report.m1_verdict == ScanVerdict::CertifiedBounded &&
        report.m2_verdict == ScanVerdict::CertifiedBounded)
      CHECK(report.covariance >= -1e-9);
  }
}

TEST_CASE("network specialization: scan moments match conductance closed forms") {
  std::mt19937 rng(109);
  for (int trial = 0; trial < 3; ++trial) {
    const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, 25, 0.3), 0);
    const EnergyKernel ek = energy_kernel(graph);
    ScanPolicy policy = policy_for(ek.config.size());
    policy.stop_at_verdict = false;
    std::uniform_int_distribution<std::size_t> pick(0, ek.labels.size() - 1);
    for (int probe = 0; probe < 3; ++probe) {
      const std::int64_t label = ek.labels[pick(rng)];
      const VertexMoments closed = network_moments(graph, label);
      const MomentReport scanned =
          delta_side_moments(ek.kernel, ek.config, static_cast<double>(label), policy);
      if (scanned.m1_verdict != ScanVerdict::CertifiedBounded ||
          scanned.m2_verdict != ScanVerdict::CertifiedBounded)
        continue;
      CHECK(kpmtest::rel_err(scanned.m1, closed.m1) < 1e-8);
      CHECK(kpmtest::rel_err(scanned.m2, closed.m2) < 1e-8);
      CHECK(std::abs(scanned.covariance - closed.covariance) <
            1e-8 * std::max(1.0, closed.covariance));
    }
  }
}
