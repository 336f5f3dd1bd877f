#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kpm/network.hpp"
#include "kpm/scan.hpp"
#include "test_support.hpp"

using namespace kpm;

TEST_CASE("load validates the graph") {
  CHECK_NOTHROW(NetworkGraph::load(kpmtest::path_edges(4), 0));
  CHECK_THROWS_AS(NetworkGraph::load({{0, 1, 1.0}, {2, 3, 1.0}}, 0), Disconnected);
  CHECK_THROWS_AS(NetworkGraph::load({{1, 1, 2.0}}, 1), SelfLoop);
  CHECK_THROWS_AS(NetworkGraph::load({{0, 1, 0.0}}, 0), NonpositiveConductance);
  CHECK_THROWS_AS(NetworkGraph::load({{0, 1, 1.0}}, 7), InputError);
}

TEST_CASE("laplacian action") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(4), 0);

  CHECK(laplacian_apply(graph, Eigen::VectorXd::Constant(4, 3.25)) == Eigen::VectorXd::Zero(4));

  Eigen::VectorXd bump(4);
  bump << 0, 1, 0, 0;
  Eigen::VectorXd want(4);
  want << -1, 2, -1, 0;
  CHECK(laplacian_apply(graph, bump) == want);

  Eigen::VectorXd ramp(4);
  ramp << 0, 1, 2, 3;
  Eigen::VectorXd ramp_want(4);
  ramp_want << -1, 0, 0, 1;
  CHECK(laplacian_apply(graph, ramp) == ramp_want);
}

TEST_CASE("energy inner product on point masses") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(4), 0);
  Eigen::VectorXd d1 = Eigen::VectorXd::Zero(4);
  d1(1) = 1.0;
  Eigen::VectorXd d2 = Eigen::VectorXd::Zero(4);
  d2(2) = 1.0;

  CHECK(energy_inner(graph, d1, d1) == 2.0);                      // c(1)
  CHECK(energy_inner(graph, Eigen::VectorXd::Ones(4), d1) == 0.0);
  CHECK(energy_inner(graph, d1, d2) == -1.0);                     // adjacent
}

TEST_CASE("closed-form point-mass inner products match the energy sum exactly") {
  std::mt19937 rng(79);
  for (int trial = 0; trial < 6; ++trial) {
    const auto edges = kpmtest::random_connected_edges(rng, 30);
    const auto graph = NetworkGraph::load(edges, 0);
    const std::size_t n = graph.vertex_count();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        Eigen::VectorXd di = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        Eigen::VectorXd dj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        di(static_cast<Eigen::Index>(i)) = 1.0;
        dj(static_cast<Eigen::Index>(j)) = 1.0;
        CHECK(energy_inner(graph, di, dj) ==
              delta_inner_energy(graph, graph.vertices()[i], graph.vertices()[j]));
      }
    }
  }
}

TEST_CASE("dipole solves the grounded system") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(3), 0);
  const Eigen::VectorXd v = dipole(graph, 2, 0);
  CHECK(v(0) == doctest::Approx(0.0));
  CHECK(v(1) == doctest::Approx(1.0));
  CHECK(v(2) == doctest::Approx(2.0));
}

TEST_CASE("dipole antisymmetry up to grounding") {
  std::mt19937 rng(83);
  const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, 25), 0);
  const Eigen::VectorXd ab = dipole(graph, 7, 3);
  const Eigen::VectorXd ba = dipole(graph, 3, 7);
  // Both are grounded at the base, so they are exact negatives.
  CHECK((ab + ba).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dipole reproduces increments against random functions, up to 2000 vertices") {
  std::mt19937 rng(89);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int n : {50, 400, 2000}) {
    const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, n, 0.2), 0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const std::int64_t x = pick(rng);
    std::int64_t y = pick(rng);
    while (y == x) y = pick(rng);
    const Eigen::VectorXd v = dipole(graph, x, y);
    const int trials = n >= 2000 ? 100 : 20;
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i) f(i) = gauss(rng);
      const double lhs = energy_inner(graph, v, f);
      const double rhs = f(static_cast<Eigen::Index>(graph.index_of(x))) -
                         f(static_cast<Eigen::Index>(graph.index_of(y)));
      CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("energy kernel of the unit path is the min kernel") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(8), 0);
  const EnergyKernel ek = energy_kernel(graph);
  REQUIRE(ek.labels.size() == 7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(ek.green(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            doctest::Approx(std::min(ek.labels[i], ek.labels[j])).epsilon(1e-12));
  CHECK(ek.kernel.evaluate(3.0, 5.0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Green identity at every interior vertex") {
  std::mt19937 rng(97);
  const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, 60), 0);
  const EnergyKernel ek = energy_kernel(graph);
  const std::size_t n = graph.vertex_count();
  double worst = 0.0;
  for (std::size_t c = 0; c < ek.labels.size(); ++c) {
    Eigen::VectorXd kx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < ek.labels.size(); ++r)
      kx(static_cast<Eigen::Index>(graph.index_of(ek.labels[r]))) =
          ek.green(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    const Eigen::VectorXd lap = laplacian_apply(graph, kx);
    for (std::size_t r = 0; r < ek.labels.size(); ++r) {
      const double want = r == c ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(lap(static_cast<Eigen::Index>(
                                  graph.index_of(ek.labels[r]))) - want));
    }
  }
  CHECK(worst < 1e-9);
  CHECK_THROWS_AS(ek.kernel.evaluate(0.0, 3.0), DomainViolation);  // base excluded
}

TEST_CASE("energy kernel diagonal is positive") {
  std::mt19937 rng(101);
  const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, 40), 0);
  const EnergyKernel ek = energy_kernel(graph);
  for (Eigen::Index i = 0; i < ek.green.rows(); ++i) CHECK(ek.green(i, i) > 0.0);
}

TEST_CASE("vertex moment report") {
  const auto path = NetworkGraph::load(kpmtest::path_edges(4), 0);
  const VertexMoments interior = network_moments(path, 1);
  CHECK(interior.m1 == 2.0);
  CHECK(interior.m2 == 6.0);
  CHECK(interior.covariance == 2.0);
  CHECK(interior.bound_ok);

  const auto leaf_graph = NetworkGraph::load({{0, 1, 3.0}}, 0);
  const VertexMoments leaf = network_moments(leaf_graph, 1);
  CHECK(leaf.m1 == 3.0);
  CHECK(leaf.m2 == 18.0);
  CHECK(leaf.covariance == 9.0);  // equality case of the bound
  CHECK(leaf.bound_ok);

  std::vector<GraphEdge> star;
  for (int leafv = 1; leafv <= 4; ++leafv) star.push_back({0, leafv, 1.0});
  const auto star_graph = NetworkGraph::load(star, 1);
  const VertexMoments center = network_moments(star_graph, 0);
  CHECK(center.m1 == 4.0);
  CHECK(center.m2 == 20.0);
  CHECK(center.covariance == 4.0);
  CHECK(center.bound_ok);

  CHECK_THROWS_AS(network_moments(path, 0), InputError);  // base point excluded
}

TEST_CASE("moment bound holds on random graphs") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const auto graph = NetworkGraph::load(kpmtest::random_connected_edges(rng, 50), 0);
    for (std::int64_t v : graph.vertices()) {
      if (v == graph.base_point()) continue;
      CHECK(network_moments(graph, v).bound_ok);
    }
  }
}

TEST_CASE("path energy kernel feeds the membership scan with the degree") {
  const auto graph = NetworkGraph::load(kpmtest::path_edges(30), 0);
  const EnergyKernel ek = energy_kernel(graph);
  ScanPolicy policy;
  policy.max_n = ek.config.size();
  for (double x : {5.0, 14.0}) {
    const NormEstimate est = delta_norm_sq(ek.kernel, ek.config, x, policy);
    CHECK(est.verdict == ScanVerdict::CertifiedBounded);
    CHECK(est.estimate == doctest::Approx(delta_inner_energy(graph, static_cast<std::int64_t>(x),
                                                             static_cast<std::int64_t>(x)))
                              .epsilon(1e-10));
  }
}
