#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "kpm/io.hpp"
#include "kpm/kernels.hpp"
#include "kpm/scan.hpp"
#include "test_support.hpp"

using namespace kpm;
using nlohmann::json;

TEST_CASE("kernel spec: builtin with points") {
  const json spec = {{"kernel", "min"}, {"points", {1.0, 2.0, 3.0}}, {"ordered", true}};
  const KernelSpec loaded = load_kernel_spec(spec);
  CHECK(loaded.kernel.name() == "min");
  REQUIRE(loaded.config.has_value());
  CHECK(loaded.config->size() == 3);
  CHECK(loaded.config->ordered());
}

TEST_CASE("kernel spec: matrix kernel round-trips and validates symmetry") {
  const json good = {{"kernel", "matrix"},
                     {"matrix", {{2.0, 1.0}, {1.0, 3.0}}},
                     {"points", {0.0, 1.0}}};
  const KernelSpec loaded = load_kernel_spec(good);
  CHECK(loaded.kernel.evaluate(0.0, 1.0) == 1.0);

  const json bad = {{"kernel", "matrix"}, {"matrix", {{2.0, 1.0}, {1.5, 3.0}}}};
  CHECK_THROWS_AS(load_kernel_spec(bad), InputError);
}

TEST_CASE("kernel spec rejects malformed input") {
  CHECK_THROWS_AS(load_kernel_spec(json{{"kernel", "gaussian"}}), InputError);
  CHECK_THROWS_AS(load_kernel_spec(json{{"points", {1.0}}}), InputError);
  CHECK_THROWS_AS(load_kernel_spec(json{{"kernel", "matrix"}}), InputError);
  CHECK_THROWS_AS(load_kernel_spec_file("/nonexistent/spec.json"), InputError);
}

TEST_CASE("point list: explicit CSV and integer ranges") {
  CHECK(parse_point_list("1,2,3.5") == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(parse_point_list("0..4") == std::vector<double>{0, 1, 2, 3, 4});
  CHECK(parse_point_list("7..7") == std::vector<double>{7});
}

TEST_CASE("point list: arithmetic continuation") {
  const auto pts = parse_point_list("1,2,...,50");
  REQUIRE(pts.size() == 50);
  CHECK(pts.front() == 1.0);
  CHECK(pts.back() == 50.0);
  CHECK(pts[17] == 18.0);

  const auto halves = parse_point_list("0.5,1.0,...,3.0");
  CHECK(halves == std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0});

  CHECK_THROWS_AS(parse_point_list("1,...,5"), InputError);
  CHECK_THROWS_AS(parse_point_list("1,2,...,2.2"), InputError);
}

TEST_CASE("point list: generators") {
  CHECK(parse_point_list("sparse:5") == std::vector<double>{1, 3, 6, 10, 15});
  CHECK(parse_point_list("uniform:0.5:4") == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS_AS(parse_point_list("uniform:0.5"), InputError);
  CHECK_THROWS_AS(parse_point_list("sparse:0"), InputError);
  CHECK_THROWS_AS(parse_point_list(""), InputError);
  CHECK_THROWS_AS(parse_point_list("1,two,3"), InputError);
}

TEST_CASE("edge list parsing") {
  std::istringstream in(
      "# a path with a shortcut\n"
      "0 1 1.0\n"
      "1 2 2.5   # inline comment\n"
      "\n"
      "0 2 0.5\n");
  const auto edges = parse_edge_list(in);
  REQUIRE(edges.size() == 3);
  CHECK(edges[1].u == 1);
  CHECK(edges[1].v == 2);
  CHECK(edges[1].conductance == 2.5);

  std::istringstream bad("0 1\n");
  CHECK_THROWS_AS(parse_edge_list(bad), InputError);
  std::istringstream trailing("0 1 1.0 extra\n");
  CHECK_THROWS_AS(parse_edge_list(trailing), InputError);
  CHECK_THROWS_AS(load_edge_list_file("/nonexistent/file.edges"), InputError);
}

TEST_CASE("trace serialization carries the documented fields") {
  ScanPolicy policy;
  policy.max_n = 12;
  const auto config = kpmtest::integer_points(12);
  const FiltrationTrace trace = membership_scan(make_min_kernel(), config, 3.0, policy);

  const json j = trace_to_json(trace);
  CHECK(j["point"] == 3.0);
  CHECK(j["index"] == 2);
  CHECK(j["verdict"] == "certified-bounded");
  CHECK(j["estimate"].get<double>() == doctest::Approx(2.0));
  REQUIRE(j["steps"].is_array());
  CHECK(j["steps"].size() == trace.steps.size());
  CHECK(j["steps"][0]["n"] == 3);

  // Round-trip through text.
  const json parsed = json::parse(j.dump());
  CHECK(parsed == j);

  std::ostringstream csv;
  write_trace_csv(csv, trace);
  const std::string text = csv.str();
  CHECK(text.rfind("n,zeta,verdict_so_far\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == trace.steps.size() + 1);
  CHECK(text.find("certified-bounded") != std::string::npos);
}

TEST_CASE("non-finite numbers serialize as null") {
  CHECK(json_number(std::numeric_limits<double>::infinity()).is_null());
  CHECK(json_number(std::numeric_limits<double>::quiet_NaN()).is_null());
  CHECK(json_number(2.5) == json(2.5));
}

TEST_CASE("policy serialization names every knob") {
  const json j = policy_to_json(ScanPolicy{});
  for (const char* key : {"max_n", "window", "rel_tol", "divergence_cap", "slope_tol", "eps_pd"})
    CHECK(j.contains(key));
}
