#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kpm/factorization.hpp"
#include "kpm/io.hpp"
#include "kpm/kernels.hpp"
#include "kpm/moments.hpp"
#include "kpm/network.hpp"
#include "kpm/points.hpp"
#include "kpm/sampling.hpp"
#include "kpm/scan.hpp"

namespace py = pybind11;

namespace {

kpm::Kernel kernel_by_name(const std::string& name) {
  const auto id = kpm::kernel_id_from_name(name);
  if (!id) throw kpm::InputError("unknown kernel '" + name + "'");
  return kpm::make_kernel(*id);
}

kpm::SampleSet as_samples(const std::vector<std::size_t>& indices) {
  return kpm::SampleSet{indices};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point-mass analysis for positive definite kernels on discrete point sets";

  py::register_exception<kpm::DuplicatePoint>(m, "DuplicatePoint", PyExc_ValueError);
  py::register_exception<kpm::NotIncreasing>(m, "NotIncreasing", PyExc_ValueError);
  py::register_exception<kpm::NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ArithmeticError);
  py::register_exception<kpm::DomainViolation>(m, "DomainViolation", PyExc_ValueError);
  py::register_exception<kpm::IntegerOverflow>(m, "IntegerOverflow", PyExc_OverflowError);
  py::register_exception<kpm::SelfLoop>(m, "SelfLoop", PyExc_ValueError);
  py::register_exception<kpm::NonpositiveConductance>(m, "NonpositiveConductance",
                                                      PyExc_ValueError);
  py::register_exception<kpm::Disconnected>(m, "Disconnected", PyExc_ValueError);
  py::register_exception<kpm::SubsetMembershipUnverified>(m, "SubsetMembershipUnverified",
                                                          PyExc_ValueError);
  py::register_exception<kpm::NormDivergent>(m, "NormDivergent", PyExc_ArithmeticError);
  py::register_exception<kpm::InputError>(m, "InputError", PyExc_ValueError);

  py::class_<kpm::PointConfiguration>(m, "PointConfiguration")
      .def("__len__", &kpm::PointConfiguration::size)
      .def_property_readonly("points", &kpm::PointConfiguration::points)
      .def_property_readonly("ordered", &kpm::PointConfiguration::ordered)
      .def("point", &kpm::PointConfiguration::point, py::arg("i"))
      .def("index_of", &kpm::PointConfiguration::index_of, py::arg("value"))
      .def("prefix", &kpm::PointConfiguration::prefix, py::arg("n"))
      .def("subset", &kpm::PointConfiguration::subset, py::arg("indices"));

  m.def("build_config", &kpm::build_config, py::arg("points"), py::arg("ordered") = false,
        "Validated, duplicate-free point configuration in filtration order");

  py::class_<kpm::Kernel>(m, "Kernel")
      .def(py::init([](const std::string& name, kpm::Kernel::Evaluator eval) {
             return kpm::Kernel(name, std::move(eval));
           }),
           py::arg("name"), py::arg("evaluator"))
      .def("__call__", &kpm::Kernel::evaluate, py::arg("x"), py::arg("y"))
      .def("evaluate", &kpm::Kernel::evaluate, py::arg("x"), py::arg("y"))
      .def_property_readonly("name", &kpm::Kernel::name)
      .def_property_readonly("strict_claimed", &kpm::Kernel::strict_claimed);

  m.def("make_kernel", &kernel_by_name, py::arg("name"),
        "Builtin kernel by id: min, bridge, binomial, sinc");
  m.def("matrix_kernel", &kpm::make_matrix_kernel, py::arg("entries"),
        "Kernel backed by an explicit symmetric matrix; points are row indices");

  py::class_<kpm::GramMatrix>(m, "GramMatrix")
      .def_readonly("entries", &kpm::GramMatrix::entries)
      .def_readonly("points", &kpm::GramMatrix::points)
      .def("__len__", &kpm::GramMatrix::size);

  m.def("assemble_gram",
        py::overload_cast<const kpm::Kernel&, const kpm::PointConfiguration&, std::size_t>(
            &kpm::assemble_gram),
        py::arg("kernel"), py::arg("config"), py::arg("n"));
  m.def("assemble_gram",
        py::overload_cast<const kpm::Kernel&, const kpm::PointConfiguration&>(&kpm::assemble_gram),
        py::arg("kernel"), py::arg("config"));

  py::enum_<kpm::PdKind>(m, "PdKind")
      .value("StrictlyPositive", kpm::PdKind::StrictlyPositive)
      .value("Degenerate", kpm::PdKind::Degenerate)
      .value("Indefinite", kpm::PdKind::Indefinite);

  py::class_<kpm::PdVerdict>(m, "PdVerdict")
      .def_readonly("kind", &kpm::PdVerdict::kind)
      .def_readonly("rank", &kpm::PdVerdict::rank)
      .def_readonly("pivot_index", &kpm::PdVerdict::pivot_index)
      .def("__repr__", [](const kpm::PdVerdict& v) {
        return std::string("PdVerdict(") + kpm::to_string(v.kind) + ")";
      });

  m.def("validate_pd", &kpm::validate_pd, py::arg("gram"), py::arg("eps_pd") = 1e-12);
  m.def("evaluation_bound_probe", &kpm::evaluation_bound_probe, py::arg("gram"),
        py::arg("f_values"), py::arg("trials"), py::arg("seed"));

  py::class_<kpm::GramFactorization>(m, "GramFactorization")
      .def_static("factorize", &kpm::GramFactorization::factorize, py::arg("gram"),
                  py::arg("eps_pd") = 1e-12)
      .def("__len__", &kpm::GramFactorization::size)
      .def_property_readonly("log_det", &kpm::GramFactorization::log_det)
      .def_property_readonly("pivots", &kpm::GramFactorization::pivots)
      .def_property_readonly("condition_estimate", &kpm::GramFactorization::condition_estimate)
      .def("solve", &kpm::GramFactorization::solve, py::arg("rhs"))
      .def("inverse_entry", &kpm::GramFactorization::inverse_entry, py::arg("i"), py::arg("j"))
      .def("quad_form", &kpm::GramFactorization::quad_form, py::arg("coefficients"))
      .def("reconstruct", &kpm::GramFactorization::reconstruct)
      .def("border_extend", &kpm::GramFactorization::border_extend, py::arg("new_column"),
           py::arg("corner"), py::arg("eps_pd") = 1e-12);

  py::enum_<kpm::ScanVerdict>(m, "ScanVerdict")
      .value("CertifiedBounded", kpm::ScanVerdict::CertifiedBounded)
      .value("Diverging", kpm::ScanVerdict::Diverging)
      .value("Inconclusive", kpm::ScanVerdict::Inconclusive);

  py::class_<kpm::ScanPolicy>(m, "ScanPolicy")
      .def(py::init<>())
      .def_readwrite("max_n", &kpm::ScanPolicy::max_n)
      .def_readwrite("window", &kpm::ScanPolicy::window)
      .def_readwrite("rel_tol", &kpm::ScanPolicy::rel_tol)
      .def_readwrite("divergence_cap", &kpm::ScanPolicy::divergence_cap)
      .def_readwrite("slope_tol", &kpm::ScanPolicy::slope_tol)
      .def_readwrite("eps_pd", &kpm::ScanPolicy::eps_pd)
      .def_readwrite("audit_interval", &kpm::ScanPolicy::audit_interval)
      .def_readwrite("audit_condition_cap", &kpm::ScanPolicy::audit_condition_cap)
      .def_readwrite("stop_at_verdict", &kpm::ScanPolicy::stop_at_verdict);

  py::class_<kpm::TraceStep>(m, "TraceStep")
      .def_readonly("n", &kpm::TraceStep::n)
      .def_readonly("value", &kpm::TraceStep::value)
      .def("__repr__", [](const kpm::TraceStep& s) {
        return "TraceStep(n=" + std::to_string(s.n) + ", value=" + std::to_string(s.value) + ")";
      });

  py::class_<kpm::FiltrationTrace>(m, "FiltrationTrace")
      .def_readonly("target", &kpm::FiltrationTrace::target)
      .def_readonly("target_index", &kpm::FiltrationTrace::target_index)
      .def_readonly("steps", &kpm::FiltrationTrace::steps)
      .def_readonly("verdict", &kpm::FiltrationTrace::verdict)
      .def_readonly("estimate", &kpm::FiltrationTrace::estimate)
      .def_readonly("growth_rate", &kpm::FiltrationTrace::growth_rate)
      .def_readonly("saturated", &kpm::FiltrationTrace::saturated)
      .def_readonly("refactorizations", &kpm::FiltrationTrace::refactorizations);

  py::class_<kpm::NormEstimate>(m, "NormEstimate")
      .def_readonly("estimate", &kpm::NormEstimate::estimate)
      .def_readonly("verdict", &kpm::NormEstimate::verdict)
      .def_readonly("trace", &kpm::NormEstimate::trace);

  py::class_<kpm::EntryEstimate>(m, "EntryEstimate")
      .def_readonly("estimate", &kpm::EntryEstimate::estimate)
      .def_readonly("verdict", &kpm::EntryEstimate::verdict)
      .def_readonly("steps", &kpm::EntryEstimate::steps)
      .def_readonly("saturated", &kpm::EntryEstimate::saturated);

  py::class_<kpm::L2RowTrace>(m, "L2RowTrace")
      .def_readonly("partial_sums", &kpm::L2RowTrace::partial_sums)
      .def_readonly("verdict", &kpm::L2RowTrace::verdict)
      .def_readonly("estimate", &kpm::L2RowTrace::estimate)
      .def_readonly("saturated", &kpm::L2RowTrace::saturated)
      .def_readonly("diag_verdict", &kpm::L2RowTrace::diag_verdict);

  py::class_<kpm::DelProjection>(m, "DelProjection")
      .def_readonly("coeffs", &kpm::DelProjection::coeffs)
      .def_readonly("residual_norm_sq", &kpm::DelProjection::residual_norm_sq);

  m.def("projection_coeffs", &kpm::projection_coeffs, py::arg("fact"), py::arg("x_index"));
  m.def("projected_delta_norm_sq", &kpm::projected_delta_norm_sq, py::arg("fact"),
        py::arg("x_index"));
  m.def("membership_scan", &kpm::membership_scan, py::arg("kernel"), py::arg("config"),
        py::arg("x"), py::arg("policy") = kpm::ScanPolicy{});
  m.def("delta_norm_sq", &kpm::delta_norm_sq, py::arg("kernel"), py::arg("config"), py::arg("x"),
        py::arg("policy") = kpm::ScanPolicy{});
  m.def("minor_det_ratio", &kpm::minor_det_ratio, py::arg("kernel"), py::arg("config"),
        py::arg("x"), py::arg("n"), py::arg("eps_pd") = 1e-12);
  m.def("induced_kernel_entry", &kpm::induced_kernel_entry, py::arg("kernel"), py::arg("config"),
        py::arg("x"), py::arg("y"), py::arg("policy") = kpm::ScanPolicy{});
  m.def("l2_row_test", &kpm::l2_row_test, py::arg("kernel"), py::arg("config"), py::arg("x"),
        py::arg("policy") = kpm::ScanPolicy{});
  m.def("del_projection", &kpm::del_projection, py::arg("fact"), py::arg("f_coeffs"),
        py::arg("subset"));
  m.def("del_projection_checked", &kpm::del_projection_checked, py::arg("kernel"),
        py::arg("config"), py::arg("n"), py::arg("f_coeffs"), py::arg("subset"),
        py::arg("policy") = kpm::ScanPolicy{});

  // Closed-form oracles.
  m.def("min_log_det", &kpm::min_log_det, py::arg("points"));
  m.def(
      "min_delta_norm_sq",
      [](const std::vector<double>& points, std::size_t i) {
        const auto v = kpm::min_delta_norm_sq(points, i);
        return py::make_tuple(v.value, v.window_edge);
      },
      py::arg("points"), py::arg("i"),
      "Closed-form squared point-mass norm for the min kernel; returns (value, window_edge)");
  m.def("bridge_log_det", &kpm::bridge_log_det, py::arg("points"));
  m.def("binomial_coefficient", &kpm::binomial_coefficient, py::arg("n"), py::arg("k"));
  m.def("pascal_lower", &kpm::pascal_lower, py::arg("n"));
  m.def("pascal_lower_inverse", &kpm::pascal_lower_inverse, py::arg("n"));
  m.def("binomial_gram", &kpm::binomial_gram, py::arg("n"));
  m.def("binomial_gram_inverse", &kpm::binomial_gram_inverse, py::arg("n"));

  py::class_<kpm::SincGapReport>(m, "SincGapReport")
      .def_readonly("head_integral", &kpm::SincGapReport::head_integral)
      .def_readonly("tail_integral", &kpm::SincGapReport::tail_integral)
      .def_readonly("max_zero_residual", &kpm::SincGapReport::max_zero_residual);
  m.def("sinc_gap_check", &kpm::sinc_gap_check, py::arg("horizon"), py::arg("step"));

  // Spectral moments.
  py::class_<kpm::MomentReport>(m, "MomentReport")
      .def_readonly("m0", &kpm::MomentReport::m0)
      .def_readonly("m1", &kpm::MomentReport::m1)
      .def_readonly("m2", &kpm::MomentReport::m2)
      .def_readonly("covariance", &kpm::MomentReport::covariance)
      .def_readonly("m1_verdict", &kpm::MomentReport::m1_verdict)
      .def_readonly("m2_verdict", &kpm::MomentReport::m2_verdict)
      .def_readonly("m1_infinite", &kpm::MomentReport::m1_infinite);

  py::class_<kpm::CrossMomentCheck>(m, "CrossMomentCheck")
      .def_readonly("lhs", &kpm::CrossMomentCheck::lhs)
      .def_readonly("rhs", &kpm::CrossMomentCheck::rhs)
      .def_readonly("pass_", &kpm::CrossMomentCheck::pass)
      .def_readonly("verdict", &kpm::CrossMomentCheck::verdict);

  m.def("delta_side_moments", &kpm::delta_side_moments, py::arg("kernel"), py::arg("config"),
        py::arg("x"), py::arg("policy") = kpm::ScanPolicy{});
  m.def("kernel_side_moments", &kpm::kernel_side_moments, py::arg("kernel"), py::arg("config"),
        py::arg("x"), py::arg("policy") = kpm::ScanPolicy{});
  m.def("cross_moment_identity", &kpm::cross_moment_identity, py::arg("kernel"),
        py::arg("config"), py::arg("x"), py::arg("policy") = kpm::ScanPolicy{},
        py::arg("rel_tol") = 1e-8);

  // Networks.
  py::class_<kpm::GraphEdge>(m, "GraphEdge")
      .def(py::init<std::int64_t, std::int64_t, double>(), py::arg("u"), py::arg("v"),
           py::arg("conductance"))
      .def_readonly("u", &kpm::GraphEdge::u)
      .def_readonly("v", &kpm::GraphEdge::v)
      .def_readonly("conductance", &kpm::GraphEdge::conductance);

  py::class_<kpm::NetworkGraph>(m, "NetworkGraph")
      .def_static(
          "load",
          [](const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& edges,
             std::int64_t base) {
            std::vector<kpm::GraphEdge> list;
            list.reserve(edges.size());
            for (const auto& [u, v, c] : edges) list.push_back({u, v, c});
            return kpm::NetworkGraph::load(list, base);
          },
          py::arg("edges"), py::arg("base_point"))
      .def("__len__", &kpm::NetworkGraph::vertex_count)
      .def_property_readonly("vertices", &kpm::NetworkGraph::vertices)
      .def_property_readonly("base_point", &kpm::NetworkGraph::base_point)
      .def("degree", &kpm::NetworkGraph::degree, py::arg("label"))
      .def("adjacent", &kpm::NetworkGraph::adjacent, py::arg("x"), py::arg("y"))
      .def("conductance", &kpm::NetworkGraph::conductance, py::arg("x"), py::arg("y"));

  py::class_<kpm::EnergyKernel>(m, "EnergyKernel")
      .def_readonly("kernel", &kpm::EnergyKernel::kernel)
      .def_readonly("config", &kpm::EnergyKernel::config)
      .def_readonly("green", &kpm::EnergyKernel::green)
      .def_readonly("labels", &kpm::EnergyKernel::labels);

  py::class_<kpm::VertexMoments>(m, "VertexMoments")
      .def_readonly("degree", &kpm::VertexMoments::degree)
      .def_readonly("m1", &kpm::VertexMoments::m1)
      .def_readonly("m2", &kpm::VertexMoments::m2)
      .def_readonly("covariance", &kpm::VertexMoments::covariance)
      .def_readonly("bound_ok", &kpm::VertexMoments::bound_ok);

  m.def("laplacian_apply", &kpm::laplacian_apply, py::arg("graph"), py::arg("f"));
  m.def("energy_inner", &kpm::energy_inner, py::arg("graph"), py::arg("f"), py::arg("g"));
  m.def("delta_inner_energy", &kpm::delta_inner_energy, py::arg("graph"), py::arg("x"),
        py::arg("y"));
  m.def("dipole", &kpm::dipole, py::arg("graph"), py::arg("x"), py::arg("y"));
  m.def("energy_kernel", &kpm::energy_kernel, py::arg("graph"));
  m.def("network_moments", &kpm::network_moments, py::arg("graph"), py::arg("x"));

  // Sampling and interpolation.
  py::class_<kpm::KernelExpansion>(m, "KernelExpansion")
      .def_readonly("support", &kpm::KernelExpansion::support)
      .def_readonly("coefficients", &kpm::KernelExpansion::coefficients)
      .def_readonly("norm_sq", &kpm::KernelExpansion::norm_sq);

  m.def(
      "frame_lower_bound",
      [](const kpm::Kernel& kernel, const kpm::PointConfiguration& config,
         const std::vector<std::size_t>& samples, std::size_t n, double eps_pd) {
        return kpm::frame_lower_bound(kernel, config, as_samples(samples), n, eps_pd);
      },
      py::arg("kernel"), py::arg("config"), py::arg("samples"), py::arg("n"),
      py::arg("eps_pd") = 1e-12);
  m.def(
      "interpolate",
      [](const kpm::Kernel& kernel, const kpm::PointConfiguration& config,
         const std::vector<std::size_t>& samples, const Eigen::VectorXd& pairings, double cap) {
        return kpm::interpolate(kernel, config, as_samples(samples), pairings, cap);
      },
      py::arg("kernel"), py::arg("config"), py::arg("samples"), py::arg("pairings"),
      py::arg("divergence_cap") = 1e12);
  m.def("evaluate_expansion", &kpm::evaluate_expansion, py::arg("kernel"), py::arg("config"),
        py::arg("expansion"), py::arg("x"));
  m.def("pairings_from_values", &kpm::pairings_from_values, py::arg("kernel"), py::arg("config"),
        py::arg("n"), py::arg("values"), py::arg("eps_pd") = 1e-12);
  m.def(
      "restriction_isometry_check",
      [](const kpm::Kernel& kernel, const kpm::PointConfiguration& config,
         const std::vector<std::size_t>& samples, int trials, unsigned seed) {
        return kpm::restriction_isometry_check(kernel, config, as_samples(samples), trials, seed);
      },
      py::arg("kernel"), py::arg("config"), py::arg("samples"), py::arg("trials") = 100,
      py::arg("seed") = 0);

  m.def("parse_point_list", &kpm::parse_point_list, py::arg("text"));
}
