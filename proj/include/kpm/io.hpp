#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpm/moments.hpp"
#include "kpm/network.hpp"
#include "kpm/points.hpp"
#include "kpm/scan.hpp"

namespace kpm {

/// A kernel plus, when the spec file carries one, its point configuration.
struct KernelSpec {
  Kernel kernel;
  std::optional<PointConfiguration> config;
};

/// Kernel spec schema:
///   {"kernel": "min"|"bridge"|"binomial"|"sinc"|"matrix",
///    "points": [...],          optional
///    "ordered": bool,          optional, default true for min/bridge
///    "matrix": [[...], ...]}   required for kernel == "matrix"
/// Matrix kernels are rejected unless exactly symmetric.
KernelSpec load_kernel_spec(const nlohmann::json& spec);
KernelSpec load_kernel_spec_file(const std::string& path);

/// Point-list syntax accepted by the CLI:
///   explicit CSV        1,2,3.5
///   continuation        1,2,...,50        (step from the last explicit pair)
///   integer range       0..20
///   sparse generator    sparse:N          x_j = j(j+1)/2 for j = 1..N
///   uniform generator   uniform:h:N       h, 2h, ..., Nh
std::vector<double> parse_point_list(const std::string& text);

/// Edge-list lines "u v c" with '#' comments and blank lines skipped.
std::vector<GraphEdge> parse_edge_list(std::istream& in);
std::vector<GraphEdge> load_edge_list_file(const std::string& path);

nlohmann::json trace_to_json(const FiltrationTrace& trace);
void write_trace_csv(std::ostream& out, const FiltrationTrace& trace);

nlohmann::json policy_to_json(const ScanPolicy& policy);
nlohmann::json moment_report_to_json(const MomentReport& report);

/// A double that may be +inf/NaN: JSON null in that case.
nlohmann::json json_number(double value);

}  // namespace kpm
