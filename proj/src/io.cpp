#include "kpm/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kpm/kernels.hpp"

namespace kpm {

namespace {

double parse_double(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse number '" + token + "'");
  }
  if (used != token.size()) throw InputError("cannot parse number '" + token + "'");
  return value;
}

long parse_count(const std::string& token, const char* what) {
  const double v = parse_double(token);
  if (!(v >= 1.0) || std::floor(v) != v || v > 1e9)
    throw InputError(std::string("invalid ") + what + " '" + token + "'");
  return static_cast<long>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

KernelSpec load_kernel_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) throw InputError("kernel spec must be a JSON object");
  if (!spec.contains("kernel") || !spec["kernel"].is_string())
    throw InputError("kernel spec needs a string 'kernel' field");
  const std::string name = spec["kernel"].get<std::string>();
  const auto id = kernel_id_from_name(name);
  if (!id) throw InputError("unknown kernel '" + name + "'");

  KernelSpec out;
  if (*id == BuiltinKernelId::MatrixBacked) {
    if (!spec.contains("matrix") || !spec["matrix"].is_array())
      throw InputError("matrix kernel spec needs a 'matrix' array");
    const auto& rows = spec["matrix"];
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd entries(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
        throw InputError("matrix kernel spec must be square");
      for (Eigen::Index j = 0; j < m; ++j)
        entries(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    out.kernel = make_matrix_kernel(std::move(entries));
  } else {
    out.kernel = make_kernel(*id);
  }

  if (spec.contains("points")) {
    if (!spec["points"].is_array()) throw InputError("'points' must be an array");
    std::vector<double> points;
    points.reserve(spec["points"].size());
    for (const auto& p : spec["points"]) points.push_back(p.get<double>());
    const bool default_ordered =
        *id == BuiltinKernelId::Min || *id == BuiltinKernelId::Bridge;
    const bool ordered = spec.value("ordered", default_ordered);
    out.config = build_config(std::move(points), ordered);
  }
  return out;
}

KernelSpec load_kernel_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open kernel spec file '" + path + "'");
  nlohmann::json spec;
  try {
    in >> spec;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("cannot parse kernel spec '" + path + "': " + e.what());
  }
  return load_kernel_spec(spec);
}

std::vector<double> parse_point_list(const std::string& text) {
  if (text.empty()) throw InputError("empty point list");

  if (text.rfind("sparse:", 0) == 0) {
    const long count = parse_count(text.substr(7), "sparse generator count");
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (long j = 1; j <= count; ++j)
      points.push_back(static_cast<double>(j) * static_cast<double>(j + 1) / 2.0);
    return points;
  }
  if (text.rfind("uniform:", 0) == 0) {
    const auto parts = split(text.substr(8), ':');
    if (parts.size() != 2) throw InputError("uniform generator needs 'uniform:h:N'");
    const double h = parse_double(parts[0]);
    if (!(h > 0.0)) throw InputError("uniform spacing must be positive");
    const long count = parse_count(parts[1], "uniform generator count");
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (long j = 1; j <= count; ++j) points.push_back(h * static_cast<double>(j));
    return points;
  }

  const auto dots = text.find("..");
  if (dots != std::string::npos && text.find(',') == std::string::npos) {
    const double lo = parse_double(text.substr(0, dots));
    const double hi = parse_double(text.substr(dots + 2));
    if (std::floor(lo) != lo || std::floor(hi) != hi || hi < lo)
      throw InputError("range syntax needs integers a..b with a <= b");
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(hi - lo) + 1);
    for (double v = lo; v <= hi; v += 1.0) points.push_back(v);
    return points;
  }

  const auto tokens = split(text, ',');
  std::vector<double> points;
  points.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] == "...") {
      if (points.size() < 2 || t + 1 != tokens.size() - 1)
        throw InputError("'...' continuation needs two leading values and one final value");
      const double step = points[points.size() - 1] - points[points.size() - 2];
      if (!(step != 0.0)) throw InputError("'...' continuation needs a nonzero step");
      const double last = parse_double(tokens[t + 1]);
      const double span = (last - points.back()) / step;
      if (!(span > 0.5) || std::abs(span - std::round(span)) > 1e-9)
        throw InputError("'...' continuation endpoint is off the arithmetic grid");
      const long extra = static_cast<long>(std::round(span));
      const double base = points.back();
      for (long j = 1; j <= extra; ++j) points.push_back(base + step * static_cast<double>(j));
      return points;
    }
    points.push_back(parse_double(tokens[t]));
  }
  return points;
}

std::vector<GraphEdge> parse_edge_list(std::istream& in) {
  std::vector<GraphEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long u, v;
    double c;
    if (!(fields >> u)) continue;  // blank or comment-only line
    if (!(fields >> v >> c)) {
      std::ostringstream msg;
      msg << "edge list line " << lineno << ": expected 'u v c'";
      throw InputError(msg.str());
    }
    std::string extra;
    if (fields >> extra) {
      std::ostringstream msg;
      msg << "edge list line " << lineno << ": trailing data '" << extra << "'";
      throw InputError(msg.str());
    }
    edges.push_back({u, v, c});
  }
  return edges;
}

std::vector<GraphEdge> load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

nlohmann::json json_number(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

nlohmann::json policy_to_json(const ScanPolicy& policy) {
  return {{"max_n", policy.max_n},
          {"window", policy.window},
          {"rel_tol", policy.rel_tol},
          {"divergence_cap", policy.divergence_cap},
          {"slope_tol", policy.slope_tol},
          {"eps_pd", policy.eps_pd}};
}

nlohmann::json trace_to_json(const FiltrationTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& s : trace.steps) steps.push_back({{"n", s.n}, {"value", s.value}});
  return {{"point", trace.target},
          {"index", trace.target_index},
          {"verdict", to_string(trace.verdict)},
          {"estimate", json_number(trace.estimate)},
          {"growth_rate", json_number(trace.growth_rate)},
          {"saturated", trace.saturated},
          {"steps", std::move(steps)}};
}

void write_trace_csv(std::ostream& out, const FiltrationTrace& trace) {
  out.precision(17);
  out << "n,zeta,verdict_so_far\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const bool last = k + 1 == trace.steps.size();
    out << trace.steps[k].n << ',' << trace.steps[k].value << ','
        << (last ? to_string(trace.verdict) : "scanning") << '\n';
  }
}

nlohmann::json moment_report_to_json(const MomentReport& report) {
  return {{"m0", json_number(report.m0)},
          {"m1", json_number(report.m1)},
          {"m2", json_number(report.m2)},
          {"covariance", json_number(report.covariance)},
          {"m1_verdict", to_string(report.m1_verdict)},
          {"m2_verdict", to_string(report.m2_verdict)},
          {"m1_infinite", report.m1_infinite}};
}

}  // namespace kpm
