#include "kpm/network.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <queue>
#include <sstream>

namespace kpm {

NetworkGraph NetworkGraph::load(const std::vector<GraphEdge>& edges, std::int64_t base_point) {
  if (edges.empty()) throw InputError("edge list must be nonempty");

  std::map<std::pair<std::int64_t, std::int64_t>, double> canonical;
  for (const GraphEdge& e : edges) {
    if (e.u == e.v) {
      std::ostringstream msg;
      msg << "self-loop at vertex " << e.u;
      throw SelfLoop(msg.str());
    }
    if (!(e.conductance > 0.0)) {
      std::ostringstream msg;
      msg << "edge (" << e.u << ", " << e.v << ") has conductance " << e.conductance;
      throw NonpositiveConductance(msg.str());
    }
    const auto key = std::minmax(e.u, e.v);
    const auto [it, inserted] = canonical.emplace(key, e.conductance);
    if (!inserted && it->second != e.conductance) {
      std::ostringstream msg;
      msg << "edge (" << e.u << ", " << e.v << ") listed twice with conductances " << it->second
          << " and " << e.conductance;
      throw InputError(msg.str());
    }
  }

  NetworkGraph graph;
  graph.base_ = base_point;
  {
    std::vector<std::int64_t> labels;
    for (const auto& [key, c] : canonical) {
      labels.push_back(key.first);
      labels.push_back(key.second);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    graph.labels_ = std::move(labels);
  }
  if (!graph.has_vertex(base_point)) {
    std::ostringstream msg;
    msg << "base point " << base_point << " is not a vertex";
    throw InputError(msg.str());
  }

  const std::size_t n = graph.labels_.size();
  graph.adjacency_.assign(n, {});
  graph.degrees_.assign(n, 0.0);
  for (const auto& [key, c] : canonical) {
    const std::size_t iu = graph.index_of(key.first);
    const std::size_t iv = graph.index_of(key.second);
    graph.adjacency_[iu].emplace_back(iv, c);
    graph.adjacency_[iv].emplace_back(iu, c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(graph.adjacency_[i].begin(), graph.adjacency_[i].end());
    for (const auto& [j, c] : graph.adjacency_[i]) graph.degrees_[i] += c;
  }

  // Connectivity check (breadth first from the base point).
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(graph.index_of(base_point));
  seen[graph.index_of(base_point)] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (const auto& [j, c] : graph.adjacency_[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  if (reached != n) {
    std::ostringstream msg;
    msg << "graph is disconnected: " << reached << " of " << n
        << " vertices reachable from the base point";
    throw Disconnected(msg.str());
  }
  return graph;
}

std::size_t NetworkGraph::index_of(std::int64_t label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    std::ostringstream msg;
    msg << "unknown vertex " << label;
    throw InputError(msg.str());
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool NetworkGraph::has_vertex(std::int64_t label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

double NetworkGraph::degree(std::int64_t label) const { return degrees_[index_of(label)]; }

bool NetworkGraph::adjacent(std::int64_t x, std::int64_t y) const {
  return conductance(x, y) > 0.0;
}

double NetworkGraph::conductance(std::int64_t x, std::int64_t y) const {
  const std::size_t ix = index_of(x);
  const std::size_t iy = index_of(y);
  for (const auto& [j, c] : adjacency_[ix])
    if (j == iy) return c;
  return 0.0;
}

Eigen::VectorXd laplacian_apply(const NetworkGraph& graph, const Eigen::VectorXd& f) {
  const std::size_t n = graph.vertex_count();
  if (static_cast<std::size_t>(f.size()) != n) throw InputError("vertex function length mismatch");
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const auto& [j, c] : graph.neighbors(i))
      acc += c * (f(static_cast<Eigen::Index>(i)) - f(static_cast<Eigen::Index>(j)));
    out(static_cast<Eigen::Index>(i)) = acc;
  }
  return out;
}

double energy_inner(const NetworkGraph& graph, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& g) {
  const std::size_t n = graph.vertex_count();
  if (static_cast<std::size_t>(f.size()) != n || static_cast<std::size_t>(g.size()) != n)
    throw InputError("vertex function length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, c] : graph.neighbors(i)) {
      if (j < i) continue;  // one term per undirected edge
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      acc += c * (f(ii) - f(jj)) * (g(ii) - g(jj));
    }
  }
  return acc;
}

double delta_inner_energy(const NetworkGraph& graph, std::int64_t x, std::int64_t y) {
  if (x == y) return graph.degree(x);
  const double c = graph.conductance(x, y);
  return c > 0.0 ? -c : 0.0;
}

GroundedLaplacian::GroundedLaplacian(const NetworkGraph& graph) {
  const std::size_t n = graph.vertex_count();
  const std::size_t base = graph.index_of(graph.base_point());
  interior_.reserve(n - 1);
  std::vector<std::ptrdiff_t> to_interior(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == base) continue;
    to_interior[i] = static_cast<std::ptrdiff_t>(interior_.size());
    interior_.push_back(graph.vertices()[i]);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == base) continue;
    const auto row = to_interior[i];
    double diag = 0.0;
    for (const auto& [j, c] : graph.neighbors(i)) {
      diag += c;
      if (j == base) continue;
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(to_interior[j]), -c);
    }
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  Eigen::SparseMatrix<double> grounded(static_cast<int>(interior_.size()),
                                       static_cast<int>(interior_.size()));
  grounded.setFromTriplets(triplets.begin(), triplets.end());
  solver_.compute(grounded);
  if (solver_.info() != Eigen::Success)
    throw NotPositiveDefinite("grounded Laplacian factorization failed", 0);
}

Eigen::VectorXd GroundedLaplacian::solve(const Eigen::VectorXd& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != interior_.size())
    throw InputError("grounded rhs length mismatch");
  return solver_.solve(rhs);
}

std::size_t GroundedLaplacian::interior_index(std::int64_t label) const {
  const auto it = std::lower_bound(interior_.begin(), interior_.end(), label);
  if (it == interior_.end() || *it != label) {
    std::ostringstream msg;
    msg << "vertex " << label << " is not an interior vertex";
    throw InputError(msg.str());
  }
  return static_cast<std::size_t>(it - interior_.begin());
}

Eigen::VectorXd dipole(const NetworkGraph& graph, std::int64_t x, std::int64_t y) {
  if (x == y) throw InputError("dipole endpoints must differ");
  const GroundedLaplacian grounded(graph);
  const std::size_t m = grounded.interior_labels().size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  if (x != graph.base_point())
    rhs(static_cast<Eigen::Index>(grounded.interior_index(x))) += 1.0;
  if (y != graph.base_point())
    rhs(static_cast<Eigen::Index>(grounded.interior_index(y))) -= 1.0;
  const Eigen::VectorXd interior = grounded.solve(rhs);

  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.vertex_count()));
  for (std::size_t i = 0; i < m; ++i)
    full(static_cast<Eigen::Index>(graph.index_of(grounded.interior_labels()[i]))) =
        interior(static_cast<Eigen::Index>(i));
  return full;
}

EnergyKernel energy_kernel(const NetworkGraph& graph) {
  const GroundedLaplacian grounded(graph);
  const std::size_t m = grounded.interior_labels().size();
  if (m == 0) throw InputError("graph has no interior vertices");

  Eigen::MatrixXd green(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    rhs(static_cast<Eigen::Index>(j)) = 1.0;
    green.col(static_cast<Eigen::Index>(j)) = grounded.solve(rhs);
    rhs(static_cast<Eigen::Index>(j)) = 0.0;
  }
  green = 0.5 * (green + green.transpose().eval());

  EnergyKernel out;
  out.labels = grounded.interior_labels();
  out.green = green;

  std::vector<double> points;
  points.reserve(m);
  for (std::int64_t label : out.labels) points.push_back(static_cast<double>(label));
  out.config = build_config(std::move(points), true);

  auto labels = std::make_shared<std::vector<std::int64_t>>(out.labels);
  auto table = std::make_shared<Eigen::MatrixXd>(out.green);
  out.kernel = Kernel(
      "energy",
      [labels, table](double x, double y) {
        const auto find = [&](double v) {
          const auto lab = static_cast<std::int64_t>(std::llround(v));
          const auto it = std::lower_bound(labels->begin(), labels->end(), lab);
          if (it == labels->end() || *it != lab) {
            std::ostringstream msg;
            msg << "vertex " << v << " is not an interior vertex of the network";
            throw DomainViolation(msg.str());
          }
          return static_cast<Eigen::Index>(it - labels->begin());
        };
        return (*table)(find(x), find(y));
      },
      true, nullptr);
  return out;
}

VertexMoments network_moments(const NetworkGraph& graph, std::int64_t x) {
  if (x == graph.base_point())
    throw InputError("moment report is defined away from the base point");
  const std::size_t ix = graph.index_of(x);
  VertexMoments out;
  out.degree = graph.degree(x);
  out.m1 = out.degree;
  double sq = 0.0;
  for (const auto& [j, c] : graph.neighbors(ix)) sq += c * c;
  out.covariance = sq;
  out.m2 = out.degree * out.degree + sq;
  out.bound_ok = out.covariance <= out.degree * out.degree * (1.0 + 1e-12);
  return out;
}

}  // namespace kpm
