#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kpm/points.hpp"

namespace kpm {

struct GraphEdge {
  std::int64_t u;
  std::int64_t v;
  double conductance;
};

/// Finite weighted graph with a distinguished base point. Edges carry
/// positive symmetric conductances, self-loops are rejected, and the graph
/// must be connected. Vertices are kept in ascending label order; infinite
/// networks enter as finite truncations chosen by the caller.
class NetworkGraph {
 public:
  static NetworkGraph load(const std::vector<GraphEdge>& edges, std::int64_t base_point);

  std::size_t vertex_count() const { return labels_.size(); }
  const std::vector<std::int64_t>& vertices() const { return labels_; }
  std::int64_t base_point() const { return base_; }

  std::size_t index_of(std::int64_t label) const;
  bool has_vertex(std::int64_t label) const;

  /// c(x) = sum of conductances at x.
  double degree(std::int64_t label) const;
  bool adjacent(std::int64_t x, std::int64_t y) const;
  double conductance(std::int64_t x, std::int64_t y) const;  // 0 when not adjacent
  const std::vector<std::pair<std::size_t, double>>& neighbors(std::size_t index) const {
    return adjacency_[index];
  }

 private:
  std::vector<std::int64_t> labels_;
  std::int64_t base_ = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
  std::vector<double> degrees_;
};

/// (Delta_c f)(x) = sum_{y ~ x} c_xy (f(x) - f(y)); f indexed by vertex order.
Eigen::VectorXd laplacian_apply(const NetworkGraph& graph, const Eigen::VectorXd& f);

/// Dirichlet-energy inner product, one term per undirected edge:
/// sum_e c_e (f(u) - f(v))(g(u) - g(v)).
double energy_inner(const NetworkGraph& graph, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& g);

/// Closed-form energy inner product of two vertex point masses:
/// c(x) on the diagonal, -c_xy for neighbors, 0 otherwise.
double delta_inner_energy(const NetworkGraph& graph, std::int64_t x, std::int64_t y);

/// Shared factorization of the grounded (base-row/column deleted)
/// Laplacian, which is positive definite on a connected graph.
class GroundedLaplacian {
 public:
  explicit GroundedLaplacian(const NetworkGraph& graph);

  /// Solves Delta_grounded v = rhs over the non-base vertices.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  const std::vector<std::int64_t>& interior_labels() const { return interior_; }
  std::size_t interior_index(std::int64_t label) const;

 private:
  std::vector<std::int64_t> interior_;  // all vertices except the base point
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

/// The voltage representative of the increment functional f -> f(x) - f(y):
/// solves Delta_c v = delta_x - delta_y, grounded so that v(base) = 0.
/// Returned over the full vertex order.
Eigen::VectorXd dipole(const NetworkGraph& graph, std::int64_t x, std::int64_t y);

struct EnergyKernel {
  Kernel kernel;            // evaluates <v_x, v_y> by vertex label
  PointConfiguration config;  // non-base vertices, ascending label order
  Eigen::MatrixXd green;    // Green matrix over the interior vertices
  std::vector<std::int64_t> labels;
};

/// Kernel of the relative reproducing structure: k(x, y) = <v_x, v_y> with
/// v_x the dipole from x to the base point. Equals the Green's function of
/// the grounded Laplacian, so (Delta_c k_x)(y) = delta_{xy} off the base.
EnergyKernel energy_kernel(const NetworkGraph& graph);

struct VertexMoments {
  double degree;      // c(x); also the first moment
  double m1;
  double m2;          // c(x)^2 + sum_{y~x} c_xy^2
  double covariance;  // sum_{y~x} c_xy^2
  bool bound_ok;      // covariance <= c(x)^2
};

/// Conductance moment report for a non-base vertex.
VertexMoments network_moments(const NetworkGraph& graph, std::int64_t x);

}  // namespace kpm
