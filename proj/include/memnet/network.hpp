#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memnet/types.hpp"

namespace memnet {

/// Undirected simple graph on nodes 0..N-1 (1-based in files and reports).
class Graph {
 public:
  using Edge = std::pair<int, int>;  // (i, j) with i < j, 0-based

  Graph() = default;
  explicit Graph(int num_nodes) : n_(num_nodes) {}

  /// Adds edge (i, j), 0-based; throws on self loops, duplicates or bad ids.
  void add_edge(int i, int j, std::optional<double> distance = std::nullopt);

  int num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;

  /// Edge length if every edge carries one.
  bool has_distances() const { return !edges_.empty() && distances_.size() == edges_.size(); }
  std::optional<double> distance(int i, int j) const;

  const std::vector<std::vector<int>>& adjacency() const { return adj_; }

  std::optional<std::vector<std::pair<double, double>>> coords;
  std::vector<std::string> labels;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::map<Edge, double> distances_;
  std::vector<std::vector<int>> adj_ = std::vector<std::vector<int>>(n_);
};

/// stage_sets[i][r-1] = nodes at shortest-path distance exactly r from i.
struct NeighbourStructure {
  int max_stage = 0;
  std::vector<std::vector<std::vector<int>>> stage_sets;

  const std::vector<int>& stage(int node, int r) const { return stage_sets.at(node).at(r - 1); }
};

NeighbourStructure build_neighbour_stages(const Graph& graph, int max_stage);

enum class WeightScheme { equal, inverse_distance };

/// W^(r,c) for r = 1..max_stage and c = 1..C; matrices(r, c) is N x N.
class WeightMatrices {
 public:
  WeightMatrices() = default;
  WeightMatrices(int n, int max_stage, int covariates)
      : n_(n), max_stage_(max_stage), covariates_(covariates),
        w_(static_cast<std::size_t>(max_stage) * covariates, MatrixXd::Zero(n, n)) {}

  int dim() const { return n_; }
  int max_stage() const { return max_stage_; }
  int covariates() const { return covariates_; }

  /// 1-based stage r and covariate c.
  MatrixXd& operator()(int r, int c) { return w_.at(index(r, c)); }
  const MatrixXd& operator()(int r, int c) const { return w_.at(index(r, c)); }

 private:
  std::size_t index(int r, int c) const {
    if (r < 1 || r > max_stage_ || c < 1 || c > covariates_)
      throw DimensionMismatch("WeightMatrices: stage/covariate index out of range");
    return static_cast<std::size_t>(r - 1) * covariates_ + (c - 1);
  }
  int n_ = 0, max_stage_ = 0, covariates_ = 0;
  std::vector<MatrixXd> w_;
};

/// Weight matrices with a single covariate. Inverse-distance weights use the
/// weighted shortest-path length between i and its stage-r neighbour l.
WeightMatrices compute_weights(const NeighbourStructure& ns, WeightScheme scheme,
                               const Graph& graph);

Graph fully_connected(int n);

enum class Metric { euclidean, greatcircle };

/// Minimum spanning tree on the given points; ties resolve to the
/// lexicographically smallest edge list. For `greatcircle`, x is longitude
/// and y latitude in degrees and lengths are kilometres.
Graph mst_from_coords(const std::vector<std::pair<double, double>>& coords, Metric metric);

double metric_distance(std::pair<double, double> a, std::pair<double, double> b, Metric metric);

/// Erdos-Renyi G(n, p) draw.
class Rng;
Graph random_graph(int n, double edge_prob, Rng& rng);

}  // namespace memnet
