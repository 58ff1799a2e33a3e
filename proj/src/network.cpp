#include "memnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>

#include "memnet/rng.hpp"

namespace memnet {

void Graph::add_edge(int i, int j, std::optional<double> distance) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw ValidationError("edge endpoint out of range: (" + std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + ")");
  if (i == j) throw ValidationError("self loop at node " + std::to_string(i + 1));
  Edge e = std::minmax(i, j);
  if (has_edge(i, j))
    throw ValidationError("duplicate edge (" + std::to_string(e.first + 1) + ", " +
                          std::to_string(e.second + 1) + ")");
  if (adj_.size() != static_cast<std::size_t>(n_)) adj_.resize(n_);
  edges_.push_back(e);
  adj_[i].push_back(j);
  adj_[j].push_back(i);
  std::sort(adj_[i].begin(), adj_[i].end());
  std::sort(adj_[j].begin(), adj_[j].end());
  if (distance) {
    if (!(*distance > 0.0)) throw ValidationError("edge distances must be positive");
    distances_[e] = *distance;
  }
}

bool Graph::has_edge(int i, int j) const {
  if (i < 0 || i >= n_ || adj_.size() <= static_cast<std::size_t>(i)) return false;
  return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::optional<double> Graph::distance(int i, int j) const {
  auto it = distances_.find(std::minmax(i, j));
  if (it == distances_.end()) return std::nullopt;
  return it->second;
}

NeighbourStructure build_neighbour_stages(const Graph& graph, int max_stage) {
  if (max_stage < 1) throw ValidationError("max_stage must be >= 1");
  const int n = graph.num_nodes();
  NeighbourStructure ns;
  ns.max_stage = max_stage;
  ns.stage_sets.assign(n, std::vector<std::vector<int>>(max_stage));
  const auto& adj = graph.adjacency();
  std::vector<int> depth(n);
  for (int src = 0; src < n; ++src) {
    std::fill(depth.begin(), depth.end(), -1);
    depth[src] = 0;
    std::queue<int> q;
    q.push(src);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (depth[u] == max_stage) continue;
      if (adj.size() <= static_cast<std::size_t>(u)) continue;
      for (int v : adj[u]) {
        if (depth[v] >= 0) continue;
        depth[v] = depth[u] + 1;
        ns.stage_sets[src][depth[v] - 1].push_back(v);
        q.push(v);
      }
    }
    for (auto& s : ns.stage_sets[src]) std::sort(s.begin(), s.end());
  }
  return ns;
}

namespace {

// Weighted single-source shortest paths.
std::vector<double> dijkstra(const Graph& g, int src) {
  const int n = g.num_nodes();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  const auto& adj = g.adjacency();
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (int v : adj[u]) {
      const double nd = du + *g.distance(u, v);
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace

WeightMatrices compute_weights(const NeighbourStructure& ns, WeightScheme scheme,
                               const Graph& graph) {
  const int n = graph.num_nodes();
  if (static_cast<int>(ns.stage_sets.size()) != n)
    throw DimensionMismatch("compute_weights: neighbour structure does not match graph");
  if (scheme == WeightScheme::inverse_distance && graph.num_edges() > 0 && !graph.has_distances())
    throw MissingDistances("inverse_distance weights need a distance on every edge");

  WeightMatrices w(n, ns.max_stage, 1);
  for (int i = 0; i < n; ++i) {
    std::vector<double> dist;
    if (scheme == WeightScheme::inverse_distance) dist = dijkstra(graph, i);
    for (int r = 1; r <= ns.max_stage; ++r) {
      const auto& nb = ns.stage(i, r);
      if (nb.empty()) continue;
      MatrixXd& m = w(r, 1);
      if (scheme == WeightScheme::equal) {
        for (int l : nb) m(i, l) = 1.0 / static_cast<double>(nb.size());
      } else {
        double total = 0.0;
        for (int l : nb) total += 1.0 / dist[l];
        for (int l : nb) m(i, l) = (1.0 / dist[l]) / total;
      }
    }
  }
  return w;
}

Graph fully_connected(int n) {
  if (n < 2) throw ValidationError("fully_connected needs n >= 2");
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

double metric_distance(std::pair<double, double> a, std::pair<double, double> b, Metric metric) {
  if (metric == Metric::euclidean) return std::hypot(a.first - b.first, a.second - b.second);
  constexpr double radius_km = 6371.0;
  constexpr double deg = std::numbers::pi / 180.0;
  const double lat1 = a.second * deg, lat2 = b.second * deg;
  const double dlat = lat2 - lat1, dlon = (b.first - a.first) * deg;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

Graph mst_from_coords(const std::vector<std::pair<double, double>>& coords, Metric metric) {
  const int n = static_cast<int>(coords.size());
  if (n < 2) throw ValidationError("mst_from_coords needs at least 2 nodes");
  struct Cand {
    double len;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double len = metric_distance(coords[i], coords[j], metric);
      if (len == 0.0)
        throw DuplicateCoordinates("nodes " + std::to_string(i + 1) + " and " +
                                   std::to_string(j + 1) + " share coordinates");
      cands.push_back({len, i, j});
    }
  // Kruskal over (length, i, j) order yields the lexicographically smallest
  // edge list among equal-weight trees.
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.len != b.len) return a.len < b.len;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Cand> chosen;
  for (const auto& c : cands) {
    const int a = find(c.i), b = find(c.j);
    if (a == b) continue;
    parent[a] = b;
    chosen.push_back(c);
    if (static_cast<int>(chosen.size()) == n - 1) break;
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Cand& a, const Cand& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  Graph g(n);
  for (const auto& c : chosen) g.add_edge(c.i, c.j, c.len);
  g.coords = coords;
  return g;
}

Graph random_graph(int n, double edge_prob, Rng& rng) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob) g.add_edge(i, j);
  return g;
}

}  // namespace memnet
