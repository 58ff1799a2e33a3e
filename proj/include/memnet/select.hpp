#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memnet/estimate.hpp"
#include "memnet/forecast.hpp"
#include "memnet/network.hpp"

namespace memnet {

enum class Criterion { bic, aic, mspe };

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& s);

InformationCriteria information_criteria(const FitResult& fit, int T);

/// Parses "(p,[s1,...,sp])", e.g. "(2,[1,0])"; C = 1.
GnarOrder parse_order(const std::string& s);

/// (1,[0]), (1,[1]), (1,[2]), (2,[0,0]), (2,[1,0]), (2,[1,1]).
std::vector<GnarOrder> standard_orders();

struct Candidate {
  std::string name;  ///< defaults to the spec label when empty
  ModelSpec spec;
  Graph graph;
};

/// Cartesian product of kinds, orders and alpha modes on one graph.
std::vector<Candidate> make_grid(const std::vector<ModelKind>& kinds, const std::vector<GnarOrder>& orders,
                                 const std::vector<Mode>& alpha_modes, const Graph& graph,
                                 Estimation estimation = Estimation::exact);

struct CandidateResult {
  std::string name;
  ModelSpec spec;
  bool failed = false;  ///< fit threw; `error` holds the message
  std::string error;
  int M = 0;
  FitResult fit;
  double bic = 0.0, aic = 0.0;
  std::optional<double> mspe;
};

struct SelectionReport {
  Criterion criterion = Criterion::bic;
  std::vector<CandidateResult> rows;

  double value(int row, Criterion c) const;
  /// Converged candidates sorted by the criterion (ties keep grid order).
  std::vector<int> ranking(Criterion c) const;
  /// Index of the best converged candidate, -1 when there is none.
  int winner(Criterion c) const;
  int winner() const { return winner(criterion); }

  /// One row per candidate: name,model,estimation,order,alpha_mode,d_mode,
  /// sigma2_mode,M,T,loglik,bic,aic,mspe,converged,iterations,rank_bic,rank_aic,rank_mspe,error
  std::string csv() const;
  /// key=value winner summary.
  std::string summary() const;
};

struct GridOptions {
  Criterion criterion = Criterion::bic;
  int holdout = 0;  ///< mspe: length of the held-out suffix
  ForecastMethod method = ForecastMethod::ef;
  FitOptions fit;
  int threads = 1;
};

/// Fits every candidate. For the mspe criterion each candidate is fitted on
/// the data without the suffix, which is then predicted one step at a time.
/// Throws AllCandidatesFailed when no candidate converges.
SelectionReport grid_search(const SeriesPanel& data, const std::vector<Candidate>& grid,
                            const GridOptions& opts = {});

/// "" with no failures, "*" below 5% non-converged, "**" from 5% upwards.
std::string star_flag(int nonconverged, int total);

/// How often each candidate wins across replicate reports.
std::vector<int> win_counts(const std::vector<SelectionReport>& reports, Criterion c);

enum class GraphStrategy { fully_connected, mst, gnar_inf_approx };

std::string to_string(GraphStrategy s);
GraphStrategy parse_graph_strategy(const std::string& s);

struct DiscoverConfig {
  int num_graphs = 50;
  std::vector<double> edge_probs{0.2, 0.4, 0.6};
  int p_high = 10;
  int holdout = 0;  ///< 0 selects max(10, T / 5)
  std::uint64_t seed = 1;
  Metric metric = Metric::euclidean;
  int threads = 1;

  void validate() const;
};

struct DiscoverResult {
  Graph graph;
  double holdout_mspe = 0.0;             ///< gnar_inf_approx only
  std::vector<double> scores;            ///< per random graph, +inf when unusable
  int chosen = -1;
};

/// One-step holdout MSPE of a GNAR(p, [1,...,1]) least-squares fit.
double gnar_holdout_mspe(const SeriesPanel& data, const Graph& graph, int p, int holdout);

/// mst builds a spanning tree on `coords`; gnar_inf_approx scores seeded
/// Erdos-Renyi graphs by gnar_holdout_mspe and keeps the best.
DiscoverResult discover_graph(const SeriesPanel& data, GraphStrategy strategy, const DiscoverConfig& cfg = {},
                              const std::optional<std::vector<std::pair<double, double>>>& coords = std::nullopt);

}  // namespace memnet
