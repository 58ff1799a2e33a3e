#include <gtest/gtest.h>

#include <cmath>

#include "memnet/select.hpp"
#include "memnet/simulate.hpp"
#include "test_models.hpp"

using namespace memnet;
using namespace testmodels;

namespace {

SeriesPanel dgp1_series(int T, std::uint64_t seed) {
  const Preset pr = dgp_preset("DGP1", "fivenet");
  SimConfig c;
  c.method = SimMethod::exact;
  c.seed = seed;
  return simulate_model(Model(pr.spec, pr.graph), pr.params, T, c);
}

// Short-memory GNAR(1,[1]) on fiveNet.
SeriesPanel sparse_gnar(int T, std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.burn_in = 500;
  return simulate_fignar(gnar11(five_net(), 0.2, 0.6), VectorXd::Zero(5), VectorXd::Ones(5), T, c);
}

CandidateResult fake_row(const std::string& name, double bic, double aic, bool converged) {
  CandidateResult r;
  r.name = name;
  r.bic = bic;
  r.aic = aic;
  r.fit.converged = converged;
  r.fit.T = 100;
  return r;
}

}  // namespace

TEST(InformationCriteriaSel, Arithmetic) {
  const auto ic = information_criteria(0.0, 4, std::exp(2.0));
  EXPECT_NEAR(ic.bic, 8.0, 1e-12);
  EXPECT_DOUBLE_EQ(ic.aic, 8.0);
  FitResult small, big;
  small.loglik = big.loglik = -50.0;
  small.M = 4;
  big.M = 6;
  EXPECT_LT(information_criteria(small, 100).bic, information_criteria(big, 100).bic);
  EXPECT_LT(information_criteria(small, 100).aic, information_criteria(big, 100).aic);
}

TEST(Orders, ParseAndStandardGrid) {
  const GnarOrder o = parse_order(" (2, [1,0]) ");
  EXPECT_EQ(o.p, 2);
  EXPECT_EQ(o.s, (std::vector<int>{1, 0}));
  EXPECT_EQ(o.label(), "(2,[1,0])");
  for (const char* bad : {"2,[1,0]", "(2,[1])", "(1,[x])", "(1,[1]", "(0,[])", "(1,[-1])"})
    EXPECT_THROW(parse_order(bad), ValidationError) << bad;
  const auto grid = standard_orders();
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[1].label(), "(1,[1])");
  EXPECT_EQ(grid[5].label(), "(2,[1,1])");
}

TEST(Grid, CartesianProduct) {
  const auto g = make_grid({ModelKind::fignar, ModelKind::gnarfi}, standard_orders(),
                           {Mode::global, Mode::individual}, five_net(), Estimation::conditional);
  ASSERT_EQ(g.size(), 24u);
  EXPECT_EQ(g[0].spec.estimation, Estimation::exact);
  EXPECT_EQ(g[12].spec.kind, ModelKind::gnarfi);
  EXPECT_EQ(g[12].spec.estimation, Estimation::conditional);
  EXPECT_EQ(g[6].spec.alpha_mode, Mode::individual);
}

TEST(StarFlag, Thresholds) {
  EXPECT_EQ(star_flag(0, 100), "");
  EXPECT_EQ(star_flag(4, 100), "*");
  EXPECT_EQ(star_flag(5, 100), "**");
  EXPECT_EQ(star_flag(12, 100), "**");
}

TEST(Report, NonConvergedNeverWins) {
  SelectionReport rep;
  rep.rows = {fake_row("a", 10.0, 12.0, true), fake_row("b", 5.0, 4.0, false), fake_row("c", 7.0, 13.0, true)};
  EXPECT_EQ(rep.winner(Criterion::bic), 2);
  EXPECT_EQ(rep.winner(Criterion::aic), 0);
  EXPECT_EQ(rep.ranking(Criterion::bic), (std::vector<int>{2, 0}));
  EXPECT_EQ(rep.winner(Criterion::mspe), -1);
  rep.rows[0].fit.converged = rep.rows[2].fit.converged = false;
  EXPECT_EQ(rep.winner(), -1);
}

TEST(Report, WinCounts) {
  SelectionReport a, b;
  a.rows = {fake_row("x", 1.0, 2.0, true), fake_row("y", 2.0, 1.0, true)};
  b.rows = {fake_row("x", 3.0, 2.0, true), fake_row("y", 2.0, 1.0, true)};
  EXPECT_EQ(win_counts({a, b}, Criterion::bic), (std::vector<int>{1, 1}));
  EXPECT_EQ(win_counts({a, b}, Criterion::aic), (std::vector<int>{0, 2}));
}

TEST(GridSearch, SelectsOnlyCandidateAndWritesReport) {
  const SeriesPanel data = dgp1_series(150, 1);
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const SelectionReport rep = grid_search(data, {Candidate{"truth", pr.spec, pr.graph}});
  EXPECT_EQ(rep.winner(), 0);
  const CandidateResult& r = rep.rows[0];
  EXPECT_DOUBLE_EQ(r.bic, -2 * r.fit.loglik + r.M * std::log(150.0));
  EXPECT_DOUBLE_EQ(r.aic, -2 * r.fit.loglik + 2.0 * r.M);
  const std::string csv = rep.csv();
  EXPECT_EQ(csv.rfind("name,model,estimation,order,", 0), 0u);
  EXPECT_NE(csv.find("truth,FIGNAR,exact,\"(1,[1])\",global,individual,individual,12,150,"), std::string::npos);
  EXPECT_NE(rep.summary().find("winner=truth"), std::string::npos);
}

TEST(GridSearch, PrefersNetworkTermOnDgp1) {
  const SeriesPanel data = dgp1_series(200, 2);
  GridOptions opts;
  opts.threads = 2;
  const auto grid = make_grid({ModelKind::fignar}, {parse_order("(1,[0])"), parse_order("(1,[1])")},
                              {Mode::global}, five_net());
  const SelectionReport rep = grid_search(data, grid, opts);
  EXPECT_EQ(rep.rows[rep.winner(Criterion::bic)].spec.order.label(), "(1,[1])");
  // Same result serially.
  opts.threads = 1;
  const SelectionReport again = grid_search(data, grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(rep.rows[i].bic, again.rows[i].bic);
}

TEST(GridSearch, MspeCriterion) {
  const SeriesPanel data = dgp1_series(120, 3);
  GridOptions opts;
  opts.criterion = Criterion::mspe;
  opts.holdout = 5;
  opts.fit.max_iter = 60;
  const auto grid = make_grid({ModelKind::gnarfi}, {parse_order("(1,[1])")}, {Mode::global}, five_net());
  const SelectionReport rep = grid_search(data, grid, opts);
  ASSERT_TRUE(rep.rows[0].mspe.has_value());
  EXPECT_GT(*rep.rows[0].mspe, 0.0);
  EXPECT_EQ(rep.rows[0].fit.T, 115);
  opts.holdout = 0;
  EXPECT_THROW(grid_search(data, grid, opts), ValidationError);
}

TEST(GridSearch, Failures) {
  const auto grid = make_grid({ModelKind::fignar}, {parse_order("(1,[1])")}, {Mode::global}, five_net());
  EXPECT_THROW(grid_search(SeriesPanel(MatrixXd::Constant(60, 5, 1.0)), grid), AllCandidatesFailed);
  EXPECT_THROW(grid_search(SeriesPanel(MatrixXd::Zero(60, 4)), grid), DimensionMismatch);
  EXPECT_THROW(grid_search(SeriesPanel(MatrixXd::Zero(60, 5)), {}), ValidationError);
  EXPECT_THROW(parse_criterion("hqc"), ValidationError);
}

TEST(Discover, FullyConnectedAndMst) {
  const SeriesPanel data = sparse_gnar(100, 4);
  EXPECT_EQ(discover_graph(data, GraphStrategy::fully_connected).graph.num_edges(), 10u);
  EXPECT_THROW(discover_graph(data, GraphStrategy::mst), MissingCoordinates);
  const std::vector<std::pair<double, double>> xy{{0, 0}, {1, 0}, {2, 0}, {0, 5}, {9, 9}};
  const Graph t = discover_graph(data, GraphStrategy::mst, {}, xy).graph;
  EXPECT_EQ(t.num_edges(), 4u);
  EXPECT_TRUE(t.has_edge(0, 1));
  EXPECT_THROW(parse_graph_strategy("glasso"), ValidationError);
}

TEST(Discover, GnarInfApproxBeatsFullyConnected) {
  DiscoverConfig cfg;
  cfg.num_graphs = 30;
  cfg.p_high = 3;
  cfg.holdout = 100;
  cfg.seed = 5;
  const SeriesPanel data = sparse_gnar(600, 6);
  const DiscoverResult r = discover_graph(data, GraphStrategy::gnar_inf_approx, cfg);
  ASSERT_EQ(r.scores.size(), 30u);
  EXPECT_EQ(r.holdout_mspe, r.scores[r.chosen]);
  EXPECT_LE(r.holdout_mspe, gnar_holdout_mspe(data, fully_connected(5), 3, 100));
  // Deterministic for a seed.
  cfg.threads = 2;
  const DiscoverResult again = discover_graph(data, GraphStrategy::gnar_inf_approx, cfg);
  EXPECT_EQ(again.chosen, r.chosen);
  EXPECT_EQ(again.graph.edges(), r.graph.edges());
}

TEST(Discover, ConfigValidation) {
  const SeriesPanel data = sparse_gnar(100, 7);
  DiscoverConfig cfg;
  cfg.edge_probs = {0.0};
  EXPECT_THROW(discover_graph(data, GraphStrategy::gnar_inf_approx, cfg), ValidationError);
  cfg = {};
  cfg.num_graphs = 0;
  EXPECT_THROW(discover_graph(data, GraphStrategy::gnar_inf_approx, cfg), ValidationError);
  cfg = {};
  cfg.p_high = 0;
  EXPECT_THROW(discover_graph(data, GraphStrategy::fully_connected, cfg), ValidationError);
}
