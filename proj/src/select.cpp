#include "memnet/select.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "memnet/gnar.hpp"
#include "memnet/parallel.hpp"
#include "memnet/rng.hpp"

namespace memnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::bic: return "bic";
    case Criterion::aic: return "aic";
    default: return "mspe";
  }
}

Criterion parse_criterion(const std::string& s) {
  if (s == "bic" || s == "BIC") return Criterion::bic;
  if (s == "aic" || s == "AIC") return Criterion::aic;
  if (s == "mspe" || s == "MSPE") return Criterion::mspe;
  throw ValidationError("unknown criterion '" + s + "' (bic|aic|mspe)");
}

InformationCriteria information_criteria(const FitResult& fit, int T) {
  return information_criteria(fit.loglik, fit.M, T);
}

GnarOrder parse_order(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  const auto bad = [&] { return ValidationError("malformed order '" + text + "', expected e.g. (2,[1,0])"); };
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') throw bad();
  const auto comma = s.find(',');
  const auto open = s.find('['), close = s.find(']');
  if (comma == std::string::npos || open != comma + 1 || close == std::string::npos || close + 2 != s.size())
    throw bad();
  GnarOrder o;
  try {
    std::size_t used = 0;
    o.p = std::stoi(s.substr(1, comma - 1), &used);
    if (used != comma - 1) throw bad();
    o.s.clear();
    std::stringstream ss(s.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      o.s.push_back(std::stoi(item, &used));
      if (used != item.size()) throw bad();
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  o.validate();
  return o;
}

std::vector<GnarOrder> standard_orders() {
  std::vector<GnarOrder> out;
  for (const char* s : {"(1,[0])", "(1,[1])", "(1,[2])", "(2,[0,0])", "(2,[1,0])", "(2,[1,1])"})
    out.push_back(parse_order(s));
  return out;
}

std::vector<Candidate> make_grid(const std::vector<ModelKind>& kinds, const std::vector<GnarOrder>& orders,
                                 const std::vector<Mode>& alpha_modes, const Graph& graph,
                                 Estimation estimation) {
  std::vector<Candidate> out;
  for (ModelKind k : kinds)
    for (Mode a : alpha_modes)
      for (const GnarOrder& o : orders) {
        Candidate c;
        c.spec.kind = k;
        c.spec.estimation = k == ModelKind::gnarfi ? estimation : Estimation::exact;
        c.spec.order = o;
        c.spec.alpha_mode = a;
        c.graph = graph;
        out.push_back(std::move(c));
      }
  return out;
}

double SelectionReport::value(int row, Criterion c) const {
  const CandidateResult& r = rows.at(row);
  if (r.failed) return kInf;
  switch (c) {
    case Criterion::bic: return r.bic;
    case Criterion::aic: return r.aic;
    default: return r.mspe ? *r.mspe : kInf;
  }
}

std::vector<int> SelectionReport::ranking(Criterion c) const {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    if (!rows[i].failed && rows[i].fit.converged && std::isfinite(value(i, c))) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return value(a, c) < value(b, c); });
  return idx;
}

int SelectionReport::winner(Criterion c) const {
  const std::vector<int> r = ranking(c);
  return r.empty() ? -1 : r.front();
}

std::string SelectionReport::csv() const {
  std::ostringstream os;
  os << "name,model,estimation,order,alpha_mode,d_mode,sigma2_mode,M,T,loglik,bic,aic,mspe,converged,"
        "iterations,rank_bic,rank_aic,rank_mspe,error\n";
  std::vector<std::vector<int>> rank(3, std::vector<int>(rows.size(), 0));
  for (Criterion c : {Criterion::bic, Criterion::aic, Criterion::mspe}) {
    const std::vector<int> r = ranking(c);
    for (std::size_t k = 0; k < r.size(); ++k) rank[static_cast<int>(c)][r[k]] = static_cast<int>(k) + 1;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CandidateResult& r = rows[i];
    const ModelSpec& s = r.spec;
    os << csv_field(r.name) << ',' << to_string(s.kind) << ',' << to_string(s.estimation) << ','
       << csv_field(s.order.label()) << ',' << to_string(s.alpha_mode) << ',' << to_string(s.d_mode) << ','
       << to_string(s.sigma_mode) << ',' << r.M << ',';
    if (r.failed) {
      os << ",,,,,false,,,,," << csv_field(r.error) << '\n';
      continue;
    }
    os << r.fit.T << ',' << num(r.fit.loglik) << ',' << num(r.bic) << ',' << num(r.aic) << ','
       << (r.mspe ? num(*r.mspe) : "") << ',' << (r.fit.converged ? "true" : "false") << ','
       << r.fit.iterations;
    for (int c = 0; c < 3; ++c) os << ',' << (rank[c][i] ? std::to_string(rank[c][i]) : "");
    os << ",\n";
  }
  return os.str();
}

std::string SelectionReport::summary() const {
  std::ostringstream os;
  int conv = 0, failed = 0;
  for (const auto& r : rows) {
    failed += r.failed;
    conv += !r.failed && r.fit.converged;
  }
  os << "criterion=" << to_string(criterion) << "\n";
  os << "candidates=" << rows.size() << "\n";
  os << "converged=" << conv << "\n";
  os << "failed=" << failed << "\n";
  const int w = winner();
  if (w < 0) {
    os << "winner=\n";
    return os.str();
  }
  os << "winner=" << rows[w].name << "\n";
  os << "winner_model=" << to_string(rows[w].spec.kind) << "\n";
  os << "winner_order=" << rows[w].spec.order.label() << "\n";
  os << "winner_value=" << num(value(w, criterion)) << "\n";
  return os.str();
}

SelectionReport grid_search(const SeriesPanel& data, const std::vector<Candidate>& grid, const GridOptions& opts) {
  if (grid.empty()) throw ValidationError("grid_search: empty candidate grid");
  for (const auto& c : grid)
    if (c.graph.num_nodes() != data.N()) throw DimensionMismatch("grid_search: candidate graph size differs from data");
  const int T = data.T();
  const bool by_mspe = opts.criterion == Criterion::mspe;
  if (by_mspe && (opts.holdout < 1 || opts.holdout >= T - 3))
    throw ValidationError("grid_search: mspe needs 1 <= holdout < T - 3");
  const SeriesPanel train = by_mspe ? data.slice(0, T - opts.holdout) : data;

  SelectionReport rep;
  rep.criterion = opts.criterion;
  rep.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), opts.threads, [&](int i) {
    CandidateResult& row = rep.rows[i];
    row.spec = grid[i].spec;
    row.name = grid[i].name.empty() ? grid[i].spec.label() : grid[i].name;
    row.M = param_count(grid[i].spec, data.N());
    try {
      const Model model(grid[i].spec, grid[i].graph);
      row.fit = fit(model, train, std::nullopt, opts.fit);
      row.bic = row.fit.bic;
      row.aic = row.fit.aic;
      if (by_mspe) {
        double s = 0.0;
        for (int t = T - opts.holdout; t < T; ++t) {
          const ForecastResult f = forecast(model, row.fit.theta, data.slice(0, t), 1, opts.method);
          s += (f.pred.row(0) - data.values.row(t)).squaredNorm() / data.N();
        }
        row.mspe = s / opts.holdout;
      }
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  if (rep.winner() < 0) throw AllCandidatesFailed("grid_search: no candidate converged");
  return rep;
}

std::string star_flag(int nonconverged, int total) {
  if (nonconverged <= 0 || total <= 0) return "";
  return nonconverged < 0.05 * total ? "*" : "**";
}

std::vector<int> win_counts(const std::vector<SelectionReport>& reports, Criterion c) {
  std::vector<int> counts;
  for (const auto& r : reports) {
    if (counts.empty()) counts.assign(r.rows.size(), 0);
    if (r.rows.size() != counts.size()) throw DimensionMismatch("win_counts: reports use different grids");
    const int w = r.winner(c);
    if (w >= 0) ++counts[w];
  }
  return counts;
}

std::string to_string(GraphStrategy s) {
  switch (s) {
    case GraphStrategy::fully_connected: return "fully_connected";
    case GraphStrategy::mst: return "mst";
    default: return "gnar_inf_approx";
  }
}

GraphStrategy parse_graph_strategy(const std::string& s) {
  if (s == "fully_connected") return GraphStrategy::fully_connected;
  if (s == "mst") return GraphStrategy::mst;
  if (s == "gnar_inf_approx") return GraphStrategy::gnar_inf_approx;
  throw ValidationError("unknown graph strategy '" + s + "' (fully_connected|mst|gnar_inf_approx)");
}

void DiscoverConfig::validate() const {
  if (num_graphs < 1) throw ValidationError("discover: num_graphs must be positive");
  if (edge_probs.empty()) throw ValidationError("discover: edge probability set is empty");
  for (double p : edge_probs)
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("discover: edge probabilities must lie in (0, 1]");
  if (p_high < 1) throw ValidationError("discover: p_high must be positive");
  if (holdout < 0) throw ValidationError("discover: holdout must be nonnegative");
}

double gnar_holdout_mspe(const SeriesPanel& data, const Graph& graph, int p, int holdout) {
  const int T = data.T();
  if (holdout < 1 || T - holdout <= p + 1) throw InsufficientData("gnar_holdout_mspe: not enough data");
  GnarOrder order;
  order.p = p;
  order.s.assign(p, graph.num_edges() > 0 ? 1 : 0);
  const SeriesPanel train = data.slice(0, T - holdout);
  const WeightMatrices w = compute_weights(build_neighbour_stages(graph, 1), WeightScheme::equal, graph);
  const LsFit ls = gnar_ls_fit(train, w, order, Mode::global);
  const MatrixXd pred = gnar_one_step(build_filter_matrices(ls.params, w, order), data.values, T - holdout);
  return mspe(pred, data.values.bottomRows(holdout));
}

DiscoverResult discover_graph(const SeriesPanel& data, GraphStrategy strategy, const DiscoverConfig& cfg,
                              const std::optional<std::vector<std::pair<double, double>>>& coords) {
  cfg.validate();
  const int n = data.N();
  DiscoverResult out;
  if (strategy == GraphStrategy::fully_connected) {
    out.graph = fully_connected(n);
    return out;
  }
  if (strategy == GraphStrategy::mst) {
    if (!coords) throw MissingCoordinates("discover: the mst strategy needs node coordinates");
    if (static_cast<int>(coords->size()) != n) throw DimensionMismatch("discover: coordinate count differs from data");
    out.graph = mst_from_coords(*coords, cfg.metric);
    return out;
  }

  const int H = cfg.holdout > 0 ? cfg.holdout : std::max(10, data.T() / 5);
  out.scores.assign(cfg.num_graphs, kInf);
  std::vector<Graph> graphs(cfg.num_graphs);
  for (int k = 0; k < cfg.num_graphs; ++k) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(k));
    graphs[k] = random_graph(n, cfg.edge_probs[k % cfg.edge_probs.size()], rng);
  }
  parallel_for(cfg.num_graphs, cfg.threads, [&](int k) {
    try {
      out.scores[k] = gnar_holdout_mspe(data, graphs[k], cfg.p_high, H);
    } catch (const Error&) {
      out.scores[k] = kInf;
    }
  });
  const auto best = std::min_element(out.scores.begin(), out.scores.end());
  if (!std::isfinite(*best)) throw AllCandidatesFailed("discover: no random graph could be scored");
  out.chosen = static_cast<int>(best - out.scores.begin());
  out.graph = graphs[out.chosen];
  out.holdout_mspe = *best;
  return out;
}

}  // namespace memnet
