#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "memnet/experiments.hpp"
#include "memnet/forecast.hpp"
#include "memnet/io.hpp"
#include "memnet/rng.hpp"
#include "memnet/select.hpp"
#include "memnet/simulate.hpp"

namespace memnet::cli {

namespace {

namespace fs = std::filesystem;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

void write_echo(const std::string& out, const std::string& echo) { write_file(out + ".config", echo); }

bool is_builtin(const std::string& name) {
  const std::string l = lower(name);
  return l == "fivenet" || l == "tennet";
}

std::optional<Graph> load_graph(const std::string& g) {
  if (g.empty()) return std::nullopt;
  if (fs::exists(g)) return read_graph_file(g);
  if (is_builtin(g)) return builtin_graph(g);
  throw ValidationError("graph file '" + g + "' not found");
}

ModelSpec make_spec(const ModelOptions& o) {
  ModelSpec s;
  s.kind = parse_kind(o.model);
  s.estimation = parse_estimation(o.estimation);
  s.order = parse_order(o.order);
  s.alpha_mode = parse_mode(o.alpha);
  s.d_mode = parse_mode(o.d_mode);
  s.sigma_mode = parse_mode(o.sigma_mode);
  s.scheme = parse_weight_scheme(o.weights);
  s.validate();
  return s;
}

// The graph for a model on n nodes (n <= 0: taken from the graph).
Model make_model(const ModelOptions& o, int n) {
  const ModelSpec spec = make_spec(o);
  std::optional<Graph> g = load_graph(o.graph);
  if (!g) {
    if (spec.order.max_stage() > 0)
      throw ValidationError("order " + spec.order.label() +
                            " uses neighbour stages; supply a graph file with --graph");
    if (n <= 0) n = o.nodes;
    if (n <= 0) throw ValidationError("no graph given; set --nodes");
    g = Graph(n);
  }
  if (n > 0 && g->num_nodes() != n)
    throw DimensionMismatch("graph has " + std::to_string(g->num_nodes()) + " nodes but the data has " +
                            std::to_string(n) + " columns");
  return Model(spec, *g);
}

SeriesPanel load_data(const DataOptions& d) {
  if (d.path.empty()) throw ValidationError("no data file given (--data)");
  IngestOptions io;
  io.policy = parse_missing_policy(d.missing);
  io.demean = d.demean;
  io.log = d.log;
  return ingest_series(d.path, io);
}

FitOptions make_fit_options(const FitSettings& f) {
  FitOptions o;
  if (f.max_iter < 1) throw ValidationError("--max-iter must be positive");
  if (!(f.tol > 0.0)) throw ValidationError("--tol must be positive");
  if (!(f.pcg_tol > 0.0)) throw ValidationError("--pcg-tol must be positive");
  o.max_iter = f.max_iter;
  o.tol = f.tol;
  o.lik.pcg.tol = f.pcg_tol;
  o.lik.pcg.max_iter = f.pcg_max_iter;
  if (f.logdet == "exact") {
    o.lik.det = DetMethod::exact;
  } else if (f.logdet == "spline") {
    o.lik.det = DetMethod::spline;
  } else {
    throw ValidationError("unknown --logdet '" + f.logdet + "' (exact|spline)");
  }
  return o;
}

std::optional<ModelParams> load_init(const std::string& path, const Model& m) {
  if (path.empty()) return std::nullopt;
  return read_params_file(path, m.N(), m.spec().order);
}

std::string params_lines(const ModelParams& par, const GnarOrder& order) {
  std::ostringstream os;
  const int n = static_cast<int>(par.d.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < order.p; ++j)
      os << "alpha." << i + 1 << "." << j + 1 << "=" << format_double(par.gnar.alpha(i, j)) << "\n";
  for (int j = 0; j < order.p; ++j)
    for (int r = 0; r < order.s[j]; ++r)
      for (int c = 0; c < order.C; ++c)
        os << "beta." << j + 1 << "." << r + 1 << "." << c + 1 << "=" << format_double(par.gnar.beta[j][r][c])
           << "\n";
  for (int i = 0; i < n; ++i) os << "d." << i + 1 << "=" << format_double(par.d[i]) << "\n";
  for (int i = 0; i < n; ++i) os << "sigma2." << i + 1 << "=" << format_double(par.sigma2[i]) << "\n";
  return os.str();
}

std::string spec_lines(const ModelSpec& s) {
  std::ostringstream os;
  os << "model=" << to_string(s.kind) << "\n"
     << "order=" << s.order.label() << "\n"
     << "alpha_mode=" << to_string(s.alpha_mode) << "\n"
     << "d_mode=" << to_string(s.d_mode) << "\n"
     << "sigma2_mode=" << to_string(s.sigma_mode) << "\n";
  return os.str();
}

struct Resolved {
  Model model;
  ModelParams params;
  std::string graph_name;
  std::string preset;
};

// Preset or params file; shared by simulate and acv.
Resolved resolve_model(const std::string& preset, const ModelOptions& spec, const std::string& params) {
  if (!preset.empty()) {
    if (!params.empty()) throw ValidationError("--preset and --params are mutually exclusive");
    const std::string gname = spec.graph.empty() ? "fivenet" : spec.graph;
    if (!is_builtin(gname))
      throw ValidationError("presets run on a built-in graph (fivenet|tennet), not '" + gname + "'");
    Preset pr = dgp_preset(preset, gname);
    pr.spec.kind = parse_kind(spec.model);
    return {Model(pr.spec, pr.graph), pr.params, lower(gname), pr.name};
  }
  if (params.empty()) throw ValidationError("give either --preset or --params");
  Model m = make_model(spec, 0);
  ModelParams par = read_params_file(params, m.N(), m.spec().order);
  return {std::move(m), std::move(par), spec.graph.empty() ? "none" : spec.graph, ""};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string run_simulate(const SimulateOptions& o, const std::string& echo) {
  if (o.T < 1) throw ValidationError("--T must be positive");
  const Resolved r = resolve_model(o.preset, o.spec, o.params);
  SimConfig c;
  c.method = parse_sim_method(o.method);
  c.seed = o.seed;
  c.burn_in = o.burn_in;
  c.filter_order = o.filter_order;
  const SeriesPanel data = simulate_model(r.model, r.params, o.T, c);

  std::ostringstream csv;
  write_series(csv, data);
  write_file(o.out, csv.str());

  std::ostringstream meta;
  meta << "rows=" << data.T() << "\n"
       << "nodes=" << data.N() << "\n"
       << "preset=" << (r.preset.empty() ? "none" : r.preset) << "\n"
       << "graph=" << r.graph_name << "\n"
       << spec_lines(r.model.spec()) << "method=" << to_string(c.method) << "\n"
       << "seed=" << c.seed << "\n";
  if (c.method == SimMethod::truncated)
    meta << "burn_in=" << c.burn_in << "\n"
         << "filter_order=" << c.filter_order << "\n";
  meta << "rng=" << Rng::algorithm << "\n" << params_lines(r.params, r.model.spec().order);
  write_file(o.out + ".meta", meta.str());
  write_echo(o.out, echo);
  return "wrote " + o.out + " (" + std::to_string(data.T()) + "x" + std::to_string(data.N()) + ")\n";
}

std::string run_fit(const FitOptionsCli& o, const std::string& echo) {
  const SeriesPanel data = load_data(o.data);
  const Model m = make_model(o.spec, data.N());
  const FitResult res = fit(m, data, load_init(o.fit.init, m), make_fit_options(o.fit));
  const std::string report = fit_report(m, res);
  write_file(o.out, report);
  write_echo(o.out, echo);
  std::ostringstream os;
  os << "converged=" << (res.converged ? "true" : "false") << " loglik=" << format_double(res.loglik)
     << " iterations=" << res.iterations << "\nwrote " << o.out << "\n";
  return os.str();
}

std::string run_forecast(const ForecastOptionsCli& o, const std::string& echo) {
  const SeriesPanel data = load_data(o.data);
  const Model m = make_model(o.spec, data.N());
  const ForecastMethod method = parse_forecast_method(o.method);
  const EvalScheme scheme = parse_eval_scheme(o.scheme);
  if (o.horizon < 1) throw ValidationError("--horizon must be positive");
  const FitOptions fopts = make_fit_options(o.fit);
  std::ostringstream csv, summary;
  summary << "method=" << to_string(method) << "\n"
          << "horizon=" << o.horizon << "\n"
          << "scheme=" << to_string(scheme) << "\n";

  if (scheme == EvalScheme::rolling_window) {
    if (!o.holdout) throw ValidationError("rolling_window evaluation needs --holdout");
    if (!o.params.empty()) throw ValidationError("rolling_window refits every window; drop --params");
    EvalConfig cfg;
    cfg.scheme = scheme;
    cfg.horizon = o.horizon;
    cfg.windows = o.windows;
    cfg.methods = {method};
    cfg.fit = fopts;
    cfg.threads = o.threads;
    const EvalResult ev = evaluate(data, {m}, cfg);
    csv << "origin,horizon,node,pred,actual\n";
    for (const auto& r : ev.records)
      for (int i = 0; i < data.N(); ++i)
        csv << r.origin << "," << r.horizon << "," << csv_field(data.labels[i]) << ","
            << format_double(r.pred[i]) << "," << format_double(r.actual[i]) << "\n";
    summary << "windows=" << o.windows << "\n"
            << "mspe=" << format_double(ev.mean_se(0, method)) << "\n";
    for (int h = 1; h <= o.horizon; ++h)
      summary << "mspe.h" << h << "=" << format_double(ev.mean_se(0, method, h)) << "\n";
    int nonconv = 0;
    for (const auto& f : ev.fits) nonconv += !f.converged;
    summary << "nonconverged_fits=" << nonconv << "\n";
  } else {
    const int T = data.T();
    const int train_len = o.holdout ? T - o.horizon : T;
    if (train_len < 3) throw InsufficientData("not enough rows left to fit after holding out the horizon");
    const SeriesPanel train = data.slice(0, train_len);
    ModelParams par;
    if (!o.params.empty()) {
      par = read_params_file(o.params, m.N(), m.spec().order);
      summary << "fitted=false\n";
    } else {
      const FitResult res = fit(m, train, load_init(o.fit.init, m), fopts);
      par = res.theta;
      summary << "fitted=true\n"
              << "converged=" << (res.converged ? "true" : "false") << "\n"
              << "loglik=" << format_double(res.loglik) << "\n";
    }
    ForecastOptions fo;
    const ForecastResult f = forecast(m, par, train, o.horizon, method, fo);
    csv << "horizon,node,pred,actual\n";
    for (int h = 0; h < o.horizon; ++h)
      for (int i = 0; i < data.N(); ++i) {
        csv << h + 1 << "," << csv_field(data.labels[i]) << "," << format_double(f.pred(h, i)) << ",";
        if (o.holdout) csv << format_double(data.values(train_len + h, i));
        csv << "\n";
      }
    summary << "origin=" << train_len << "\n";
    if (o.holdout) {
      const MatrixXd actual = data.values.bottomRows(o.horizon);
      summary << "mspe=" << format_double(mspe(f.pred, actual)) << "\n";
      for (int h = 0; h < o.horizon; ++h)
        summary << "mspe.h" << h + 1 << "=" << format_double(mspe(f.pred.row(h), actual.row(h))) << "\n";
    }
  }
  write_file(o.out, csv.str());
  write_file(o.out + ".summary", summary.str());
  write_echo(o.out, echo);
  return summary.str() + "wrote " + o.out + "\n";
}

std::string run_select(const SelectOptionsCli& o, const std::string& echo) {
  const SeriesPanel data = load_data(o.data);
  std::optional<Graph> g = load_graph(o.graph);
  std::vector<GnarOrder> orders;
  for (const auto& s : o.orders) orders.push_back(parse_order(s));
  if (orders.empty()) orders = standard_orders();
  if (!g) {
    for (const auto& ord : orders)
      if (ord.max_stage() > 0)
        throw ValidationError("order " + ord.label() + " uses neighbour stages; supply a graph file with --graph");
    g = Graph(data.N());
  }
  if (g->num_nodes() != data.N()) throw DimensionMismatch("graph and data node counts differ");
  std::vector<ModelKind> kinds;
  for (const auto& k : o.kinds) kinds.push_back(parse_kind(k));
  std::vector<Mode> modes;
  for (const auto& a : o.alpha_modes) modes.push_back(parse_mode(a));
  std::vector<Candidate> grid = make_grid(kinds, orders, modes, *g, parse_estimation(o.estimation));
  const WeightScheme scheme = parse_weight_scheme(o.weights);
  for (auto& c : grid) c.spec.scheme = scheme;

  GridOptions go;
  go.criterion = parse_criterion(o.criterion);
  go.holdout = o.holdout;
  go.method = parse_forecast_method(o.method);
  go.fit = make_fit_options(o.fit);
  go.threads = o.threads;
  const SelectionReport rep = grid_search(data, grid, go);
  write_file(o.out, rep.csv());
  write_file(o.out + ".summary", rep.summary());
  write_echo(o.out, echo);
  return rep.summary() + "wrote " + o.out + "\n";
}

std::string run_graph(const GraphOptionsCli& o, const std::string& echo) {
  const GraphStrategy strategy = parse_graph_strategy(o.strategy);
  std::optional<SeriesPanel> data;
  if (!o.data.path.empty()) data = load_data(o.data);
  int n = o.nodes;
  if (data) {
    if (n > 0 && n != data->N()) throw DimensionMismatch("--nodes disagrees with the data");
    n = data->N();
  }
  std::ostringstream summary;
  summary << "strategy=" << to_string(strategy) << "\n";
  Graph g;
  if (strategy == GraphStrategy::fully_connected) {
    if (n < 1) throw ValidationError("fully_connected needs --nodes or --data");
    g = fully_connected(n);
  } else if (strategy == GraphStrategy::mst) {
    if (o.coords.empty()) throw MissingCoordinates("mst needs a coordinates file (--coords)");
    if (n < 1) {
      std::ifstream in(o.coords);
      if (!in) throw ValidationError("cannot open '" + o.coords + "'");
      std::string line;
      for (std::getline(in, line); std::getline(in, line);)
        if (line.find_first_not_of(" \t\r") != std::string::npos) ++n;
    }
    g = mst_from_coords(read_coords_file(o.coords, n), parse_metric(o.metric));
  } else {
    if (!data) throw ValidationError("gnar_inf_approx needs --data");
    DiscoverConfig cfg;
    cfg.num_graphs = o.num_graphs;
    cfg.edge_probs = o.edge_probs;
    cfg.p_high = o.p_high;
    cfg.holdout = o.holdout;
    cfg.seed = o.seed;
    cfg.metric = parse_metric(o.metric);
    cfg.threads = o.threads;
    const DiscoverResult r = discover_graph(*data, strategy, cfg);
    g = r.graph;
    summary << "chosen=" << r.chosen + 1 << "\n"
            << "holdout_mspe=" << format_double(r.holdout_mspe) << "\n";
  }
  summary << "nodes=" << g.num_nodes() << "\n"
          << "edges=" << g.num_edges() << "\n";
  std::ostringstream txt;
  write_graph(txt, g);
  write_file(o.out, txt.str());
  write_echo(o.out, echo);
  return summary.str() + "wrote " + o.out + "\n";
}

std::string run_acv(const AcvOptionsCli& o, const std::string& echo) {
  if (o.max_lag < 0) throw ValidationError("--max-lag must be non-negative");
  const Resolved r = resolve_model(o.preset, o.spec, o.params);
  const Autocov acv = r.model.acv(r.params, o.max_lag);
  std::ostringstream csv;
  write_acv(csv, acv);
  write_file(o.out, csv.str());
  write_echo(o.out, echo);
  return "wrote " + o.out + " (lags 0.." + std::to_string(o.max_lag) + ")\n";
}

std::string run_reproduce(const ReproduceOptionsCli& o, const std::string& echo) {
  ReproduceOptions ro;
  ro.scale = parse_scale(o.scale);
  ro.replicates = o.replicates;
  ro.lengths = o.lengths;
  ro.seed = o.seed;
  ro.threads = o.threads;
  ro.sim = parse_sim_method(o.sim_method);
  ro.reference_dir = o.reference_dir;
  if (o.max_iter < 1) throw ValidationError("--max-iter must be positive");
  ro.fit.max_iter = o.max_iter;
  const ReproducedTable t = reproduce(o.table, ro);
  const std::string out = o.out.empty() ? o.table + ".csv" : o.out;
  write_file(out, t.csv());
  write_file(out + ".plot.csv", t.plot_csv());
  write_echo(out, echo);

  std::ostringstream os;
  os << t.id << ": " << t.description << " (" << to_string(t.scale) << ", K=" << t.replicates << ")\n";
  std::size_t wr = 3, wc = 6;
  for (const auto& c : t.cells) {
    wr = std::max(wr, c.row.size());
    wc = std::max(wc, c.column.size());
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %12s  %12s\n", static_cast<int>(wr), "row", static_cast<int>(wc),
                "column", "computed", "reference");
  os << buf;
  for (const auto& c : t.cells) {
    const std::string comp = c.computed ? std::to_string(*c.computed).substr(0, 10) + c.computed_flag : "-";
    const std::string ref = c.reference ? std::to_string(*c.reference).substr(0, 10) + c.reference_flag : "-";
    std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %12s  %12s\n", static_cast<int>(wr), c.row.c_str(),
                  static_cast<int>(wc), c.column.c_str(), comp.c_str(), ref.c_str());
    os << buf;
  }
  os << "wrote " << out << "\n";
  return os.str();
}

}  // namespace memnet::cli
