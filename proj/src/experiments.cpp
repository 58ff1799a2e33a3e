#include "memnet/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "memnet/forecast.hpp"
#include "memnet/io.hpp"
#include "memnet/parallel.hpp"
#include "memnet/select.hpp"

#ifndef MEMNET_DEFAULT_REFERENCE_DIR
#define MEMNET_DEFAULT_REFERENCE_DIR "fixtures/reference"
#endif

namespace memnet {

std::string to_string(Scale s) { return s == Scale::desk ? "desk" : "full"; }

Scale parse_scale(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "full") return Scale::full;
  throw ValidationError("unknown scale '" + s + "' (desk|full)");
}

const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids{"T1", "T2", "T3", "T4", "T5", "T6", "T7", "C1", "C2"};
  return ids;
}

int ReproduceOptions::replicates_for(const std::string& table) const {
  if (replicates > 0) return replicates;
  if (scale == Scale::desk) return 20;
  return table == "T3" ? 50 : 100;
}

std::uint64_t replicate_seed(std::uint64_t seed, const std::string& tag, int k) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  return Rng::splitmix64(seed ^ Rng::splitmix64(h + static_cast<std::uint64_t>(k)));
}

namespace {

void require_table(const std::string& table) {
  for (const auto& id : table_ids())
    if (id == table) return;
  throw UnknownTable("unknown table '" + table + "' (T1..T7, C1, C2)");
}

std::string reference_dir(const std::string& dir) {
  if (!dir.empty()) return dir;
  if (const char* env = std::getenv("MEMNET_REFERENCE_DIR"); env && *env) return env;
  return MEMNET_DEFAULT_REFERENCE_DIR;
}

std::string t_label(int T) { return "T=" + std::to_string(T); }

std::vector<int> lengths_or(const ReproduceOptions& o, std::vector<int> dflt) {
  return o.lengths.empty() ? dflt : o.lengths;
}

int first_length(const ReproduceOptions& o) { return o.lengths.empty() ? 200 : o.lengths.front(); }

// One value feeding one cell.
struct Contribution {
  std::string row, column;
  double value = 0.0;
  bool ok = true;
};

struct TaskOutput {
  std::vector<Contribution> cells;
  std::vector<PlotPoint> plot;
};

using Task = std::function<TaskOutput()>;

enum class Reduce { mean, sum };

struct Builder {
  std::string id;
  ReproduceOptions opts;
  std::vector<Task> tasks;

  std::vector<TaskOutput> run() const {
    std::vector<TaskOutput> out(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), opts.threads, [&](int i) { out[i] = tasks[i](); });
    return out;
  }
};

// Datasets shared between tasks, simulated once.
class DataCache {
 public:
  using Maker = std::function<SeriesPanel(int)>;

  void add(const std::string& key, int K, Maker make) {
    for (const auto& p : pending_)
      if (p.key == key) return;
    pending_.push_back({key, K, std::move(make)});
  }

  void build(int threads) {
    std::vector<std::pair<std::string, int>> jobs;
    for (const auto& p : pending_) {
      if (data_.count(p.key)) continue;
      data_[p.key].resize(p.K);
      for (int k = 0; k < p.K; ++k) jobs.emplace_back(p.key, k);
    }
    std::map<std::string, const Maker*> makers;
    for (const auto& p : pending_) makers[p.key] = &p.make;
    parallel_for(static_cast<int>(jobs.size()), threads, [&](int j) {
      const auto& [key, k] = jobs[j];
      data_.at(key)[k] = (*makers.at(key))(k);
    });
  }

  const SeriesPanel& get(const std::string& key, int k) const { return data_.at(key).at(k); }

 private:
  struct Pending {
    std::string key;
    int K;
    Maker make;
  };
  std::vector<Pending> pending_;
  std::map<std::string, std::vector<SeriesPanel>> data_;
};

DataCache::Maker preset_maker(const ReproduceOptions& o, const std::string& dgp, const std::string& graph,
                              ModelKind kind, int T, const std::string& tag) {
  return [=](int k) {
    const Preset pr = dgp_preset(dgp, graph);
    ModelSpec s = pr.spec;
    s.kind = kind;
    SimConfig c;
    c.method = o.sim;
    c.seed = replicate_seed(o.seed, tag, k);
    return simulate_model(Model(s, pr.graph), pr.params, T, c);
  };
}

std::string data_key(const std::string& dgp, const std::string& graph, ModelKind kind, int T) {
  return dgp + "/" + graph + "/" + to_string(kind) + "/" + std::to_string(T);
}

// AMSE x 1e3 of one fit against the preset truth.
TaskOutput amse_task(const std::string& row, const std::string& column, int k, const Preset& pr,
                     const ModelSpec& spec, const SeriesPanel& data, const FitOptions& fopts) {
  TaskOutput out;
  try {
    const Model model(spec, pr.graph);
    const FitResult res = fit(model, data, std::nullopt, fopts);
    const ParamCodec codec(spec, pr.graph.num_nodes());
    const VectorXd truth = codec.natural(pr.params), est = codec.natural(res.theta);
    const double mse = (truth - est).squaredNorm() / static_cast<double>(truth.size());
    out.cells.push_back({row, column, 1e3 * mse, res.converged});
    const auto names = codec.names();
    for (std::size_t m = 0; m < names.size(); ++m)
      out.plot.push_back({row, column, k, names[m], est[static_cast<Eigen::Index>(m)]});
  } catch (const Error&) {
    out.cells.push_back({row, column, std::nan(""), false});
  }
  return out;
}

struct AmseColumn {
  std::string label;
  std::string dgp;
  std::function<void(ModelSpec&)> adjust;
};

struct AmseRow {
  std::string prefix;  // row label prefix, "" for none
  ModelKind kind;
  Estimation estimation;
};

void amse_table(Builder& b, DataCache& cache, const std::string& graph, const std::vector<AmseRow>& rows,
                const std::vector<AmseColumn>& cols, int K) {
  const std::vector<int> Ts = lengths_or(b.opts, {200, 500, 1000});
  for (const auto& r : rows)
    for (int T : Ts)
      for (const auto& c : cols) {
        const std::string key = data_key(c.dgp, graph, r.kind, T);
        cache.add(key, K, preset_maker(b.opts, c.dgp, graph, r.kind, T, key));
      }
  cache.build(b.opts.threads);
  for (const auto& r : rows)
    for (int T : Ts)
      for (const auto& c : cols)
        for (int k = 0; k < K; ++k) {
          const std::string row = r.prefix.empty() ? t_label(T) : r.prefix + " " + t_label(T);
          const std::string key = data_key(c.dgp, graph, r.kind, T);
          b.tasks.push_back([&, row, key, k, r, c, graph] {
            const Preset pr = dgp_preset(c.dgp, graph);
            ModelSpec s = pr.spec;
            s.kind = r.kind;
            s.estimation = r.estimation;
            if (c.adjust) c.adjust(s);
            return amse_task(row, c.label, k, pr, s, cache.get(key, k), b.opts.fit);
          });
        }
}

std::vector<AmseColumn> five_node_columns() {
  return {{"DGP1", "DGP1", nullptr},
          {"DGP2 gl.d", "DGP2", [](ModelSpec& s) { s.d_mode = Mode::global; }},
          {"DGP2 ind.d", "DGP2", [](ModelSpec& s) { s.d_mode = Mode::individual; }},
          {"DGP3 gl.sigma2", "DGP3", [](ModelSpec& s) { s.sigma_mode = Mode::global; }},
          {"DGP3 ind.sigma2", "DGP3", [](ModelSpec& s) { s.sigma_mode = Mode::individual; }}};
}

struct Family {
  std::string label;
  ModelKind kind;
  Estimation estimation;
};

const std::vector<Family>& network_families() {
  static const std::vector<Family> f{{"FIGNAR", ModelKind::fignar, Estimation::exact},
                                     {"GNARFI-Stand", ModelKind::gnarfi, Estimation::exact},
                                     {"GNARFI-Cond", ModelKind::gnarfi, Estimation::conditional}};
  return f;
}

ModelSpec dgp1_spec(const Family& f) {
  ModelSpec s = dgp_preset("DGP1", "fivenet").spec;
  s.kind = f.kind;
  s.estimation = f.estimation;
  return s;
}

// Fits on `train` and scores forecasts of `actual` (h x N) for each method.
// emit(method index, horizon, se) names the cell.
TaskOutput forecast_task(const Model& model, const SeriesPanel& train, const MatrixXd& actual,
                         const std::vector<ForecastMethod>& methods, const FitOptions& fopts,
                         const std::function<Contribution(int, int)>& cell, int k) {
  TaskOutput out;
  const int h = static_cast<int>(actual.rows());
  try {
    const FitResult res = fit(model, train, std::nullopt, fopts);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const ForecastResult f = forecast(model, res.theta, train, h, methods[m]);
      for (int s = 0; s < h; ++s) {
        Contribution c = cell(static_cast<int>(m), s + 1);
        c.value = (f.pred.row(s) - actual.row(s)).squaredNorm() / static_cast<double>(actual.cols());
        c.ok = res.converged;
        out.plot.push_back({c.row, c.column, k, "mspe", c.value});
        out.cells.push_back(std::move(c));
      }
    }
  } catch (const Error&) {
    for (std::size_t m = 0; m < methods.size(); ++m)
      for (int s = 0; s < h; ++s) {
        Contribution c = cell(static_cast<int>(m), s + 1);
        c.value = std::nan("");
        c.ok = false;
        out.cells.push_back(std::move(c));
      }
  }
  return out;
}

// T4-T6 share datasets: DGP1 of each kind, T + 10 rows.
std::string forecast_data(Builder& b, DataCache& cache, ModelKind kind, int T, int K) {
  const std::string key = data_key("DGP1", "fivenet", kind, T + 10);
  cache.add(key, K, preset_maker(b.opts, "DGP1", "fivenet", kind, T + 10, "forecast/" + key));
  return key;
}

void table4(Builder& b, DataCache& cache, int K) {
  const std::vector<int> Ts = lengths_or(b.opts, {200, 500, 1000});
  const std::vector<ForecastMethod> methods{ForecastMethod::dlf, ForecastMethod::ef, ForecastMethod::rf};
  std::map<std::pair<int, ModelKind>, std::string> keys;
  for (int T : Ts)
    for (ModelKind kind : {ModelKind::fignar, ModelKind::gnarfi}) keys[{T, kind}] = forecast_data(b, cache, kind, T, K);
  cache.build(b.opts.threads);
  for (int T : Ts)
    for (const Family& f : network_families())
      for (int k = 0; k < K; ++k) {
        const std::string key = keys.at({T, f.kind});
        const std::string row = t_label(T) + " " + f.label;
        b.tasks.push_back([&, key, row, f, k, T, methods] {
          const SeriesPanel& data = cache.get(key, k);
          const Preset pr = dgp_preset("DGP1", "fivenet");
          return forecast_task(Model(dgp1_spec(f), pr.graph), data.slice(0, T), data.values.middleRows(T, 1), methods,
                               b.opts.fit,
                               [&](int m, int) { return Contribution{row, to_string(methods[m]), 0.0, true}; }, k);
        });
      }
}

// T5 (rolling) and T6 (multi-step), both EF from a length-T window.
void table56(Builder& b, DataCache& cache, int K, bool rolling) {
  const int T = first_length(b.opts), H = 10;
  for (ModelKind kind : {ModelKind::fignar, ModelKind::gnarfi}) forecast_data(b, cache, kind, T, K);
  cache.build(b.opts.threads);
  const std::vector<ForecastMethod> ef{ForecastMethod::ef};
  for (const Family& f : network_families())
    for (int k = 0; k < K; ++k) {
      const std::string key = data_key("DGP1", "fivenet", f.kind, T + H);  // see forecast_data
      const Preset pr = dgp_preset("DGP1", "fivenet");
      const Model model(dgp1_spec(f), pr.graph);
      if (rolling) {
        for (int j = 0; j < H; ++j)
          b.tasks.push_back([&, key, f, k, j, T, model, ef] {
            const SeriesPanel& data = cache.get(key, k);
            const std::string col = std::to_string(T + j + 1);
            return forecast_task(model, data.slice(j, T), data.values.middleRows(T + j, 1), ef, b.opts.fit,
                                 [&](int, int) { return Contribution{f.label, col, 0.0, true}; }, k);
          });
      } else {
        b.tasks.push_back([&, key, f, k, T, H, model, ef] {
          const SeriesPanel& data = cache.get(key, k);
          return forecast_task(model, data.slice(0, T), data.values.middleRows(T, H), ef, b.opts.fit,
                               [&](int, int s) { return Contribution{f.label, std::to_string(T + s), 0.0, true}; },
                               k);
        });
      }
    }
}

struct VarReplicate {
  SeriesPanel data;
  Graph discovered;
};

void table7(Builder& b, std::vector<VarReplicate>& reps, int K) {
  const int T = first_length(b.opts);
  reps.resize(K);
  parallel_for(K, b.opts.threads, [&](int k) {
    Rng rng(replicate_seed(b.opts.seed, "T7/generator", k));
    const VarDgp g = random_var_dgp(5, rng);
    SimConfig c;
    c.seed = replicate_seed(b.opts.seed, "T7/data", k);
    reps[k].data = simulate_fivar(g.A1, g.d, g.noise_cov, T + 1, c);
    DiscoverConfig dc;
    dc.seed = replicate_seed(b.opts.seed, "T7/graphs", k);
    reps[k].discovered = discover_graph(reps[k].data.slice(0, T), GraphStrategy::gnar_inf_approx, dc).graph;
  });
  struct Row {
    std::string label;
    const char* order;
    int graph;  // 0 none, 1 fully connected, 2 discovered
  };
  const std::vector<Row> rows{{"(1,[0]) No graph", "(1,[0])", 0},
                              {"(1,[1]) Fully-connected", "(1,[1])", 1},
                              {"(1,[1]) GNAR-inf approx", "(1,[1])", 2},
                              {"(1,[2]) GNAR-inf approx", "(1,[2])", 2}};
  const std::vector<std::pair<std::string, Family>> fams{
      {"FIGNAR", network_families()[0]}, {"GNARFI Stand", network_families()[1]}, {"GNARFI Cond", network_families()[2]}};
  const std::vector<ForecastMethod> ef{ForecastMethod::ef};
  for (const auto& r : rows)
    for (const auto& [col, f] : fams)
      for (int k = 0; k < K; ++k)
        b.tasks.push_back([&, r, col, f, k, T, ef] {
          ModelSpec s;
          s.kind = f.kind;
          s.estimation = f.estimation;
          s.order = parse_order(r.order);
          s.alpha_mode = s.d_mode = s.sigma_mode = Mode::individual;
          const SeriesPanel& data = reps[k].data;
          const Graph g = r.graph == 0 ? Graph(5) : r.graph == 1 ? fully_connected(5) : reps[k].discovered;
          return forecast_task(Model(s, g), data.slice(0, T), data.values.bottomRows(1), ef, b.opts.fit,
                               [&](int, int) { return Contribution{r.label, col, 0.0, true}; }, k);
        });
}

struct SelectionGroup {
  std::string row;            // "FIGNAR Standard", ...
  std::string data_key;
  std::vector<Candidate> grid;
  std::vector<std::string> columns;  // one per candidate
  std::vector<std::string> all_columns;
};

std::vector<Candidate> family_grid(ModelKind kind, Estimation est, const std::vector<Mode>& alpha_modes,
                                   const Graph& g) {
  return make_grid({kind}, standard_orders(), alpha_modes, g, est);
}

void selection_table(Builder& b, DataCache& cache, int K, bool by_model) {
  const int T = first_length(b.opts);
  const Graph g = builtin_graph("fivenet");
  for (ModelKind kind : {ModelKind::fignar, ModelKind::gnarfi}) {
    const std::string key = data_key("DGP1", "fivenet", kind, T);
    cache.add(key, K, preset_maker(b.opts, "DGP1", "fivenet", kind, T, key));
  }
  cache.build(b.opts.threads);
  std::vector<std::string> all;
  for (const char* prefix : {by_model ? "FIGNAR " : "global ", by_model ? "GNARFI " : "individual "})
    for (const auto& o : standard_orders()) all.push_back(prefix + o.label());
  auto labels = [&](const std::string& prefix) {
    std::vector<std::string> v;
    for (const auto& o : standard_orders()) v.push_back(prefix + o.label());
    return v;
  };
  auto concat = [](std::vector<std::string> a, const std::vector<std::string>& z) {
    a.insert(a.end(), z.begin(), z.end());
    return a;
  };
  auto concat_grid = [](std::vector<Candidate> a, const std::vector<Candidate>& z) {
    a.insert(a.end(), z.begin(), z.end());
    return a;
  };
  const std::string fk = data_key("DGP1", "fivenet", ModelKind::fignar, T);
  const std::string gk = data_key("DGP1", "fivenet", ModelKind::gnarfi, T);
  std::vector<SelectionGroup> groups;
  if (by_model) {
    groups.push_back({"FIGNAR Standard", fk,
                      concat_grid(family_grid(ModelKind::fignar, Estimation::exact, {Mode::global}, g),
                                  family_grid(ModelKind::gnarfi, Estimation::exact, {Mode::global}, g)),
                      all, all});
    groups.push_back({"GNARFI Standard", gk, family_grid(ModelKind::gnarfi, Estimation::exact, {Mode::global}, g),
                      labels("GNARFI "), all});
    groups.push_back({"GNARFI Conditional", gk,
                      family_grid(ModelKind::gnarfi, Estimation::conditional, {Mode::global}, g), labels("GNARFI "),
                      all});
  } else {
    const std::vector<Mode> both{Mode::global, Mode::individual};
    const auto cols = concat(labels("global "), labels("individual "));
    groups.push_back({"FIGNAR Standard", fk, family_grid(ModelKind::fignar, Estimation::exact, both, g), cols, all});
    groups.push_back({"GNARFI Standard", gk, family_grid(ModelKind::gnarfi, Estimation::exact, both, g), cols, all});
    groups.push_back(
        {"GNARFI Conditional", gk, family_grid(ModelKind::gnarfi, Estimation::conditional, both, g), cols, all});
  }
  for (const auto& grp : groups)
    for (int k = 0; k < K; ++k)
      b.tasks.push_back([&, grp, k] {
        TaskOutput out;
        GridOptions go;
        go.fit = b.opts.fit;
        SelectionReport rep;
        bool ok = true;
        try {
          rep = grid_search(cache.get(grp.data_key, k), grp.grid, go);
        } catch (const Error&) {
          ok = false;
        }
        for (Criterion c : {Criterion::bic, Criterion::aic}) {
          const std::string row = grp.row + (c == Criterion::bic ? " BIC" : " AIC");
          const int w = ok ? rep.winner(c) : -1;
          for (const auto& col : grp.all_columns) {
            double v = 0.0;
            if (w >= 0 && grp.columns[w] == col) v = 1.0;
            out.cells.push_back({row, col, w >= 0 ? v : std::nan(""), w >= 0});
          }
          if (w >= 0) out.plot.push_back({row, grp.columns[w], k, "winner", 1.0});
        }
        return out;
      });
}

std::string describe(const std::string& id) {
  static const std::map<std::string, std::string> d{
      {"T1", "AMSE x 1e3 of FIGNAR estimates on fiveNet"},
      {"T2", "AMSE x 1e3 of GNARFI estimates on fiveNet, standard and conditional likelihood"},
      {"T3", "AMSE x 1e3 of FIGNAR and GNARFI estimates on tenNet"},
      {"T4", "one-step MSPE of DLF, EF and RF forecasts, DGP1"},
      {"T5", "rolling-window one-step MSPE (EF), DGP1"},
      {"T6", "h-step MSPE (EF) from a fixed origin, DGP1"},
      {"T7", "one-step MSPE (EF) on long-memory VAR data with discovered graphs"},
      {"C1", "BIC/AIC winners across FIGNAR and GNARFI candidates, DGP1"},
      {"C2", "BIC/AIC winners across orders and alpha modes, DGP1"}};
  return d.at(id);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::vector<ReferenceCell> load_reference(const std::string& table, const std::string& dir) {
  require_table(table);
  const std::string path = reference_dir(dir) + "/" + table + ".csv";
  std::ifstream in(path);
  if (!in) throw ValidationError("reference data not found: " + path);
  std::vector<ReferenceCell> out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (!header) {
      if (f != std::vector<std::string>{"table", "row", "column", "value", "flag"})
        throw MalformedCsv(path + ": bad header");
      header = true;
      continue;
    }
    if (f.size() != 5 || f[0] != table) throw MalformedCsv(path + ": bad record '" + line + "'");
    ReferenceCell c{f[1], f[2], 0.0, f[4]};
    try {
      c.value = std::stod(f[3]);
    } catch (const std::exception&) {
      throw MalformedCsv(path + ": bad value '" + f[3] + "'");
    }
    out.push_back(std::move(c));
  }
  return out;
}

const TableCell* ReproducedTable::find(const std::string& row, const std::string& column) const {
  for (const auto& c : cells)
    if (c.row == row && c.column == column) return &c;
  return nullptr;
}

std::string ReproducedTable::csv() const {
  std::ostringstream o;
  o << "table,row,column,computed,reference,computed_flag,reference_flag,replicates,failed\n";
  for (const auto& c : cells)
    o << id << "," << quote(c.row) << "," << quote(c.column) << "," << (c.computed ? fmt(*c.computed) : "") << ","
      << (c.reference ? fmt(*c.reference) : "") << "," << c.computed_flag << "," << c.reference_flag << ","
      << c.replicates << "," << c.failed << "\n";
  return o.str();
}

std::string ReproducedTable::plot_csv() const {
  std::ostringstream o;
  o << "table,row,column,replicate,series,value\n";
  for (const auto& p : plot)
    o << id << "," << quote(p.row) << "," << quote(p.column) << "," << p.replicate + 1 << "," << quote(p.series) << ","
      << format_double(p.value) << "\n";
  return o.str();
}

VarDgp random_var_dgp(int n, Rng& rng) {
  if (n < 1) throw ValidationError("random_var_dgp: n must be positive");
  VarDgp g;
  g.A1.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.A1(i, j) = i == j ? 0.1 + 0.3 * rng.uniform() : 0.3 * rng.uniform();
  const double rho = spectral_radius(g.A1);
  if (rho > 0.8) g.A1 *= 0.8 / rho;
  g.d.resize(n);
  for (int i = 0; i < n; ++i) g.d[i] = n == 1 ? 0.25 : 0.05 + 0.4 * i / (n - 1);
  MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = rng.normal();
  g.noise_cov = B * B.transpose() / n + 0.5 * MatrixXd::Identity(n, n);
  return g;
}

ReproducedTable reproduce(const std::string& table, const ReproduceOptions& opts) {
  require_table(table);
  const std::vector<ReferenceCell> ref = load_reference(table, opts.reference_dir);
  for (int T : opts.lengths)
    if (T < 20) throw ValidationError("reproduce: lengths must be at least 20");
  const int K = opts.replicates_for(table);

  Builder b{table, opts, {}};
  DataCache cache;
  std::vector<VarReplicate> var_reps;
  Reduce reduce = Reduce::mean;
  if (table == "T1") {
    amse_table(b, cache, "fivenet", {{"", ModelKind::fignar, Estimation::exact}}, five_node_columns(), K);
  } else if (table == "T2") {
    amse_table(b, cache, "fivenet",
               {{"Standard", ModelKind::gnarfi, Estimation::exact},
                {"Conditional", ModelKind::gnarfi, Estimation::conditional}},
               five_node_columns(), K);
  } else if (table == "T3") {
    amse_table(b, cache, "tennet",
               {{"FIGNAR Standard", ModelKind::fignar, Estimation::exact},
                {"GNARFI Standard", ModelKind::gnarfi, Estimation::exact},
                {"GNARFI Conditional", ModelKind::gnarfi, Estimation::conditional}},
               {{"DGP1", "DGP1", nullptr}, {"DGP2", "DGP2", nullptr}, {"DGP3", "DGP3", nullptr}}, K);
  } else if (table == "T4") {
    table4(b, cache, K);
  } else if (table == "T5" || table == "T6") {
    table56(b, cache, K, table == "T5");
  } else if (table == "T7") {
    table7(b, var_reps, K);
  } else {
    selection_table(b, cache, K, table == "C1");
    reduce = Reduce::sum;
  }
  const std::vector<TaskOutput> outputs = b.run();

  struct Acc {
    double sum = 0.0;
    int n = 0, used = 0, failed = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  std::vector<std::pair<std::string, std::string>> order;
  ReproducedTable res;
  res.id = table;
  res.description = describe(table);
  res.scale = opts.scale;
  res.replicates = K;
  for (const auto& o : outputs) {
    for (const auto& c : o.cells) {
      const auto key = std::make_pair(c.row, c.column);
      if (!acc.count(key)) order.push_back(key);
      Acc& a = acc[key];
      ++a.n;
      if (!c.ok) ++a.failed;
      if (std::isfinite(c.value)) {
        a.sum += c.value;
        ++a.used;
      }
    }
    res.plot.insert(res.plot.end(), o.plot.begin(), o.plot.end());
  }
  auto fill = [&](TableCell& cell) {
    const auto it = acc.find({cell.row, cell.column});
    if (it == acc.end()) return;
    const Acc& a = it->second;
    cell.replicates = a.used;
    cell.failed = a.failed;
    if (a.used > 0) cell.computed = reduce == Reduce::sum ? a.sum : a.sum / a.used;
    if (reduce == Reduce::mean) cell.computed_flag = star_flag(a.failed, a.n);
  };
  for (const auto& r : ref) {
    TableCell cell;
    cell.row = r.row;
    cell.column = r.column;
    cell.reference = r.value;
    cell.reference_flag = r.flag;
    fill(cell);
    res.cells.push_back(std::move(cell));
  }
  for (const auto& [row, col] : order) {
    if (res.find(row, col)) continue;
    TableCell cell;
    cell.row = row;
    cell.column = col;
    fill(cell);
    res.cells.push_back(std::move(cell));
  }
  return res;
}

}  // namespace memnet
