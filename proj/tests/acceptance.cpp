// Acceptance criteria 1-9; one PASS/FAIL line each.
// Usage: acceptance [--threads N] [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "memnet/experiments.hpp"
#include "memnet/forecast.hpp"
#include "memnet/fracdiff.hpp"
#include "memnet/levinson.hpp"
#include "memnet/parallel.hpp"
#include "memnet/select.hpp"
#include "memnet/simulate.hpp"
#include "oracles.hpp"

using namespace memnet;

namespace {

int g_threads = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Graph chain(int n) {
  Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

ModelSpec spec_for(ModelKind kind, int n, Mode d_mode = Mode::individual) {
  ModelSpec s;
  s.kind = kind;
  s.order = parse_order(n > 1 ? "(1,[1])" : "(1,[0])");
  s.d_mode = d_mode;
  return s;
}

// Stationary draw: |alpha| + |beta| <= 0.85.
ModelParams random_params(const ModelSpec& s, int n, Rng& rng) {
  ModelParams p;
  p.gnar = GnarParams::zeros(n, s.order, s.alpha_mode);
  double a = 0.8 * rng.uniform() - 0.4;
  double b = s.order.s[0] > 0 ? 0.8 * rng.uniform() - 0.4 : 0.0;
  const double tot = std::abs(a) + std::abs(b);
  if (tot > 0.85) {
    a *= 0.85 / tot;
    b *= 0.85 / tot;
  }
  p.gnar.alpha.setConstant(a);
  if (s.order.s[0] > 0) p.gnar.beta[0][0][0] = b;
  p.d.resize(n);
  p.sigma2.resize(n);
  const double dg = 0.02 + 0.46 * rng.uniform();
  for (int i = 0; i < n; ++i) {
    p.d[i] = s.d_mode == Mode::global ? dg : 0.02 + 0.46 * rng.uniform();
    p.sigma2[i] = 0.5 + 1.5 * rng.uniform();
  }
  return p;
}

// 1. Exact likelihood against a dense Cholesky oracle.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    const int n = 1 + k % 3;
    const int T = 16 + static_cast<int>(rng.uniform() * 49);
    const ModelSpec s = spec_for(k % 2 ? ModelKind::gnarfi : ModelKind::fignar, n);
    const Model m(s, chain(n));
    const ModelParams p = random_params(s, n, rng);
    SimConfig c;
    c.method = SimMethod::exact;
    c.seed = 100 + k;
    const SeriesPanel data = simulate_model(m, p, T, c);
    const double got = -negloglik_exact(m, p, data);
    const double want = oracle::dense_loglik(oracle::dense_sigma(m.acv(p, T - 1), T), data.stacked());
    worst = std::max(worst, std::abs(got - want));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 60, "max |loglik - dense| = " + fmt("%.2e", worst) + " over 25 draws"};
}

// 2. Spline log-determinant against the exact Durbin-Levinson value.
Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2);
  double worst = 0.0;
  int checks = 0;
  for (int T : {256, 512, 1024})
    for (int rep = 0; rep < 3; ++rep)
      for (bool fiwn : {true, false}) {
        const int n = 2 + rep % 2;
        Autocov acv;
        if (fiwn) {
          VectorXd d(n), s2(n);
          for (int i = 0; i < n; ++i) {
            d[i] = 0.05 + 0.4 * rng.uniform();
            s2[i] = 0.5 + rng.uniform();
          }
          acv = fiwn_acv(d, s2, T - 1);
        } else {
          const ModelSpec s = spec_for(ModelKind::fignar, n);
          const Model m(s, chain(n));
          acv = m.acv(random_params(s, n, rng), T - 1);
        }
        const double exact = logdet_exact(acv, T);
        const SplineLogdet sp = logdet_spline(acv, T, 1e-6);
        worst = std::max(worst, std::abs(sp.value - exact) / std::abs(exact));
        ++checks;
      }
  const double secs = seconds_since(t0);
  return {worst < 1e-3 && secs < 120,
          "max relative error " + fmt("%.2e", worst) + " over " + std::to_string(checks) + " covariances"};
}

// 3. DGP1 model autocovariance against one long truncated-filter run. The
// standard error of each sample autocovariance is its exact Gaussian value
// under the model, sum over |u| < n-h of (n-h-|u|) (g_ii g_kk + g_ik g_ki) / n^2.
Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 2000000, H = 10, N = 5;
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const Model m(pr.spec, pr.graph);
  SimConfig c;
  c.method = SimMethod::truncated;
  c.burn_in = n;
  c.filter_order = 0;
  c.seed = 1;
  const SeriesPanel x = simulate_model(m, pr.params, n, c);

  const Autocov a = m.acv(pr.params, n + H);
  auto g = [&](int u, int i, int k) { return u >= 0 ? a[u](i, k) : a[-u](k, i); };
  std::vector<double> z((H + 1) * N * N);
  parallel_for(static_cast<int>(z.size()), g_threads, [&](int idx) {
    const int h = idx / (N * N), i = idx / N % N, k = idx % N;
    const int L = n - h;
    double v = 0.0;
    for (int u = -(L - 1); u <= L - 1; ++u)
      v += static_cast<double>(L - std::abs(u)) * (g(u, i, i) * g(u, k, k) + g(u + h, i, k) * g(u - h, k, i));
    const double se = std::sqrt(v) / n;
    const double emp = x.values.col(i).tail(L).dot(x.values.col(k).head(L)) / n;
    z[idx] = (emp - a[h](i, k)) / se;
  });
  int worst = 0;
  for (std::size_t i = 1; i < z.size(); ++i)
    if (std::abs(z[i]) > std::abs(z[worst])) worst = static_cast<int>(i);
  const double secs = seconds_since(t0);
  const int h = worst / (N * N), i = worst / N % N, k = worst % N;
  std::ostringstream os;
  os << "max |z| = " << fmt("%.2f", std::abs(z[worst])) << " at lag " << h << " entry (" << i + 1 << "," << k + 1
     << ") over " << z.size() << " entries, T = 2e6";
  return {std::abs(z[worst]) <= 3.0 && secs < 300, os.str()};
}

// 4. Global memory: FIGNAR and GNARFI coincide.
Outcome criterion4() {
  Rng rng(4);
  const Graph g = builtin_graph("fivenet");
  double acv_diff = 0.0, ll_diff = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ModelSpec sf = spec_for(ModelKind::fignar, 5, Mode::global);
    const ModelSpec sg = spec_for(ModelKind::gnarfi, 5, Mode::global);
    const Model mf(sf, g), mg(sg, g);
    const ModelParams p = random_params(sf, 5, rng);
    const Autocov af = mf.acv(p, 50), ag = mg.acv(p, 50);
    for (int h = 0; h <= 50; ++h) acv_diff = std::max(acv_diff, (af[h] - ag[h]).cwiseAbs().maxCoeff());
    SimConfig c;
    c.method = SimMethod::exact;
    c.seed = 400 + k;
    const SeriesPanel data = simulate_model(mf, p, 200, c);
    ll_diff = std::max(ll_diff, std::abs(negloglik_exact(mf, p, data) - negloglik_exact(mg, p, data)));
  }
  return {acv_diff < 1e-6 && ll_diff < 1e-3,
          "max |Omega_F - Omega_G| = " + fmt("%.2e", acv_diff) + ", max |L_F - L_G| = " + fmt("%.2e", ll_diff)};
}

// Datasets shared with `reproduce`: same tags, same seeds.
SeriesPanel dgp1_data(const std::string& tag, int T, int k) {
  const Preset pr = dgp_preset("DGP1", "fivenet");
  SimConfig c;
  c.method = SimMethod::exact;
  c.seed = replicate_seed(1, tag, k);
  return simulate_model(Model(pr.spec, pr.graph), pr.params, T, c);
}

std::string dgp1_tag(int T) { return "DGP1/fivenet/FIGNAR/" + std::to_string(T); }

// 5. AMSE x 1e3 of DGP1 FIGNAR fits, K = 20.
Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const Model m(pr.spec, pr.graph);
  const ParamCodec codec(pr.spec, 5);
  const VectorXd truth = codec.natural(pr.params);
  const int K = 20;
  std::string detail;
  bool ok = true;
  for (auto [T, lo, hi] : {std::tuple{200, 3.0, 17.0}, std::tuple{1000, 1.0, 5.0}}) {
    std::vector<double> mse(K, std::nan(""));
    std::vector<int> conv(K, 0);
    parallel_for(K, g_threads, [&, T = T](int k) {
      const FitResult r = fit(m, dgp1_data(dgp1_tag(T), T, k));
      conv[k] = r.converged;
      mse[k] = (codec.natural(r.theta) - truth).squaredNorm() / static_cast<double>(truth.size());
    });
    double sum = 0.0;
    int used = 0, failed = 0;
    for (int k = 0; k < K; ++k) {
      if (!conv[k] || !std::isfinite(mse[k])) {
        ++failed;
        continue;
      }
      sum += mse[k];
      ++used;
    }
    const double amse = used ? 1e3 * sum / used : std::nan("");
    ok = ok && used > 0 && amse >= lo && amse <= hi;
    detail += "T=" + std::to_string(T) + ": " + fmt("%.3f", amse) + " in [" + fmt("%g", lo) + "," + fmt("%g", hi) +
              "]" + (failed ? " (" + std::to_string(failed) + " not converged)" : "") + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 1800;
  return {ok, detail + fmt("%.0f s", secs)};
}

// 6. One-step MSPE of DGP1 FIGNAR, K = 20, T = 200.
Outcome criterion6() {
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const Model m(pr.spec, pr.graph);
  const int K = 20, T = 200;
  const std::vector<ForecastMethod> methods{ForecastMethod::dlf, ForecastMethod::ef, ForecastMethod::rf};
  std::vector<std::vector<double>> se(K, std::vector<double>(3, std::nan("")));
  std::vector<int> conv(K, 0);
  parallel_for(K, g_threads, [&](int k) {
    const SeriesPanel data = dgp1_data("forecast/" + dgp1_tag(T + 10), T + 10, k);
    const SeriesPanel train = data.slice(0, T);
    const FitResult r = fit(m, train);
    conv[k] = r.converged;
    for (int j = 0; j < 3; ++j) {
      const ForecastResult f = forecast(m, r.theta, train, 1, methods[j]);
      se[k][j] = (f.pred.row(0) - data.values.row(T)).squaredNorm() / 5.0;
    }
  });
  double v[3] = {0, 0, 0};
  int used = 0;
  for (int k = 0; k < K; ++k) {
    if (!conv[k]) continue;
    for (int j = 0; j < 3; ++j) v[j] += se[k][j];
    ++used;
  }
  bool ok = used > 0;
  for (double& x : v) {
    x /= used;
    ok = ok && x >= 0.75 && x <= 1.15;
  }
  const double spread = std::max({std::abs(v[0] - v[1]), std::abs(v[0] - v[2]), std::abs(v[1] - v[2])});
  ok = ok && spread < 0.02;
  return {ok, "DLF " + fmt("%.3f", v[0]) + ", EF " + fmt("%.3f", v[1]) + ", RF " + fmt("%.3f", v[2]) +
                  ", max pairwise gap " + fmt("%.4f", spread) + " (" + std::to_string(K - used) + " not converged)"};
}

// 7. BIC and AIC order selection hit rates, K = 20, T = 200.
Outcome criterion7() {
  const Graph g = builtin_graph("fivenet");
  const int K = 20, T = 200;
  const std::vector<Candidate> grid = make_grid({ModelKind::fignar}, standard_orders(), {Mode::global}, g);
  const std::string target = parse_order("(1,[1])").label();
  std::vector<int> bic_hit(K, 0), aic_hit(K, 0);
  parallel_for(K, g_threads, [&](int k) {
    const SelectionReport rep = grid_search(dgp1_data(dgp1_tag(T), T, k), grid, GridOptions{});
    const int wb = rep.winner(Criterion::bic), wa = rep.winner(Criterion::aic);
    bic_hit[k] = wb >= 0 && rep.rows[wb].spec.order.label() == target;
    aic_hit[k] = wa >= 0 && rep.rows[wa].spec.order.label() == target;
  });
  int nb = 0, na = 0;
  for (int k = 0; k < K; ++k) {
    nb += bic_hit[k];
    na += aic_hit[k];
  }
  return {2 * nb >= K && nb >= na,
          "BIC picks (1,[1]) in " + std::to_string(nb) + "/20, AIC in " + std::to_string(na) + "/20"};
}

// 8. Dense long-memory VAR data: discovered graph vs no graph. Mean over ten
// one-step EF forecasts per dataset with parameters fitted on the first T rows.
Outcome criterion8() {
  const int K = 10, T = 200, H = 10;
  std::vector<double> with_graph(K, std::nan("")), without(K, std::nan(""));
  std::vector<int> conv(K, 0), edges(K, 0);
  parallel_for(K, g_threads, [&](int k) {
    Rng rng(replicate_seed(1, "T7/generator", k));
    const VarDgp dgp = random_var_dgp(5, rng);
    SimConfig c;
    c.seed = replicate_seed(1, "T7/data", k);
    const SeriesPanel data = simulate_fivar(dgp.A1, dgp.d, dgp.noise_cov, T + H, c);
    DiscoverConfig dc;
    dc.seed = replicate_seed(1, "T7/graphs", k);
    const Graph found = discover_graph(data.slice(0, T), GraphStrategy::gnar_inf_approx, dc).graph;
    edges[k] = static_cast<int>(found.num_edges());
    auto score = [&](const char* order, const Graph& g, bool& converged) {
      ModelSpec s;
      s.order = parse_order(order);
      s.alpha_mode = s.d_mode = s.sigma_mode = Mode::individual;
      const Model m(s, g);
      const FitResult r = fit(m, data.slice(0, T));
      converged = r.converged;
      double sum = 0.0;
      for (int j = 0; j < H; ++j) {
        const ForecastResult f = forecast(m, r.theta, data.slice(0, T + j), 1, ForecastMethod::ef);
        sum += (f.pred.row(0) - data.values.row(T + j)).squaredNorm() / 5.0;
      }
      return sum / H;
    };
    bool c0 = false, c1 = false;
    without[k] = score("(1,[0])", Graph(5), c0);
    with_graph[k] = score("(1,[1])", found, c1);
    conv[k] = c0 && c1;
  });
  double a = 0.0, b = 0.0;
  int used = 0, better = 0, edge_total = 0;
  for (int k = 0; k < K; ++k) {
    edge_total += edges[k];
    if (!conv[k]) continue;
    a += with_graph[k];
    b += without[k];
    better += with_graph[k] <= without[k];
    ++used;
  }
  a /= used;
  b /= used;
  return {used > 0 && a <= b, "MSPE (1,[1]) GNAR-inf graph " + fmt("%.4f", a) + " vs (1,[0]) no graph " +
                                  fmt("%.4f", b) + "; graph better in " + std::to_string(better) + "/" +
                                  std::to_string(used) + ", mean edges " + fmt("%.1f", edge_total / double(K))};
}

// 9. Every unit-test executable (module invariants and properties).
Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> bins;
  std::stringstream ss(MEMNET_UNIT_TESTS);
  for (std::string b; std::getline(ss, b, '|');)
    if (!b.empty()) bins.push_back(b);
  std::vector<std::string> failed;
  for (const auto& b : bins) {
    const std::string cmd = "\"" + b + "\" --gtest_brief=1 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed.push_back(b.substr(b.find_last_of('/') + 1));
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(bins.size() - failed.size()) + "/" + std::to_string(bins.size()) +
                       " suites pass in " + fmt("%.0f s", secs);
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty() && !bins.empty() && secs < 300, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads" && i + 1 < argc) {
      g_threads = std::atoi(argv[++i]);
    } else {
      only.insert(std::atoi(a.c_str()));
    }
  }
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  int failures = 0;
  for (int c = 1; c <= 9; ++c) {
    if (!only.empty() && !only.count(c)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d: %s  %s  [%.1f s]\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
