#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "memnet/errors.hpp"

using namespace memnet::cli;

namespace {

void add_spec(CLI::App* s, ModelOptions& m) {
  s->add_option("--model", m.model, "fignar | gnarfi");
  s->add_option("--order", m.order, "lag order and stages, e.g. (2,[1,1])");
  s->add_option("--alpha", m.alpha, "global | individual");
  s->add_option("--d-mode", m.d_mode, "global | individual");
  s->add_option("--sigma-mode", m.sigma_mode, "global | individual");
  s->add_option("--estimation", m.estimation, "exact | conditional (GNARFI only)");
  s->add_option("--weights", m.weights, "equal | inverse_distance");
  s->add_option("--graph", m.graph, "graph file, or fivenet | tennet");
  s->add_option("--nodes", m.nodes, "node count when no graph is given");
}

void add_data(CLI::App* s, DataOptions& d, bool required) {
  auto* o = s->add_option("--data", d.path, "series CSV (header of node labels)");
  if (required) o->required();
  s->add_option("--missing", d.missing, "strict | interpolate");
  s->add_flag("--demean", d.demean, "subtract node means");
  s->add_flag("--log", d.log, "take logs before demeaning");
}

void add_fit(CLI::App* s, FitSettings& f) {
  s->add_option("--max-iter", f.max_iter, "optimizer iterations");
  s->add_option("--tol", f.tol, "gradient tolerance");
  s->add_option("--pcg-tol", f.pcg_tol, "PCG relative residual");
  s->add_option("--pcg-max-iter", f.pcg_max_iter, "PCG iteration cap (0: dimension)");
  s->add_option("--logdet", f.logdet, "exact | spline");
  s->add_option("--init", f.init, "params file with starting values");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-memory network time series: simulate, fit, forecast, select"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "config file with [subcommand] sections")->configurable(false);
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::function<std::string()> run;
  CLI::App* active = nullptr;
  auto bind = [&](CLI::App* s, auto fn) {
    s->fallthrough();
    s->callback([&, s, fn] {
      active = s;
      run = fn;
    });
  };

  SimulateOptions sim;
  auto* s_sim = app.add_subcommand("simulate", "simulate a panel from a preset or a params file");
  s_sim->add_option("--preset", sim.preset, "dgp1 | dgp2 | dgp3");
  add_spec(s_sim, sim.spec);
  s_sim->add_option("--params", sim.params, "params file (fit report format)");
  s_sim->add_option("--T", sim.T, "number of time points")->required();
  s_sim->add_option("--seed", sim.seed, "RNG seed");
  s_sim->add_option("--method", sim.method, "exact | truncated");
  s_sim->add_option("--burn-in", sim.burn_in, "truncated: discarded prefix");
  s_sim->add_option("--filter-order", sim.filter_order, "truncated: MA(inf) truncation");
  s_sim->add_option("--out", sim.out, "output CSV");

  FitOptionsCli fitc;
  auto* s_fit = app.add_subcommand("fit", "maximum likelihood fit");
  add_data(s_fit, fitc.data, true);
  add_spec(s_fit, fitc.spec);
  add_fit(s_fit, fitc.fit);
  s_fit->add_option("--out", fitc.out, "report file");

  ForecastOptionsCli fc;
  auto* s_fc = app.add_subcommand("forecast", "fit and forecast, optionally against a holdout");
  add_data(s_fc, fc.data, true);
  add_spec(s_fc, fc.spec);
  add_fit(s_fc, fc.fit);
  s_fc->add_option("--params", fc.params, "use these parameters instead of fitting");
  s_fc->add_option("--horizon", fc.horizon, "forecast steps");
  s_fc->add_option("--method", fc.method, "dlf | ef | rf");
  s_fc->add_option("--scheme", fc.scheme, "fixed_origin | rolling_window");
  s_fc->add_option("--windows", fc.windows, "rolling_window: number of origins");
  s_fc->add_flag("--holdout,!--no-holdout", fc.holdout, "compare with the last rows of the data");
  s_fc->add_option("--threads", fc.threads, "worker threads (0: auto)");
  s_fc->add_option("--out", fc.out, "output CSV");

  SelectOptionsCli sel;
  auto* s_sel = app.add_subcommand("select", "grid search over model orders");
  add_data(s_sel, sel.data, true);
  s_sel->add_option("--graph", sel.graph, "graph file, or fivenet | tennet");
  s_sel->add_option("--weights", sel.weights, "equal | inverse_distance");
  s_sel->add_option("--kinds", sel.kinds, "model kinds")->delimiter(',');
  s_sel->add_option("--orders", sel.orders, "orders (default: the standard six)");
  s_sel->add_option("--alpha-modes", sel.alpha_modes, "alpha modes")->delimiter(',');
  s_sel->add_option("--estimation", sel.estimation, "exact | conditional");
  s_sel->add_option("--criterion", sel.criterion, "bic | aic | mspe");
  s_sel->add_option("--holdout", sel.holdout, "mspe: held-out rows");
  s_sel->add_option("--method", sel.method, "mspe: dlf | ef | rf");
  add_fit(s_sel, sel.fit);
  s_sel->add_option("--threads", sel.threads, "worker threads (0: auto)");
  s_sel->add_option("--out", sel.out, "output CSV");

  GraphOptionsCli gr;
  auto* s_gr = app.add_subcommand("graph", "build a network");
  s_gr->add_option("--strategy", gr.strategy, "fully_connected | mst | gnar_inf_approx");
  add_data(s_gr, gr.data, false);
  s_gr->add_option("--coords", gr.coords, "node,x,y CSV");
  s_gr->add_option("--nodes", gr.nodes, "node count");
  s_gr->add_option("--metric", gr.metric, "euclidean | greatcircle");
  s_gr->add_option("--num-graphs", gr.num_graphs, "random graphs to score");
  s_gr->add_option("--edge-probs", gr.edge_probs, "edge probabilities")->delimiter(',');
  s_gr->add_option("--p-high", gr.p_high, "lag order of the scoring model");
  s_gr->add_option("--holdout", gr.holdout, "held-out rows (0: max(10, T/5))");
  s_gr->add_option("--seed", gr.seed, "RNG seed");
  s_gr->add_option("--threads", gr.threads, "worker threads (0: auto)");
  s_gr->add_option("--out", gr.out, "output graph file");

  AcvOptionsCli acv;
  auto* s_acv = app.add_subcommand("acv", "model autocovariance");
  s_acv->add_option("--preset", acv.preset, "dgp1 | dgp2 | dgp3");
  add_spec(s_acv, acv.spec);
  s_acv->add_option("--params", acv.params, "params file (fit report format)");
  s_acv->add_option("--max-lag", acv.max_lag, "largest lag");
  s_acv->add_option("--out", acv.out, "output CSV");

  ReproduceOptionsCli rep;
  auto* s_rep = app.add_subcommand("reproduce", "rerun a published table and compare");
  s_rep->add_option("table", rep.table, "T1..T7, C1, C2")->required();
  s_rep->add_option("--scale", rep.scale, "desk | full");
  s_rep->add_option("--replicates", rep.replicates, "override the replicate count");
  s_rep->add_option("--lengths", rep.lengths, "series lengths")->delimiter(',');
  s_rep->add_option("--seed", rep.seed, "base seed");
  s_rep->add_option("--sim-method", rep.sim_method, "exact | truncated");
  s_rep->add_option("--max-iter", rep.max_iter, "optimizer iterations per fit");
  s_rep->add_option("--reference-dir", rep.reference_dir, "directory of reference CSVs");
  s_rep->add_option("--threads", rep.threads, "worker threads (0: auto)");
  s_rep->add_option("--out", rep.out, "output CSV (default <table>.csv)");

  auto echo = [&] { return "[" + active->get_name() + "]\n" + active->config_to_str(true, false); };
  bind(s_sim, [&] { return run_simulate(sim, echo()); });
  bind(s_fit, [&] { return run_fit(fitc, echo()); });
  bind(s_fc, [&] { return run_forecast(fc, echo()); });
  bind(s_sel, [&] { return run_select(sel, echo()); });
  bind(s_gr, [&] { return run_graph(gr, echo()); });
  bind(s_acv, [&] { return run_acv(acv, echo()); });
  bind(s_rep, [&] { return run_reproduce(rep, echo()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::cout << run();
    return 0;
  } catch (const memnet::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const memnet::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
