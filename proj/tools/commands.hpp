#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace memnet::cli {

struct ModelOptions {
  std::string model = "fignar";
  std::string order = "(1,[1])";
  std::string alpha = "global";
  std::string d_mode = "individual";
  std::string sigma_mode = "individual";
  std::string estimation = "exact";
  std::string weights = "equal";
  std::string graph;  ///< graph file, or a built-in name (fivenet, tennet)
  int nodes = 0;      ///< node count when no graph is given
};

struct DataOptions {
  std::string path;
  std::string missing = "strict";
  bool demean = false;
  bool log = false;
};

struct FitSettings {
  int max_iter = 500;
  double tol = 1e-7;
  double pcg_tol = 1e-9;
  int pcg_max_iter = 0;
  std::string logdet = "exact";  ///< exact | spline
  std::string init;  ///< params file with starting values
};

struct SimulateOptions {
  std::string preset;
  ModelOptions spec;
  std::string params;
  int T = 0;
  std::uint64_t seed = 1;
  std::string method = "exact";
  int burn_in = 5000;
  int filter_order = 2000;
  std::string out = "series.csv";
};

struct FitOptionsCli {
  DataOptions data;
  ModelOptions spec;
  FitSettings fit;
  std::string out = "fit.txt";
};

struct ForecastOptionsCli {
  DataOptions data;
  ModelOptions spec;
  FitSettings fit;
  std::string params;  ///< skip fitting and use these parameters
  int horizon = 1;
  std::string method = "ef";
  std::string scheme = "fixed_origin";
  int windows = 1;
  bool holdout = true;  ///< predict the last `horizon` rows instead of the future
  int threads = 0;
  std::string out = "forecast.csv";
};

struct SelectOptionsCli {
  DataOptions data;
  std::string graph;
  std::string weights = "equal";
  std::vector<std::string> kinds{"fignar", "gnarfi"};
  std::vector<std::string> orders;  ///< empty: the six standard orders
  std::vector<std::string> alpha_modes{"global"};
  std::string estimation = "exact";
  std::string criterion = "bic";
  int holdout = 0;
  std::string method = "ef";
  FitSettings fit;
  int threads = 0;
  std::string out = "select.csv";
};

struct GraphOptionsCli {
  std::string strategy = "fully_connected";
  DataOptions data;
  std::string coords;
  int nodes = 0;
  std::string metric = "euclidean";
  int num_graphs = 50;
  std::vector<double> edge_probs{0.2, 0.4, 0.6};
  int p_high = 10;
  int holdout = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "graph.txt";
};

struct AcvOptionsCli {
  std::string preset;
  ModelOptions spec;
  std::string params;
  int max_lag = 20;
  std::string out = "acv.csv";
};

struct ReproduceOptionsCli {
  std::string table;
  std::string scale = "desk";
  int replicates = 0;
  std::vector<int> lengths;
  std::uint64_t seed = 1;
  std::string sim_method = "exact";
  int max_iter = 500;
  std::string reference_dir;
  int threads = 0;
  std::string out;  ///< default <table>.csv
};

/// Each command writes its outputs and returns a short stdout summary.
/// `echo` is the resolved configuration, written next to the main output.
std::string run_simulate(const SimulateOptions& o, const std::string& echo);
std::string run_fit(const FitOptionsCli& o, const std::string& echo);
std::string run_forecast(const ForecastOptionsCli& o, const std::string& echo);
std::string run_select(const SelectOptionsCli& o, const std::string& echo);
std::string run_graph(const GraphOptionsCli& o, const std::string& echo);
std::string run_acv(const AcvOptionsCli& o, const std::string& echo);
std::string run_reproduce(const ReproduceOptionsCli& o, const std::string& echo);

}  // namespace memnet::cli
