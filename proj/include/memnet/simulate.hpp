#pragma once

#include <cstdint>
#include <string>

#include "memnet/estimate.hpp"
#include "memnet/gnar.hpp"
#include "memnet/network.hpp"
#include "memnet/rng.hpp"
#include "memnet/types.hpp"

namespace memnet {

enum class SimMethod { exact, truncated };

std::string to_string(SimMethod m);
SimMethod parse_sim_method(const std::string& s);

struct SimConfig {
  SimMethod method = SimMethod::truncated;
  int burn_in = 5000;
  int filter_order = 2000;  ///< J; 0 uses the full simulated length
  std::uint64_t seed = 1;
};

/// Zero-mean Gaussian panel with autocovariance `acv` drawn through the
/// Durbin-Levinson innovations representation. Needs lags 0..T-1.
SeriesPanel simulate_gaussian(const Autocov& acv, int T, Rng& rng);

/// x_t = sum_{j=0}^{J} psi_j(d_i) y_{t-j} per column, J = filter_order (or all lags).
MatrixXd fractional_integrate(const MatrixXd& y, const VectorXd& d, int filter_order);

SeriesPanel simulate_fiwn(const VectorXd& d, const VectorXd& sigma2, int T, const SimConfig& cfg);
SeriesPanel simulate_fignar(const FilterMatrices& A, const VectorXd& d, const VectorXd& sigma2,
                            int T, const SimConfig& cfg);
SeriesPanel simulate_gnarfi(const FilterMatrices& A, const VectorXd& d, const VectorXd& sigma2,
                            int T, const SimConfig& cfg);
SeriesPanel simulate_model(const Model& model, const ModelParams& par, int T, const SimConfig& cfg);

/// X_t = A_1 X_{t-1} + Z_t with Z fractionally integrated noise of full
/// covariance `noise_cov` (truncated filter only).
SeriesPanel simulate_fivar(const MatrixXd& A1, const VectorXd& d, const MatrixXd& noise_cov, int T,
                           const SimConfig& cfg);

/// Built-in graphs: "fivenet" and "tennet".
Graph builtin_graph(const std::string& name);

struct Preset {
  std::string name;
  Graph graph;
  ModelSpec spec;  ///< kind left as FIGNAR; callers pick the model
  ModelParams params;
};

/// DGP1, DGP2 or DGP3 on "fivenet" or "tennet".
Preset dgp_preset(const std::string& name, const std::string& graph);

}  // namespace memnet
