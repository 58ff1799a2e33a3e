#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memnet/gnar.hpp"
#include "memnet/levinson.hpp"
#include "memnet/network.hpp"
#include "memnet/types.hpp"

namespace memnet {

enum class ModelKind { fignar, gnarfi };
enum class Estimation { exact, conditional };

struct ModelSpec {
  ModelKind kind = ModelKind::fignar;
  Estimation estimation = Estimation::exact;
  GnarOrder order;
  Mode alpha_mode = Mode::global;
  Mode d_mode = Mode::individual;
  Mode sigma_mode = Mode::individual;
  WeightScheme scheme = WeightScheme::equal;

  void validate() const;
  /// e.g. "FIGNAR(1,[1]) exact alpha=global d=individual sigma2=individual"
  std::string label() const;
};

std::string to_string(ModelKind k);
std::string to_string(Estimation e);
std::string to_string(Mode m);
ModelKind parse_kind(const std::string& s);
Estimation parse_estimation(const std::string& s);
Mode parse_mode(const std::string& s);

/// Full parameter set; d and sigma2 always hold N entries.
struct ModelParams {
  GnarParams gnar;
  VectorXd d;
  VectorXd sigma2;
};

/// Number of free parameters M.
int param_count(const ModelSpec& spec, int n);

/// A specification bound to a network.
class Model {
 public:
  Model(ModelSpec spec, const Graph& graph);
  Model(ModelSpec spec, WeightMatrices weights);

  const ModelSpec& spec() const { return spec_; }
  int N() const { return n_; }
  const WeightMatrices& weights() const { return weights_; }

  FilterMatrices filters(const ModelParams& par) const;
  /// Gamma(0..H) of the model.
  Autocov acv(const ModelParams& par, int H) const;
  /// Stationarity margin of the GNAR part.
  double margin(const ModelParams& par) const;

 private:
  ModelSpec spec_;
  int n_;
  WeightMatrices weights_;
};

/// Maps ModelParams to an unconstrained vector u and back. alpha and beta
/// are raw, d = eps + (0.5 - 2 eps) sin^2(u) with eps = 1e-8,
/// sigma2 = exp(u).
class ParamCodec {
 public:
  ParamCodec(const ModelSpec& spec, int n);

  int size() const { return size_; }
  VectorXd pack(const ModelParams& par) const;
  ModelParams unpack(const VectorXd& u) const;
  /// Free parameters in natural units (alpha, beta, d, sigma2).
  VectorXd natural(const ModelParams& par) const;
  /// Names matching natural(), e.g. "alpha.1", "beta.1.1.1", "d.3".
  std::vector<std::string> names() const;

 private:
  ModelSpec spec_;
  int n_, n_alpha_, n_beta_, n_d_, n_s_, size_;
};

/// -log likelihood for the exact Gaussian model (FIGNAR or GNARFI).
double negloglik_exact(const Model& model, const ModelParams& par, const SeriesPanel& data,
                       const LoglikOptions& opts = {});
/// -log likelihood of z_t = x_t - sum_j A_j x_{t-j} (zero pre-sample) as FIWN.
double negloglik_cond_gnarfi(const Model& model, const ModelParams& par, const SeriesPanel& data);
/// Dispatches on spec().estimation.
double negloglik(const Model& model, const ModelParams& par, const SeriesPanel& data,
                 const LoglikOptions& opts = {});

struct FitOptions {
  double tol = 1e-7;
  int max_iter = 500;
  LoglikOptions lik;
  bool restart = true;
  double barrier_start = 0.995;
};

struct FitResult {
  ModelParams theta;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  int M = 0;
  int T = 0;
  double bic = 0.0;
  double aic = 0.0;
  int m_trunc = -1;
  double wall_seconds = 0.0;
  bool restarted = false;
  std::vector<double> trace;  ///< objective after every accepted step
};

struct InformationCriteria {
  double bic, aic;
};
InformationCriteria information_criteria(double loglik, int M, double T);

/// alpha, beta = 0.1 / (p (1 + max s)), d = 0.25, sigma2 from the differenced series.
ModelParams default_init(const Model& model, const SeriesPanel& data);

FitResult fit(const Model& model, const SeriesPanel& data,
              const std::optional<ModelParams>& init = std::nullopt, const FitOptions& opts = {});

/// Flat key=value lines with 1-based indices.
std::string fit_report(const Model& model, const FitResult& res);

}  // namespace memnet
