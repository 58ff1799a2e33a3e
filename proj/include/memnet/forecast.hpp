#pragma once

#include <string>
#include <vector>

#include "memnet/estimate.hpp"
#include "memnet/toeplitz.hpp"
#include "memnet/types.hpp"

namespace memnet {

enum class ForecastMethod { dlf, ef, rf };

std::string to_string(ForecastMethod m);
ForecastMethod parse_forecast_method(const std::string& s);

struct ForecastResult {
  ForecastMethod method = ForecastMethod::ef;
  MatrixXd pred;  ///< h x N, row k is horizon k + 1

  int horizons() const { return static_cast<int>(pred.rows()); }
};

struct ForecastOptions {
  PcgOptions pcg{1e-12, 0, Preconditioner::circulant};
};

/// Durbin-Levinson predictor of order T; later horizons substitute earlier
/// predictions with the coefficients held fixed.
ForecastResult forecast_dlf(const Model& model, const ModelParams& par, const SeriesPanel& data, int h);

/// Gaussian conditional mean Cov(X_{T+h}, x) Sigma^{-1} x.
ForecastResult forecast_ef(const Model& model, const ModelParams& par, const SeriesPanel& data, int h,
                           const ForecastOptions& opts = {});

/// Truncated AR(inf) recursion X_{T+h} = -sum_j C_j X_{T+h-j} with C(L) the
/// product of the GNAR and fractional difference operators in model order.
ForecastResult forecast_rf(const Model& model, const ModelParams& par, const SeriesPanel& data, int h);

ForecastResult forecast(const Model& model, const ModelParams& par, const SeriesPanel& data, int h,
                        ForecastMethod method, const ForecastOptions& opts = {});

/// Mean squared error over all entries (nodes weighted equally).
double mspe(const MatrixXd& pred, const MatrixXd& actual);

enum class EvalScheme { fixed_origin, rolling_window };

std::string to_string(EvalScheme s);
EvalScheme parse_eval_scheme(const std::string& s);

struct EvalConfig {
  EvalScheme scheme = EvalScheme::fixed_origin;
  int horizon = 1;  ///< forecast steps per origin
  int windows = 1;  ///< rolling_window: number of origins
  std::vector<ForecastMethod> methods{ForecastMethod::dlf, ForecastMethod::ef, ForecastMethod::rf};
  FitOptions fit;
  ForecastOptions forecast;
  int threads = 1;
};

struct ForecastRecord {
  int model = 0;   ///< index into the model list
  int origin = 0;  ///< number of observations available (row index of the first forecast)
  int horizon = 1;
  ForecastMethod method = ForecastMethod::ef;
  VectorXd pred, actual;
  double se = 0.0;  ///< mean squared error over nodes
};

struct EvalResult {
  std::vector<ForecastRecord> records;
  std::vector<FitResult> fits;  ///< one per (model, origin), model-major
  int origins = 0;

  /// Mean of se over the records matching the filter (-1 matches all).
  double mean_se(int model, ForecastMethod method, int horizon = -1, int origin = -1) const;
};

/// fixed_origin: fit on the first T - horizon rows and predict the rest.
/// rolling_window: fixed-length windows; origin k fits rows [k, k + W) with
/// W = T - windows - horizon + 1 and predicts the following horizon rows.
EvalResult evaluate(const SeriesPanel& data, const std::vector<Model>& models, const EvalConfig& cfg);

}  // namespace memnet
