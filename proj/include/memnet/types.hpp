#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "memnet/errors.hpp"

namespace memnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// T x N panel of observations; row t is the cross-section at time t.
struct SeriesPanel {
  MatrixXd values;
  std::vector<std::string> labels;

  SeriesPanel() = default;
  explicit SeriesPanel(MatrixXd v) : values(std::move(v)) { default_labels(); }
  SeriesPanel(MatrixXd v, std::vector<std::string> l)
      : values(std::move(v)), labels(std::move(l)) {}

  int T() const { return static_cast<int>(values.rows()); }
  int N() const { return static_cast<int>(values.cols()); }

  void default_labels() {
    labels.clear();
    for (int i = 0; i < N(); ++i) labels.push_back("node" + std::to_string(i + 1));
  }

  /// Node-major stacking (x_1', ..., x_N')' of length N*T.
  VectorXd stacked() const {
    VectorXd x(values.size());
    for (int i = 0; i < N(); ++i) x.segment(static_cast<Eigen::Index>(i) * T(), T()) = values.col(i);
    return x;
  }

  /// Rows [begin, begin + len).
  SeriesPanel slice(int begin, int len) const {
    return SeriesPanel(values.middleRows(begin, len), labels);
  }
};

/// Autocovariance sequence Gamma(h) = Cov(X_{t+h}, X_t) for h = 0..H.
/// Negative lags follow from Gamma(-h) = Gamma(h)^T.
class Autocov {
 public:
  Autocov() = default;
  Autocov(int n, int max_lag) : n_(n), lags_(max_lag + 1, MatrixXd::Zero(n, n)) {}

  int dim() const { return n_; }
  int max_lag() const { return static_cast<int>(lags_.size()) - 1; }

  MatrixXd& operator[](int h) { return lags_.at(h); }
  const MatrixXd& operator[](int h) const { return lags_.at(h); }

  /// Lag h for any sign of h; lags beyond max_lag() are zero.
  MatrixXd at(int h) const {
    const int a = h < 0 ? -h : h;
    if (a > max_lag()) return MatrixXd::Zero(n_, n_);
    return h < 0 ? MatrixXd(lags_[a].transpose()) : lags_[a];
  }

  /// Scalar entry Gamma(h)_{ik} for any sign of h.
  double entry(int h, int i, int k) const {
    if (h >= 0) return h > max_lag() ? 0.0 : lags_[h](i, k);
    return -h > max_lag() ? 0.0 : lags_[-h](k, i);
  }

  void require_lag(int h, const char* who) const {
    if (max_lag() < h)
      throw DimensionMismatch(std::string(who) + ": autocovariance must cover lag " +
                              std::to_string(h));
  }

  /// Lags are truncated (zeroed) beyond this index; -1 when not applicable.
  int m_trunc = -1;

 private:
  int n_ = 0;
  std::vector<MatrixXd> lags_;
};

enum class Mode { global, individual };

}  // namespace memnet
