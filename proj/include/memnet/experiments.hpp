#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memnet/estimate.hpp"
#include "memnet/rng.hpp"
#include "memnet/simulate.hpp"

namespace memnet {

enum class Scale { desk, full };

std::string to_string(Scale s);
Scale parse_scale(const std::string& s);

/// T1..T7, C1, C2.
const std::vector<std::string>& table_ids();

struct ReproduceOptions {
  Scale scale = Scale::desk;
  int replicates = 0;        ///< 0: 20 at desk scale, 100 (50 for T3) at full scale
  std::vector<int> lengths;  ///< empty: the published lengths; T5-T7, C1, C2 use the first entry
  std::uint64_t seed = 1;
  int threads = 1;
  SimMethod sim = SimMethod::exact;  ///< long-memory VAR data (T7) is always truncated
  FitOptions fit;
  std::string reference_dir;  ///< empty: $MEMNET_REFERENCE_DIR, then the source fixtures

  int replicates_for(const std::string& table) const;
};

struct ReferenceCell {
  std::string row, column;
  double value = 0.0;
  std::string flag;
};

/// Published values for a table id; throws UnknownTable or ValidationError.
std::vector<ReferenceCell> load_reference(const std::string& table, const std::string& dir = "");

struct TableCell {
  std::string row, column;
  std::optional<double> computed;
  std::optional<double> reference;
  std::string computed_flag, reference_flag;
  int replicates = 0;  ///< contributions to `computed`
  int failed = 0;      ///< contributions from fits that threw or did not converge
};

/// Per-replicate values behind a cell, e.g. parameter estimates or MSPEs.
struct PlotPoint {
  std::string row, column;
  int replicate = 0;
  std::string series;
  double value = 0.0;
};

struct ReproducedTable {
  std::string id;
  std::string description;
  Scale scale = Scale::desk;
  int replicates = 0;
  std::vector<TableCell> cells;  ///< reference order, then cells with no reference
  std::vector<PlotPoint> plot;

  const TableCell* find(const std::string& row, const std::string& column) const;
  /// table,row,column,computed,reference,computed_flag,reference_flag,replicates,failed
  std::string csv() const;
  /// table,row,column,replicate,series,value
  std::string plot_csv() const;
};

/// Runs the experiment behind a table and joins it with the reference.
/// Throws UnknownTable for other ids.
ReproducedTable reproduce(const std::string& table, const ReproduceOptions& opts = {});

/// Dense long-memory VAR(1) generator: X_t = A1 X_{t-1} + Z_t with Z
/// fractionally integrated, correlated noise.
struct VarDgp {
  MatrixXd A1;
  VectorXd d;
  MatrixXd noise_cov;
};

/// A1 with positive entries rescaled to spectral radius <= 0.8, d spread over
/// (0.05, 0.45), noise covariance B B' / n + I / 2.
VarDgp random_var_dgp(int n, Rng& rng);

/// Seed for replicate k of the stream named `tag`.
std::uint64_t replicate_seed(std::uint64_t seed, const std::string& tag, int k);

}  // namespace memnet
