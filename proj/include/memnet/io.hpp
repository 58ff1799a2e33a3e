#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "memnet/estimate.hpp"
#include "memnet/network.hpp"
#include "memnet/types.hpp"

namespace memnet {

/// Graph file: first line "N <n>", then "i j [dist]" per edge, 1-indexed.
/// Blank lines and lines starting with '#' are skipped.
Graph parse_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

using Coords = std::vector<std::pair<double, double>>;

/// CSV with header "node,x,y"; every node 1..n exactly once.
Coords parse_coords(std::istream& in, int n);
Coords read_coords_file(const std::string& path, int n);

enum class MissingPolicy { strict, interpolate };

MissingPolicy parse_missing_policy(const std::string& s);

struct IngestOptions {
  MissingPolicy policy = MissingPolicy::strict;
  bool log = false;     ///< natural log of every value (after imputation)
  bool demean = false;  ///< subtract each node's mean (last step)
};

/// Header row of node labels, one row per time point. Missing cells are
/// empty, "NA" or "NaN".
SeriesPanel parse_series(std::istream& in, const IngestOptions& opts = {});
SeriesPanel ingest_series(const std::string& path, const IngestOptions& opts = {});

/// Values with 17 significant digits so that reading back is exact.
void write_series(std::ostream& out, const SeriesPanel& data);

/// Long format "h,i,k,value" with 1-based nodes.
void write_acv(std::ostream& out, const Autocov& acv);

/// Splits one CSV record, honouring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads alpha.i.j, beta.j.r.c, d.i and sigma2.i entries (the fit report
/// format; other keys are ignored). Every entry for `n` nodes and `order`
/// must be present exactly once.
ModelParams parse_params(std::istream& in, int n, const GnarOrder& order);
ModelParams read_params_file(const std::string& path, int n, const GnarOrder& order);

Metric parse_metric(const std::string& s);
WeightScheme parse_weight_scheme(const std::string& s);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace memnet
