#include "memnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace memnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

bool parse_number(const std::string& text, double& v) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& text, int& v) {
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  return !t.empty() && ec == std::errc() && ptr == t.data() + t.size();
}

bool is_missing(const std::string& cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA" || t == "NaN" || t == "nan" || t == "na";
}

void interpolate_column(MatrixXd& x, Eigen::Index col, const std::string& label) {
  const Eigen::Index T = x.rows();
  Eigen::Index first = 0;
  while (first < T && std::isnan(x(first, col))) ++first;
  if (first == T) throw LeadingGap("column '" + label + "' has no observed values");
  if (first > 0) throw LeadingGap("column '" + label + "' starts with a missing value");
  if (std::isnan(x(T - 1, col))) throw TrailingGap("column '" + label + "' ends with a missing value");
  Eigen::Index prev = 0;
  for (Eigen::Index t = 1; t < T; ++t) {
    if (std::isnan(x(t, col))) continue;
    for (Eigen::Index u = prev + 1; u < t; ++u) {
      const double w = static_cast<double>(u - prev) / static_cast<double>(t - prev);
      x(u, col) = (1.0 - w) * x(prev, col) + w * x(t, col);
    }
    prev = t;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& raw) {
  std::string line = raw;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw MalformedCsv("unterminated quote in CSV record");
  out.push_back(cur);
  return out;
}

Graph parse_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  int with_dist = 0, without_dist = 0;
  Graph g;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    const std::string where = "graph file line " + std::to_string(lineno);
    if (n < 0) {
      std::string tag;
      std::string rest;
      if (!(ss >> tag >> n) || tag != "N" || n < 1 || (ss >> rest))
        throw ValidationError(where + ": expected 'N <num_nodes>'");
      g = Graph(n);
      continue;
    }
    std::vector<std::string> tok;
    for (std::string s; ss >> s;) tok.push_back(s);
    int i = 0, j = 0;
    if (tok.size() < 2 || tok.size() > 3 || !parse_int(tok[0], i) || !parse_int(tok[1], j))
      throw ValidationError(where + ": expected 'i j [dist]'");
    if (i < 1 || j < 1 || i > n || j > n) throw ValidationError(where + ": node id out of range");
    std::optional<double> dist;
    if (tok.size() == 3) {
      double d = 0.0;
      if (!parse_number(tok[2], d) || !(d > 0.0)) throw ValidationError(where + ": distance must be positive");
      dist = d;
    }
    ++(dist ? with_dist : without_dist);
    if (with_dist && without_dist) throw ValidationError(where + ": either every edge has a distance or none does");
    try {
      g.add_edge(i - 1, j - 1, dist);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (n < 0) throw ValidationError("graph file: missing 'N <num_nodes>' header");
  return g;
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return parse_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "N " << g.num_nodes() << "\n";
  for (const auto& [i, j] : g.edges()) {
    out << i + 1 << " " << j + 1;
    if (g.has_distances()) out << " " << format_double(*g.distance(i, j));
    out << "\n";
  }
}

Coords parse_coords(std::istream& in, int n) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("coords: empty file");
  std::vector<std::string> head = split_csv_line(line);
  for (auto& h : head) h = trim(h);
  if (head != std::vector<std::string>{"node", "x", "y"}) throw MalformedCsv("coords: header must be node,x,y");
  Coords out(n);
  std::vector<bool> seen(n, false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    int node = 0;
    double x = 0.0, y = 0.0;
    if (f.size() != 3 || !parse_int(f[0], node) || !parse_number(f[1], x) || !parse_number(f[2], y))
      throw MalformedCsv("coords line " + std::to_string(lineno) + ": expected node,x,y");
    if (node < 1 || node > n) throw MalformedCsv("coords line " + std::to_string(lineno) + ": node out of range");
    if (seen[node - 1]) throw DuplicateCoordinates("coords: node " + std::to_string(node) + " listed twice");
    seen[node - 1] = true;
    out[node - 1] = {x, y};
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw MissingCoordinates("coords: node " + std::to_string(i + 1) + " has no coordinates");
  return out;
}

Coords read_coords_file(const std::string& path, int n) {
  std::ifstream in = open_or_throw(path);
  return parse_coords(in, n);
}

MissingPolicy parse_missing_policy(const std::string& s) {
  if (s == "strict") return MissingPolicy::strict;
  if (s == "interpolate") return MissingPolicy::interpolate;
  throw ValidationError("unknown missing-value policy '" + s + "' (strict|interpolate)");
}

SeriesPanel parse_series(std::istream& in, const IngestOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("series: empty file");
  std::vector<std::string> labels = split_csv_line(line);
  for (auto& l : labels) {
    l = trim(l);
    if (l.empty()) throw MalformedCsv("series: empty node label in header");
  }
  const std::size_t n = labels.size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != n)
      throw MalformedCsv("series line " + std::to_string(lineno) + ": expected " + std::to_string(n) + " fields");
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_missing(f[i])) {
        if (opts.policy == MissingPolicy::strict)
          throw MalformedCsv("series line " + std::to_string(lineno) + ": missing value for '" + labels[i] + "'");
        r[i] = std::numeric_limits<double>::quiet_NaN();
      } else if (!parse_number(f[i], r[i]) || !std::isfinite(r[i])) {
        throw MalformedCsv("series line " + std::to_string(lineno) + ": bad number '" + trim(f[i]) + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw MalformedCsv("series: no data rows");
  MatrixXd x(rows.size(), n);
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t i = 0; i < n; ++i) x(t, i) = rows[t][i];
  if (opts.policy == MissingPolicy::interpolate)
    for (std::size_t i = 0; i < n; ++i) interpolate_column(x, static_cast<Eigen::Index>(i), labels[i]);
  if (opts.log) {
    if (!(x.minCoeff() > 0.0)) throw ValidationError("series: log transform needs positive values");
    x = x.array().log().matrix();
  }
  if (opts.demean) x.rowwise() -= x.colwise().mean();
  return SeriesPanel(std::move(x), std::move(labels));
}

SeriesPanel ingest_series(const std::string& path, const IngestOptions& opts) {
  std::ifstream in = open_or_throw(path);
  return parse_series(in, opts);
}

void write_series(std::ostream& out, const SeriesPanel& data) {
  std::vector<std::string> labels = data.labels;
  if (static_cast<int>(labels.size()) != data.N()) {
    labels.clear();
    for (int i = 0; i < data.N(); ++i) labels.push_back("node" + std::to_string(i + 1));
  }
  for (int i = 0; i < data.N(); ++i) out << (i ? "," : "") << labels[i];
  out << "\n";
  for (int t = 0; t < data.T(); ++t) {
    for (int i = 0; i < data.N(); ++i) out << (i ? "," : "") << format_double(data.values(t, i));
    out << "\n";
  }
}

void write_acv(std::ostream& out, const Autocov& acv) {
  out << "h,i,k,value\n";
  for (int h = 0; h <= acv.max_lag(); ++h)
    for (int i = 0; i < acv.dim(); ++i)
      for (int k = 0; k < acv.dim(); ++k)
        out << h << "," << i + 1 << "," << k + 1 << "," << format_double(acv[h](i, k)) << "\n";
}

ModelParams parse_params(std::istream& in, int n, const GnarOrder& order) {
  order.validate();
  const int p = order.p;
  std::map<std::string, double> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ValidationError("params line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const bool param = key.rfind("alpha.", 0) == 0 || key.rfind("beta.", 0) == 0 || key.rfind("d.", 0) == 0 ||
                       key.rfind("sigma2.", 0) == 0;
    if (!param) continue;
    double v = 0.0;
    if (!parse_number(t.substr(eq + 1), v) || !std::isfinite(v))
      throw ValidationError("params line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    if (!kv.emplace(key, v).second) throw ValidationError("params: duplicate key '" + key + "'");
  }
  std::size_t used = 0;
  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError("params: missing '" + key + "'");
    ++used;
    return it->second;
  };
  ModelParams par;
  par.gnar = GnarParams::zeros(n, order, Mode::individual);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) par.gnar.alpha(i, j) = take("alpha." + std::to_string(i + 1) + "." + std::to_string(j + 1));
  for (int j = 0; j < p; ++j)
    for (int r = 0; r < order.s[j]; ++r)
      for (int c = 0; c < order.C; ++c)
        par.gnar.beta[j][r][c] =
            take("beta." + std::to_string(j + 1) + "." + std::to_string(r + 1) + "." + std::to_string(c + 1));
  par.d.resize(n);
  par.sigma2.resize(n);
  for (int i = 0; i < n; ++i) par.d[i] = take("d." + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) par.sigma2[i] = take("sigma2." + std::to_string(i + 1));
  if (used != kv.size()) throw ValidationError("params: entries do not match the order or node count");
  return par;
}

ModelParams read_params_file(const std::string& path, int n, const GnarOrder& order) {
  std::ifstream in = open_or_throw(path);
  return parse_params(in, n, order);
}

Metric parse_metric(const std::string& s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "greatcircle") return Metric::greatcircle;
  throw ValidationError("unknown metric '" + s + "' (euclidean|greatcircle)");
}

WeightScheme parse_weight_scheme(const std::string& s) {
  if (s == "equal") return WeightScheme::equal;
  if (s == "inverse_distance") return WeightScheme::inverse_distance;
  throw ValidationError("unknown weight scheme '" + s + "' (equal|inverse_distance)");
}

}  // namespace memnet
