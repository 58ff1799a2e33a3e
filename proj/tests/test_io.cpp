#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "memnet/autocov.hpp"
#include "memnet/io.hpp"
#include "memnet/simulate.hpp"

using namespace memnet;

namespace {

SeriesPanel read(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return parse_series(in, opts);
}

IngestOptions interp() {
  IngestOptions o;
  o.policy = MissingPolicy::interpolate;
  return o;
}

}  // namespace

TEST(GraphFile, ParseAndRoundTrip) {
  std::istringstream in("# comment\nN 4\n\n1 2\n2 3 \n4 1\n");
  const Graph g = parse_graph(in);
  EXPECT_EQ(g.num_nodes(), 4);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_TRUE(g.has_edge(0, 3));
  EXPECT_FALSE(g.has_distances());
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream back(out.str());
  EXPECT_EQ(parse_graph(back).edges(), g.edges());
}

TEST(GraphFile, Distances) {
  std::istringstream in("N 3\n1 2 0.5\n2 3 2\n");
  const Graph g = parse_graph(in);
  ASSERT_TRUE(g.has_distances());
  EXPECT_DOUBLE_EQ(*g.distance(1, 0), 0.5);
  std::ostringstream out;
  write_graph(out, g);
  EXPECT_EQ(out.str(), "N 3\n1 2 0.5\n2 3 2\n");
}

TEST(GraphFile, Errors) {
  for (const char* bad : {"", "M 3\n", "N 0\n", "N 3 4\n", "N 3\n1\n", "N 3\n1 4\n", "N 3\n1 1\n",
                          "N 3\n1 2\n2 1\n", "N 3\n1 2 -1\n", "N 3\n1 2 x\n", "N 3\n1 2 1\n2 3\n",
                          "N 3\n1.5 2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_graph(in), ValidationError) << bad;
  }
  EXPECT_THROW(read_graph_file("/nonexistent/g.graph"), ValidationError);
}

TEST(GraphFile, FixturesMatchBuiltins) {
  for (const char* name : {"fivenet", "tennet"}) {
    const Graph f = read_graph_file(std::string(MEMNET_FIXTURES_DIR) + "/" + name + ".graph");
    const Graph b = builtin_graph(name);
    EXPECT_EQ(f.num_nodes(), b.num_nodes()) << name;
    EXPECT_EQ(f.edges(), b.edges()) << name;
  }
}

TEST(Coords, ParseAnyOrder) {
  std::istringstream in("node,x,y\n2,1.5,-2\n1,0,0\n3,4e1,7\n");
  const Coords c = parse_coords(in, 3);
  EXPECT_EQ(c[0], std::make_pair(0.0, 0.0));
  EXPECT_EQ(c[1], std::make_pair(1.5, -2.0));
  EXPECT_EQ(c[2], std::make_pair(40.0, 7.0));
}

TEST(Coords, Errors) {
  auto parse = [](const char* s, int n) {
    std::istringstream in(s);
    return parse_coords(in, n);
  };
  EXPECT_THROW(parse("id,x,y\n1,0,0\n", 1), MalformedCsv);
  EXPECT_THROW(parse("node,x,y\n1,0\n", 1), MalformedCsv);
  EXPECT_THROW(parse("node,x,y\n2,0,0\n", 1), MalformedCsv);
  EXPECT_THROW(parse("node,x,y\n1,0,0\n1,1,1\n", 2), DuplicateCoordinates);
  EXPECT_THROW(parse("node,x,y\n1,0,0\n", 2), MissingCoordinates);
}

TEST(Series, CompleteFileLoadsUnchanged) {
  const SeriesPanel p = read("a,b\n1,2\n3,4.5\n-1e-3,0\n");
  EXPECT_EQ(p.labels, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(p.T(), 3);
  MatrixXd want(3, 2);
  want << 1, 2, 3, 4.5, -1e-3, 0;
  EXPECT_EQ(p.values, want);
  // Interpolate is the identity on complete data too.
  EXPECT_EQ(read("a,b\n1,2\n3,4.5\n-1e-3,0\n", interp()).values, want);
}

TEST(Series, InteriorGapIsLinear) {
  const SeriesPanel p = read("a\n1\nNA\n3\n", interp());
  EXPECT_DOUBLE_EQ(p.values(1, 0), 2.0);
  const SeriesPanel q = read("a,b\n0,5\n,5\nNaN,5\n6,5\n", interp());
  EXPECT_DOUBLE_EQ(q.values(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(q.values(2, 0), 4.0);
  EXPECT_EQ(q.values.col(1), VectorXd::Constant(4, 5.0));
}

TEST(Series, GapPolicies) {
  EXPECT_THROW(read("a\n1\nNA\n3\n"), MalformedCsv);
  EXPECT_THROW(read("a\nNA\n2\n3\n", interp()), LeadingGap);
  EXPECT_THROW(read("a\n1\n2\n\"\"\n", interp()), TrailingGap);
  EXPECT_THROW(read("a\nNA\nNA\n", interp()), LeadingGap);
}

TEST(Series, MalformedInput) {
  EXPECT_THROW(read(""), MalformedCsv);
  EXPECT_THROW(read("a,b\n"), MalformedCsv);
  EXPECT_THROW(read("a,b\n1,2,3\n"), MalformedCsv);
  EXPECT_THROW(read("a,\n1,2\n"), MalformedCsv);
  EXPECT_THROW(read("a\n1x\n"), MalformedCsv);
  EXPECT_THROW(read("a\ninf\n"), MalformedCsv);
  EXPECT_THROW(read("\"a\n1\n"), MalformedCsv);
  EXPECT_THROW(ingest_series("/nonexistent/s.csv"), ValidationError);
}

TEST(Series, QuotedLabelsAndCrlf) {
  const SeriesPanel p = read("\"x, y\",\"z\"\"\"\r\n1,2\r\n");
  EXPECT_EQ(p.labels, (std::vector<std::string>{"x, y", "z\""}));
  EXPECT_EQ(p.values(0, 1), 2.0);
}

TEST(Series, LogThenDemean) {
  IngestOptions o = interp();
  o.log = true;
  o.demean = true;
  const SeriesPanel p = read("a,b\n1,10\nNA,10\n" + std::to_string(std::exp(2.0)) + ",10\n", o);
  EXPECT_NEAR(p.values.col(0).sum(), 0.0, 1e-12);
  // Imputation happens on the raw scale, before the log.
  const double mid = std::log(0.5 * (1 + std::exp(2.0)));
  const double mean = (0.0 + mid + 2.0) / 3.0;
  EXPECT_NEAR(p.values(0, 0), -mean, 1e-6);
  EXPECT_NEAR(p.values(1, 0), mid - mean, 1e-6);
  EXPECT_EQ(p.values.col(1), VectorXd::Zero(3));
  IngestOptions l;
  l.log = true;
  EXPECT_THROW(read("a\n1\n0\n", l), ValidationError);
}

TEST(Series, WriteReadRoundTripIsExact) {
  MatrixXd x(3, 2);
  x << 0.1, -1.0 / 3.0, 1e-300, 123456789.123456789, std::nextafter(1.0, 2.0), -0.0;
  const SeriesPanel p(x, {"u", "v"});
  std::ostringstream out;
  write_series(out, p);
  const SeriesPanel q = read(out.str());
  EXPECT_EQ(q.labels, p.labels);
  EXPECT_EQ(q.values, p.values);
}

TEST(Series, PolicyParsing) {
  EXPECT_EQ(parse_missing_policy("strict"), MissingPolicy::strict);
  EXPECT_EQ(parse_missing_policy("interpolate"), MissingPolicy::interpolate);
  EXPECT_THROW(parse_missing_policy("drop"), ValidationError);
}

TEST(AcvCsv, LongFormat) {
  Autocov a(2, 1);
  a[0] << 1, 0.5, 0.5, 2;
  a[1] << 0.25, 0, 0.125, 0.75;
  std::ostringstream out;
  write_acv(out, a);
  EXPECT_EQ(out.str(),
            "h,i,k,value\n0,1,1,1\n0,1,2,0.5\n0,2,1,0.5\n0,2,2,2\n"
            "1,1,1,0.25\n1,1,2,0\n1,2,1,0.125\n1,2,2,0.75\n");
}

TEST(Params, ReadsFitReport) {
  const Preset pr = dgp_preset("DGP3", "fivenet");
  FitResult res;
  res.theta = pr.params;
  const std::string report = fit_report(Model(pr.spec, pr.graph), res);
  std::istringstream in(report);
  const ModelParams par = parse_params(in, 5, pr.spec.order);
  EXPECT_TRUE(par.gnar.alpha.isApprox(pr.params.gnar.alpha));
  EXPECT_DOUBLE_EQ(par.gnar.beta[0][0][0], 0.4);
  EXPECT_TRUE(par.d.isApprox(pr.params.d));
  EXPECT_EQ(par.sigma2, VectorXd::Ones(5));
}

TEST(Params, Errors) {
  GnarOrder o;
  auto parse = [&](const std::string& s, int n) {
    std::istringstream in(s);
    return parse_params(in, n, o);
  };
  const std::string ok = "alpha.1.1=0.3\nbeta.1.1.1=0.1\nd.1=0.2\nsigma2.1=1\n";
  EXPECT_DOUBLE_EQ(parse(ok + "loglik=-3\n", 1).d[0], 0.2);
  EXPECT_THROW(parse("alpha.1.1=0.3\nd.1=0.2\nsigma2.1=1\n", 1), ValidationError);
  EXPECT_THROW(parse(ok + "d.1=0.3\n", 1), ValidationError);
  EXPECT_THROW(parse(ok + "d.2=0.3\n", 1), ValidationError);
  EXPECT_THROW(parse("alpha.1.1=x\n", 1), ValidationError);
  EXPECT_THROW(parse("alpha.1.1\n", 1), ValidationError);
}

TEST(Parsing, MetricAndWeights) {
  EXPECT_EQ(parse_metric("greatcircle"), Metric::greatcircle);
  EXPECT_EQ(parse_weight_scheme("inverse_distance"), WeightScheme::inverse_distance);
  EXPECT_THROW(parse_metric("manhattan"), ValidationError);
  EXPECT_THROW(parse_weight_scheme("none"), ValidationError);
}

TEST(FormatDouble, Shortest) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
