#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memnet/autocov.hpp"
#include "memnet/fracdiff.hpp"
#include "memnet/simulate.hpp"
#include "oracles.hpp"
#include "test_models.hpp"

using namespace memnet;
using namespace testmodels;

namespace {

SimConfig truncated(std::uint64_t seed, int J = 2000, int burn = 5000) {
  SimConfig c;
  c.seed = seed;
  c.filter_order = J;
  c.burn_in = burn;
  return c;
}

// Exact variance of sum_t x_t^2 / T for a zero-mean Gaussian scalar series.
double var_of_mean_square(const std::vector<double>& g, int T) {
  double s = T * g[0] * g[0];
  for (int h = 1; h < T; ++h) s += 2.0 * (T - h) * g[h] * g[h];
  return 2.0 * s / (static_cast<double>(T) * T);
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

}  // namespace

TEST(Simulate, SameSeedIsBitIdentical) {
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const Model m(pr.spec, pr.graph);
  for (SimMethod method : {SimMethod::truncated, SimMethod::exact}) {
    SimConfig c = truncated(42);
    c.method = method;
    const SeriesPanel a = simulate_model(m, pr.params, 150, c);
    const SeriesPanel b = simulate_model(m, pr.params, 150, c);
    EXPECT_TRUE((a.values.array() == b.values.array()).all());
    c.seed = 43;
    EXPECT_FALSE((simulate_model(m, pr.params, 150, c).values.array() == a.values.array()).all());
  }
}

TEST(Simulate, NoMemoryModelsIdentical) {
  const FilterMatrices A = gnar11(five_net(), 0.35, 0.2);
  const VectorXd d = VectorXd::Zero(5), s2 = VectorXd::Ones(5);
  const SeriesPanel f = simulate_fignar(A, d, s2, 300, truncated(5));
  const SeriesPanel g = simulate_gnarfi(A, d, s2, 300, truncated(5));
  EXPECT_TRUE((f.values.array() == g.values.array()).all());
}

TEST(Simulate, GlobalMemoryOperatorsCommute) {
  const FilterMatrices A = gnar11(five_net(), 0.35, 0.2);
  const VectorXd d = VectorXd::Constant(5, 0.3), s2 = VectorXd::Ones(5);
  for (int J : {0, 500}) {
    const SeriesPanel f = simulate_fignar(A, d, s2, 400, truncated(6, J, 2000));
    const SeriesPanel g = simulate_gnarfi(A, d, s2, 400, truncated(6, J, 2000));
    EXPECT_LT((f.values - g.values).cwiseAbs().maxCoeff(), 1e-9) << J;
  }
}

TEST(Simulate, NoFilterReducesToFiwn) {
  const VectorXd d = dgp1_d(), s2 = VectorXd::Ones(5);
  const SeriesPanel a = simulate_fiwn(d, s2, 200, truncated(7));
  const SeriesPanel b = simulate_gnarfi({MatrixXd::Zero(5, 5)}, d, s2, 200, truncated(7));
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
}

TEST(Simulate, WhiteNoiseHasNoLagOneCorrelation) {
  const SeriesPanel x = simulate_fiwn(VectorXd::Zero(3), VectorXd::Ones(3), 20000, truncated(8));
  for (int i = 0; i < 3; ++i) {
    const VectorXd c = x.values.col(i);
    const double r1 = c.head(19999).dot(c.tail(19999)) / c.squaredNorm();
    EXPECT_LT(std::abs(r1), 4.0 / std::sqrt(20000.0));
  }
}

TEST(Simulate, ScalarFiwnVarianceTruncated) {
  const int T = 100000;
  const SeriesPanel x = simulate_fiwn(VectorXd::Constant(1, 0.25), VectorXd::Ones(1), T, truncated(9));
  const double want = std::tgamma(0.5) / std::pow(std::tgamma(0.75), 2);
  const double se = std::sqrt(var_of_mean_square(fiwn_cross_acv_seq(0.25, 0.25, T), T));
  EXPECT_NEAR(x.values.squaredNorm() / T, want, 3.0 * se);
}

TEST(Simulate, ExactAndTruncatedMatchVariance) {
  const int T = 400, K = 30;
  const std::vector<double> g = fiwn_cross_acv_seq(0.3, 0.3, T);
  const double se = std::sqrt(var_of_mean_square(g, T) / K);
  for (SimMethod method : {SimMethod::exact, SimMethod::truncated}) {
    double mean = 0.0;
    for (int k = 0; k < K; ++k) {
      SimConfig c = truncated(1000 + k);
      c.method = method;
      mean += simulate_fiwn(VectorXd::Constant(1, 0.3), VectorXd::Ones(1), T, c).values.squaredNorm() / T;
    }
    mean /= K;
    // Truncation at J=2000 removes a small part of the variance.
    EXPECT_NEAR(mean, g[0], 3.0 * se + 0.01) << to_string(method);
  }
}

TEST(Simulate, GaussianDrawHasModelCovariance) {
  Autocov acv(2, 2);
  acv[0] << 2.0, 0.6, 0.6, 1.0;
  acv[1] << 0.8, 0.3, 0.1, 0.4;
  acv[2] << 0.3, 0.1, 0.05, 0.1;
  const MatrixXd S = oracle::dense_sigma(acv, 3);
  Rng rng(10);
  const int K = 40000;
  MatrixXd C = MatrixXd::Zero(6, 6);
  for (int k = 0; k < K; ++k) {
    const VectorXd x = simulate_gaussian(acv, 3, rng).stacked();
    C += x * x.transpose();
  }
  C /= K;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const double se = std::sqrt((S(a, a) * S(b, b) + S(a, b) * S(a, b)) / K);
      EXPECT_NEAR(C(a, b), S(a, b), 4.0 * se) << a << "," << b;
    }
}

TEST(Simulate, FractionalIntegrateMatchesDirectSum) {
  Rng rng(11);
  MatrixXd y(60, 2);
  for (int t = 0; t < 60; ++t)
    for (int i = 0; i < 2; ++i) y(t, i) = rng.normal();
  VectorXd d(2);
  d << 0.0, 0.35;
  const MatrixXd x = fractional_integrate(y, d, 25);
  EXPECT_TRUE((x.col(0).array() == y.col(0).array()).all());
  const std::vector<double> psi = fracint_coeffs(0.35, 25);
  for (int t = 0; t < 60; ++t) {
    double want = 0.0;
    for (int j = 0; j <= std::min(t, 25); ++j) want += psi[j] * y(t - j, 1);
    EXPECT_NEAR(x(t, 1), want, 1e-12);
  }
}

TEST(Simulate, LongerMemoryDecaysSlower) {
  const Preset pr = dgp_preset("DGP1", "fivenet");
  const Model m(pr.spec, pr.graph);
  std::vector<double> acf(5, 0.0);
  for (int rep = 0; rep < 20; ++rep) {
    const SeriesPanel x = simulate_model(m, pr.params, 500, truncated(200 + rep));
    for (int i = 0; i < 5; ++i) {
      VectorXd c = x.values.col(i);
      c.array() -= c.mean();
      acf[i] += c.head(480).dot(c.tail(480)) / c.squaredNorm();
    }
  }
  const std::vector<double> d(pr.params.d.data(), pr.params.d.data() + 5);
  const std::vector<double> rd = ranks(d), ra = ranks(acf);
  double num = 0.0;
  for (int i = 0; i < 5; ++i) num += (rd[i] - 2.0) * (ra[i] - 2.0);
  EXPECT_GT(num, 0.0);
}

TEST(Simulate, Errors) {
  const FilterMatrices explosive = gnar11(five_net(), 0.9, 0.5);
  EXPECT_THROW(simulate_fignar(explosive, dgp1_d(), VectorXd::Ones(5), 50, truncated(1)), NotStationary);
  EXPECT_THROW(simulate_gnarfi(gnar11(five_net(), 0.3, 0.2), dgp1_d(), VectorXd::Ones(4), 50, truncated(1)),
               DimensionMismatch);
  SimConfig bad = truncated(1);
  bad.burn_in = -1;
  EXPECT_THROW(simulate_fiwn(dgp1_d(), VectorXd::Ones(5), 50, bad), ValidationError);
  EXPECT_THROW(parse_sim_method("bootstrap"), ValidationError);
  EXPECT_EQ(parse_sim_method("truncated_filter"), SimMethod::truncated);
}

TEST(SimulateFivar, ReproducibleAndValidated) {
  MatrixXd A(2, 2);
  A << 0.4, 0.1, 0.2, 0.3;
  MatrixXd Q(2, 2);
  Q << 1.0, 0.5, 0.5, 1.0;
  VectorXd d(2);
  d << 0.2, 0.4;
  const SeriesPanel a = simulate_fivar(A, d, Q, 100, truncated(3));
  EXPECT_TRUE((a.values.array() == simulate_fivar(A, d, Q, 100, truncated(3)).values.array()).all());
  EXPECT_THROW(simulate_fivar(MatrixXd::Identity(2, 2), d, Q, 100, truncated(3)), NotStationary);
  Q(0, 1) = Q(1, 0) = 2.0;
  EXPECT_THROW(simulate_fivar(A, d, Q, 100, truncated(3)), ValidationError);
}

TEST(Presets, Dgp1) {
  const Preset pr = dgp_preset("dgp1", "fiveNet");
  EXPECT_EQ(pr.name, "DGP1");
  EXPECT_NEAR(stationarity_margin(pr.params.gnar, pr.spec.order), 0.55, 1e-15);
  EXPECT_TRUE(pr.params.d.isApprox(dgp1_d()));
  EXPECT_TRUE((pr.params.sigma2.array() == 1.0).all());
  EXPECT_EQ(param_count(pr.spec, 5), 12);
}

TEST(Presets, Dgp2FlatMemory) {
  const Preset pr = dgp_preset("DGP2", "fivenet");
  EXPECT_TRUE((pr.params.d.array() == 0.25).all());
  EXPECT_EQ(pr.spec.d_mode, Mode::global);
}

TEST(Presets, Dgp3) {
  const Preset pr = dgp_preset("DGP3", "fivenet");
  EXPECT_EQ(pr.params.gnar.alpha(0, 0), -0.4);
  EXPECT_EQ(pr.params.gnar.beta[0][0][0], 0.4);
  EXPECT_NEAR(std::abs(pr.params.gnar.alpha(0, 0)) + pr.params.gnar.beta[0][0][0], 0.8, 1e-15);
  EXPECT_NEAR(stationarity_margin(pr.params.gnar, pr.spec.order), 0.8, 1e-15);
  EXPECT_EQ(pr.spec.alpha_mode, Mode::individual);
}

TEST(Presets, TenNet) {
  const Preset pr = dgp_preset("DGP3", "tennet");
  EXPECT_EQ(pr.graph.num_nodes(), 10);
  EXPECT_NEAR(pr.params.d[9], 0.45, 1e-15);
  EXPECT_NEAR(pr.params.d[0], 0.05, 1e-15);
  EXPECT_LT(stationarity_margin(pr.params.gnar, pr.spec.order), 1.0);
}

TEST(Presets, Unknown) {
  EXPECT_THROW(dgp_preset("DGP4", "fivenet"), UnknownPreset);
  EXPECT_THROW(dgp_preset("DGP1", "twentynet"), UnknownPreset);
  EXPECT_EQ(builtin_graph("fivenet").num_edges(), 5u);
}
