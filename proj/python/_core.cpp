#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memnet/errors.hpp"
#include "memnet/estimate.hpp"
#include "memnet/experiments.hpp"
#include "memnet/forecast.hpp"
#include "memnet/fracdiff.hpp"
#include "memnet/io.hpp"
#include "memnet/select.hpp"
#include "memnet/simulate.hpp"

namespace py = pybind11;
using namespace memnet;

namespace {

py::array_t<double> acv_array(const Autocov& a) {
  const int H = a.max_lag(), n = a.dim();
  py::array_t<double> out({H + 1, n, n});
  auto r = out.mutable_unchecked<3>();
  for (int h = 0; h <= H; ++h)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) r(h, i, k) = a[h](i, k);
  return out;
}

ModelSpec make_spec(const std::string& model, const std::string& order, const std::string& alpha,
                    const std::string& d_mode, const std::string& sigma_mode, const std::string& estimation,
                    const std::string& weights) {
  ModelSpec s;
  s.kind = parse_kind(model);
  s.order = parse_order(order);
  s.alpha_mode = parse_mode(alpha);
  s.d_mode = parse_mode(d_mode);
  s.sigma_mode = parse_mode(sigma_mode);
  s.estimation = parse_estimation(estimation);
  s.scheme = parse_weight_scheme(weights);
  s.validate();
  return s;
}

FitOptions fit_options(int max_iter, double tol, const std::string& logdet) {
  FitOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  if (logdet == "spline") {
    o.lik.det = DetMethod::spline;
  } else if (logdet != "exact") {
    throw ValidationError("unknown logdet '" + logdet + "' (exact|spline)");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Long-memory network time series models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)base;

  py::class_<Graph>(m, "Graph")
      .def(py::init<int>(), py::arg("num_nodes"))
      .def("add_edge", &Graph::add_edge, py::arg("i"), py::arg("j"), py::arg("distance") = py::none())
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("edges", &Graph::edges)
      .def("has_edge", &Graph::has_edge)
      .def("distance", &Graph::distance)
      .def("__repr__", [](const Graph& g) {
        return "<Graph N=" + std::to_string(g.num_nodes()) + " edges=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("builtin_graph", &builtin_graph, py::arg("name"));
  m.def("fully_connected", &fully_connected, py::arg("n"));
  m.def(
      "mst_from_coords",
      [](const std::vector<std::pair<double, double>>& c, const std::string& metric) {
        return mst_from_coords(c, parse_metric(metric));
      },
      py::arg("coords"), py::arg("metric") = "euclidean");
  m.def("read_graph", &read_graph_file, py::arg("path"));

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_spec), py::arg("model") = "fignar", py::arg("order") = "(1,[1])",
           py::arg("alpha") = "global", py::arg("d_mode") = "individual", py::arg("sigma_mode") = "individual",
           py::arg("estimation") = "exact", py::arg("weights") = "equal")
      .def_property_readonly("label", &ModelSpec::label)
      .def_property_readonly("order", [](const ModelSpec& s) { return s.order.label(); })
      .def("param_count", [](const ModelSpec& s, int n) { return param_count(s, n); })
      .def("__repr__", &ModelSpec::label);

  py::class_<ModelParams>(m, "Params")
      .def(py::init([](const Eigen::MatrixXd& alpha, std::vector<std::vector<std::vector<double>>> beta,
                       const Eigen::VectorXd& d, const Eigen::VectorXd& sigma2, const std::string& alpha_mode) {
             ModelParams p;
             p.gnar.alpha = alpha;
             p.gnar.beta = std::move(beta);
             p.gnar.alpha_mode = parse_mode(alpha_mode);
             p.d = d;
             p.sigma2 = sigma2;
             return p;
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("d"), py::arg("sigma2"), py::arg("alpha_mode") = "global")
      .def_property(
          "alpha", [](const ModelParams& p) { return p.gnar.alpha; },
          [](ModelParams& p, const Eigen::MatrixXd& a) { p.gnar.alpha = a; })
      .def_property(
          "beta", [](const ModelParams& p) { return p.gnar.beta; },
          [](ModelParams& p, std::vector<std::vector<std::vector<double>>> b) { p.gnar.beta = std::move(b); })
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("sigma2", &ModelParams::sigma2);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::theta)
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("M", &FitResult::M)
      .def_readonly("T", &FitResult::T)
      .def_readonly("bic", &FitResult::bic)
      .def_readonly("aic", &FitResult::aic)
      .def_readonly("m_trunc", &FitResult::m_trunc);

  py::class_<Model>(m, "Model")
      .def(py::init<ModelSpec, const Graph&>(), py::arg("spec"), py::arg("graph"))
      .def_property_readonly("spec", &Model::spec)
      .def_property_readonly("N", &Model::N)
      .def(
          "acv", [](const Model& self, const ModelParams& p, int H) { return acv_array(self.acv(p, H)); },
          py::arg("params"), py::arg("max_lag"))
      .def(
          "simulate",
          [](const Model& self, const ModelParams& p, int T, std::uint64_t seed, const std::string& method) {
            SimConfig c;
            c.seed = seed;
            c.method = parse_sim_method(method);
            return simulate_model(self, p, T, c).values;
          },
          py::arg("params"), py::arg("T"), py::arg("seed") = 1, py::arg("method") = "exact")
      .def(
          "negloglik",
          [](const Model& self, const ModelParams& p, const Eigen::MatrixXd& x) {
            return negloglik(self, p, SeriesPanel(x));
          },
          py::arg("params"), py::arg("data"))
      .def(
          "fit",
          [](const Model& self, const Eigen::MatrixXd& x, std::optional<ModelParams> init, int max_iter, double tol,
             const std::string& logdet) {
            py::gil_scoped_release release;
            return fit(self, SeriesPanel(x), init, fit_options(max_iter, tol, logdet));
          },
          py::arg("data"), py::arg("init") = py::none(), py::arg("max_iter") = 500, py::arg("tol") = 1e-7,
          py::arg("logdet") = "exact")
      .def(
          "report", [](const Model& self, const FitResult& r) { return fit_report(self, r); }, py::arg("result"))
      .def(
          "forecast",
          [](const Model& self, const ModelParams& p, const Eigen::MatrixXd& x, int h, const std::string& method) {
            return forecast(self, p, SeriesPanel(x), h, parse_forecast_method(method)).pred;
          },
          py::arg("params"), py::arg("data"), py::arg("horizon") = 1, py::arg("method") = "ef");

  m.def(
      "preset",
      [](const std::string& name, const std::string& graph, const std::string& model) {
        Preset p = dgp_preset(name, graph);
        p.spec.kind = parse_kind(model);
        return py::make_tuple(Model(p.spec, p.graph), p.params);
      },
      py::arg("name"), py::arg("graph") = "fivenet", py::arg("model") = "fignar");

  m.def(
      "ingest_series",
      [](const std::string& path, const std::string& missing, bool demean, bool log) {
        IngestOptions o;
        o.policy = parse_missing_policy(missing);
        o.demean = demean;
        o.log = log;
        SeriesPanel s = ingest_series(path, o);
        return py::make_tuple(s.values, s.labels);
      },
      py::arg("path"), py::arg("missing") = "strict", py::arg("demean") = false, py::arg("log") = false);

  m.def("frac_coeffs", py::overload_cast<double, int>(&frac_coeffs), py::arg("d"), py::arg("J"));
  m.def(
      "fiwn_acv",
      [](const Eigen::VectorXd& d, const Eigen::VectorXd& s2, int H) { return acv_array(fiwn_acv(d, s2, H)); },
      py::arg("d"), py::arg("sigma2"), py::arg("max_lag"));
  m.def("mspe", &mspe, py::arg("pred"), py::arg("actual"));

  m.def(
      "select",
      [](const Eigen::MatrixXd& x, const Graph& g, std::vector<std::string> kinds, std::vector<std::string> orders,
         const std::string& criterion, int max_iter, int threads) {
        std::vector<ModelKind> ks;
        for (const auto& k : kinds) ks.push_back(parse_kind(k));
        std::vector<GnarOrder> os;
        for (const auto& o : orders) os.push_back(parse_order(o));
        if (os.empty()) os = standard_orders();
        GridOptions go;
        go.criterion = parse_criterion(criterion);
        go.fit.max_iter = max_iter;
        go.threads = threads;
        py::gil_scoped_release release;
        return grid_search(SeriesPanel(x), make_grid(ks, os, {Mode::global}, g), go).csv();
      },
      py::arg("data"), py::arg("graph"), py::arg("kinds") = std::vector<std::string>{"fignar", "gnarfi"},
      py::arg("orders") = std::vector<std::string>{}, py::arg("criterion") = "bic", py::arg("max_iter") = 500,
      py::arg("threads") = 1);

  m.def("table_ids", &table_ids);
  m.def(
      "reproduce",
      [](const std::string& table, const std::string& scale, int replicates, std::vector<int> lengths,
         std::uint64_t seed, int max_iter, int threads) {
        ReproduceOptions o;
        o.scale = parse_scale(scale);
        o.replicates = replicates;
        o.lengths = std::move(lengths);
        o.seed = seed;
        o.fit.max_iter = max_iter;
        o.threads = threads;
        ReproducedTable t;
        {
          py::gil_scoped_release release;
          t = reproduce(table, o);
        }
        py::list rows;
        for (const auto& c : t.cells) {
          py::dict d;
          d["row"] = c.row;
          d["column"] = c.column;
          d["computed"] = c.computed ? py::cast(*c.computed) : py::none();
          d["reference"] = c.reference ? py::cast(*c.reference) : py::none();
          d["computed_flag"] = c.computed_flag;
          d["reference_flag"] = c.reference_flag;
          d["replicates"] = c.replicates;
          d["failed"] = c.failed;
          rows.append(d);
        }
        return rows;
      },
      py::arg("table"), py::arg("scale") = "desk", py::arg("replicates") = 0, py::arg("lengths") = std::vector<int>{},
      py::arg("seed") = 1, py::arg("max_iter") = 500, py::arg("threads") = 1);
}
