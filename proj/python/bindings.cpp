#include "urbanembed/core/ops.hpp"
#include "urbanembed/data/generator.hpp"
#include "urbanembed/error.hpp"
#include "urbanembed/eval/clustering.hpp"
#include "urbanembed/eval/lasso.hpp"
#include "urbanembed/eval/regression.hpp"
#include "urbanembed/graph/graphs.hpp"
#include "urbanembed/model/benchmark.hpp"
#include "urbanembed/train/model.hpp"
#include "urbanembed/train/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace urbanembed;

namespace {

Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2, Eigen::RowMajor> trips_array(const TripSet& trips) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2, Eigen::RowMajor> out(static_cast<Eigen::Index>(trips.size()), 2);
  for (std::size_t k = 0; k < trips.size(); ++k) {
    out(static_cast<Eigen::Index>(k), 0) = static_cast<std::int64_t>(trips.trips[k].origin);
    out(static_cast<Eigen::Index>(k), 1) = static_cast<std::int64_t>(trips.trips[k].destination);
  }
  return out;
}

py::dict loss_dict(const LossRecord& r) {
  py::dict d;
  d["epoch"] = r.epoch;
  d["l_odp"] = r.odp;
  d["l_fp"] = r.fp;
  d["l_sp"] = r.sp;
  d["total"] = r.total;
  d["raw_odp"] = r.raw_odp;
  d["raw_fp"] = r.raw_fp;
  d["raw_sp"] = r.raw_sp;
  return d;
}

py::dict params_dict(const ParameterSet& params) {
  py::dict d;
  for (const Parameter& p : params.items()) d[py::str(p.name)] = p.value.matrix();
  return d;
}

}  // namespace

PYBIND11_MODULE(urbanembed, m) {
  m.doc() = "Multi-view urban region embedding with graph cleansing, cosine attention and memory fusion";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("soft_threshold", py::overload_cast<double, double>(&soft_threshold), py::arg("x"), py::arg("tau"));
  m.def("soft_threshold_matrix", py::overload_cast<const Matrix&, double>(&soft_threshold), py::arg("x"),
        py::arg("tau"));
  m.def(
      "softmax", [](const std::vector<double>& x) { return softmax(x); }, py::arg("x"));
  m.def(
      "cosine_sim", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine_sim(a, b); },
      py::arg("a"), py::arg("b"));
  m.def("pairwise_cosine", &pairwise_cosine, py::arg("rows"));

  py::class_<CityConfig>(m, "CityConfig")
      .def(py::init<>())
      .def_readwrite("n_regions", &CityConfig::n_regions)
      .def_readwrite("n_districts", &CityConfig::n_districts)
      .def_readwrite("n_poi_categories", &CityConfig::n_poi_categories)
      .def_readwrite("n_checkin_categories", &CityConfig::n_checkin_categories)
      .def_readwrite("n_trips", &CityConfig::n_trips)
      .def_readwrite("noise_level", &CityConfig::noise_level)
      .def_readwrite("seed", &CityConfig::seed)
      .def_readwrite("deterministic_trips", &CityConfig::deterministic_trips);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_regions", &Dataset::n_regions)
      .def_property_readonly("region_ids", [](const Dataset& d) { return d.regions.ids; })
      .def_property_readonly("districts", [](const Dataset& d) { return d.regions.districts; })
      .def_property_readonly("trips", [](const Dataset& d) { return trips_array(d.trips); })
      .def_property_readonly("poi", [](const Dataset& d) { return d.poi.counts; })
      .def_property_readonly("checkins", [](const Dataset& d) { return d.checkins.counts; })
      .def_property_readonly("checkin_total", [](const Dataset& d) { return d.targets.checkin_total; })
      .def_property_readonly("crime_count", [](const Dataset& d) { return d.targets.crime_count; })
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("generate_city", &generate_city, py::arg("config") = CityConfig{});
  m.def(
      "load_dataset", [](const std::filesystem::path& dir) { return load_dataset(DatasetPaths::in_directory(dir)); },
      py::arg("directory"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("directory"));

  m.def(
      "build_graphs",
      [](const Dataset& data) {
        const GraphSet g = build_graphs(data);
        py::dict out;
        for (View v : kAllViews) out[view_tag(v)] = g[v].weights;
        out["trip_counts"] = g.trip_counts;
        return out;
      },
      py::arg("dataset"));

  py::enum_<Ablation>(m, "Ablation")
      .value("NONE", Ablation::None)
      .value("NO_GRAPH_CLEANSING", Ablation::NoGraphCleansing)
      .value("PLAIN_ATTENTION", Ablation::PlainAttention)
      .value("SELF_ATTENTION_FUSION", Ablation::SelfAttentionFusion)
      .value("NO_DUAL_STAGE_FUSION", Ablation::NoDualStageFusion);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("weight_decay", &TrainConfig::weight_decay)
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("heads", &TrainConfig::heads)
      .def_readwrite("memory", &TrainConfig::memory)
      .def_readwrite("beta", &TrainConfig::beta)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("normalize_losses", &TrainConfig::normalize_losses)
      .def_readwrite("fusion_sum_views", &TrainConfig::fusion_sum_views)
      .def_readwrite("ablation", &TrainConfig::ablation);

  m.def(
      "train",
      [](const Dataset& data, const TrainConfig& config) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(data, config);
        }
        py::dict out;
        out["embedding"] = r.embedding;
        py::list views;
        for (const Matrix& v : r.views) views.append(v);
        out["views"] = views;
        py::list log;
        for (const LossRecord& rec : r.log) log.append(loss_dict(rec));
        out["log"] = log;
        out["params"] = params_dict(r.params);
        return out;
      },
      py::arg("dataset"), py::arg("config") = TrainConfig{});
  m.def(
      "init_params", [](const TrainConfig& c, std::size_t n) { return params_dict(init_params(c, n)); },
      py::arg("config"), py::arg("n_regions"));

  m.def(
      "kmeans",
      [](const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t restarts) {
        KMeansOptions o;
        o.restarts = restarts;
        const KMeansResult r = kmeans(points, k, seed, o);
        py::dict out;
        out["assignments"] = r.assignments;
        out["centroids"] = r.centroids;
        out["inertia"] = r.inertia;
        out["iterations"] = r.iterations;
        out["inertia_history"] = r.inertia_history;
        return out;
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10);
  m.def(
      "nmi", [](const std::vector<int>& a, const std::vector<int>& b) { return nmi(a, b); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "ari", [](const std::vector<int>& a, const std::vector<int>& b) { return ari(a, b); }, py::arg("a"),
      py::arg("b"));

  m.def(
      "lasso_fit",
      [](const Matrix& x, const Vector& y, double l1_weight) {
        const LassoModel model = lasso_fit(x, y, l1_weight);
        py::dict out;
        out["coefficients"] = model.coefficients;
        out["intercept"] = model.intercept;
        out["converged"] = model.converged;
        out["sweeps"] = model.sweeps;
        out["kkt_residual"] = lasso_kkt_residual(x, y, model);
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("l1_weight"));
  m.def("make_folds", &make_folds, py::arg("n"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "kfold_regress",
      [](const Matrix& x, const Vector& y, std::size_t k, const std::vector<double>& grid, std::uint64_t seed) {
        const RegressionReport r = kfold_regress(x, y, k, grid, seed);
        py::dict out;
        out["mae"] = r.mae;
        out["rmse"] = r.rmse;
        out["r2"] = r.r2;
        out["l1_weight"] = r.l1_weight;
        out["folds"] = r.folds;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("k") = 5, py::arg("grid") = std::vector<double>{}, py::arg("seed") = 0);

  m.def(
      "time_fusion",
      [](std::size_t n, std::size_t dim, std::size_t memory, std::size_t runs) {
        const FusionTiming t = time_fusion(n, dim, memory, runs);
        return py::make_tuple(t.attentive_ms, t.self_attention_ms);
      },
      py::arg("regions"), py::arg("dim") = 144, py::arg("memory") = 32, py::arg("runs") = 5);
}
