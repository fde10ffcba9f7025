// Python bindings for the embedding core. Matrices cross the boundary as
// numpy arrays via Eigen; exceptions map to ValueError / RuntimeError.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "hnne/dataio.hpp"
#include "hnne/hierarchy.hpp"
#include "hnne/metrics.hpp"
#include "hnne/parallel.hpp"
#include "hnne/plot.hpp"
#include "hnne/transform.hpp"

namespace py = pybind11;

namespace {

hnne::InitMode init_from_name(const std::string& name) {
  if (name == "pca_centroids") return hnne::InitMode::PcaCentroids;
  if (name == "pca") return hnne::InitMode::PcaFull;
  if (name == "random_projection") return hnne::InitMode::RandomProjection;
  if (name == "random") return hnne::InitMode::RandomPoints;
  throw hnne::InvalidArgument("init must be pca_centroids, pca, random_projection, or random");
}

hnne::NNBackend backend_from_name(const std::string& name) {
  if (name == "auto") return hnne::NNBackend::Auto;
  if (name == "exact") return hnne::NNBackend::Exact;
  if (name == "approx") return hnne::NNBackend::Approx;
  throw hnne::InvalidArgument("backend must be auto, exact, or approx");
}

hnne::FitParams make_params(int dim, const std::string& init, double radius_fraction,
                            double shrink, bool guarantee, bool inflate, int lookup_level,
                            int pca_threshold, const std::string& backend, std::uint64_t seed) {
  hnne::FitParams p;
  p.dim = dim;
  p.init = init_from_name(init);
  p.radius_fraction = radius_fraction;
  p.shrink = shrink;
  p.guarantee = guarantee;
  p.inflate = inflate;
  p.lookup_level = lookup_level;
  p.pca_threshold = pca_threshold;
  p.backend = backend_from_name(backend);
  p.seed = seed;
  return p;
}

}  // namespace

PYBIND11_MODULE(_hnne, m) {
  m.doc() = "Hierarchical 1-NN graph embedding";

  py::register_exception<hnne::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<hnne::InvalidData>(m, "InvalidData", PyExc_ValueError);

  py::class_<hnne::ProjectionModel>(m, "Model")
      .def_property_readonly("lookup_level",
                             [](const hnne::ProjectionModel& mdl) { return mdl.lookup_level; })
      .def_property_readonly("n_clusters",
                             [](const hnne::ProjectionModel& mdl) {
                               return static_cast<int>(mdl.affines.size());
                             })
      .def_property_readonly("input_dim",
                             [](const hnne::ProjectionModel& mdl) { return mdl.linear.input_dim; })
      .def_property_readonly("output_dim",
                             [](const hnne::ProjectionModel& mdl) { return mdl.linear.output_dim; })
      .def_property_readonly("inflated",
                             [](const hnne::ProjectionModel& mdl) { return mdl.inflated; })
      .def("transform",
           [](const hnne::ProjectionModel& mdl, const hnne::Matrix& points) {
             return hnne::transform(mdl, points);
           },
           py::arg("points"), py::call_guard<py::gil_scoped_release>())
      .def("save", [](const hnne::ProjectionModel& mdl, const std::string& path) {
        hnne::save_model(mdl, path);
      }, py::arg("path"));

  m.def("load_model", &hnne::load_model, py::arg("path"));

  m.def(
      "fit",
      [](const hnne::Matrix& points, int dim, const std::string& init, double radius_fraction,
         double shrink, bool guarantee, bool inflate, int lookup_level, int pca_threshold,
         const std::string& backend, std::uint64_t seed) {
        auto params = make_params(dim, init, radius_fraction, shrink, guarantee, inflate,
                                  lookup_level, pca_threshold, backend, seed);
        hnne::FitResult res;
        {
          py::gil_scoped_release release;
          res = hnne::fit(points, params);
        }
        return py::make_tuple(res.embedding, res.model);
      },
      py::arg("points"), py::arg("dim") = 2, py::arg("init") = "pca_centroids",
      py::arg("radius_fraction") = 1.0 / 3.0, py::arg("shrink") = 0.0,
      py::arg("guarantee") = false, py::arg("inflate") = false, py::arg("lookup_level") = -1,
      py::arg("pca_threshold") = 1000, py::arg("backend") = "auto", py::arg("seed") = 0,
      "Embed points; returns (embedding, model).");

  m.def(
      "transform",
      [](const hnne::ProjectionModel& mdl, const hnne::Matrix& points) {
        return hnne::transform(mdl, points);
      },
      py::arg("model"), py::arg("points"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "hierarchy_level_sizes",
      [](const hnne::Matrix& points, const std::string& backend, std::uint64_t seed) {
        py::gil_scoped_release release;
        return hnne::build_hierarchy(points, backend_from_name(backend), seed).level_sizes();
      },
      py::arg("points"), py::arg("backend") = "auto", py::arg("seed") = 0);

  m.def(
      "hierarchy_labels",
      [](const hnne::Matrix& points, int level, const std::string& backend, std::uint64_t seed) {
        py::gil_scoped_release release;
        auto h = hnne::build_hierarchy(points, backend_from_name(backend), seed);
        return hnne::partition_at_level(h, level).labels;
      },
      py::arg("points"), py::arg("level"), py::arg("backend") = "auto", py::arg("seed") = 0);

  m.def("trustworthiness", &hnne::trustworthiness, py::arg("high"), py::arg("low"),
        py::arg("k") = 5, py::call_guard<py::gil_scoped_release>());
  m.def("knn_accuracy_cv", &hnne::knn_accuracy_cv, py::arg("points"), py::arg("labels"),
        py::arg("k"), py::arg("folds") = 10, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("centroid_triplet_accuracy", &hnne::centroid_triplet_accuracy, py::arg("high"),
        py::arg("low"), py::arg("labels"), py::call_guard<py::gil_scoped_release>());

  m.def("gen_blobs", &hnne::gen_blobs, py::arg("n"), py::arg("dim"), py::arg("clusters"),
        py::arg("separation") = 20.0, py::arg("noise") = 1.0, py::arg("seed") = 0);
  m.def("gen_uniform_square", &hnne::gen_uniform_square, py::arg("n"), py::arg("seed") = 0);

  m.def("render_scatter_svg",
        [](const hnne::Matrix& embedding, const std::optional<std::vector<int>>& labels) {
          return hnne::render_scatter_svg(embedding, labels ? &*labels : nullptr);
        },
        py::arg("embedding"), py::arg("labels") = py::none());

  m.def("set_threads", &hnne::set_thread_count, py::arg("n"),
        "Worker thread count (0 = all cores).");

  m.attr("__version__") = "0.1.0";
}
