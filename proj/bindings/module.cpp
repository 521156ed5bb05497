#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ircx/analysis.h"
#include "ircx/archive.h"
#include "ircx/cli.h"
#include "ircx/dataset.h"
#include "ircx/errors.h"
#include "ircx/extraction.h"
#include "ircx/metrics.h"
#include "ircx/synth.h"
#include "ircx/training.h"

namespace py = pybind11;
using namespace ircx;

namespace {

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["cd_l1"] = r.cd_l1;
  d["cd_l2"] = r.cd_l2;
  d["f1_delta"] = r.f1_delta;
  d["f1_2delta"] = r.f1_2delta;
  d["mf1_delta"] = r.mf1_delta;
  d["mf1_2delta"] = r.mf1_2delta;
  d["miou"] = r.miou;
  d["per_class_iou"] = r.per_class_iou;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ircx, m) {
  m.doc() = "unsigned-distance scene reconstruction with context features";
  m.attr("__version__") = "0.1.0";

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("ircx");
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli_main(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"),
      "run one CLI invocation in-process; returns the exit code");

  m.def(
      "generate_scene",
      [](int class_count, uint64_t seed) {
        const TriMesh mesh =
            generate_synthetic_scene(RoomSpec{}, class_count, seed);
        return py::make_tuple(mesh.vertices, mesh.faces, mesh.face_labels);
      },
      py::arg("class_count") = 8, py::arg("seed") = 0,
      "labeled synthetic room: (vertices, faces, face_labels)");

  m.def(
      "chamfer",
      [](const Points& pred, const Points& gt) {
        const auto [l1, l2] = chamfer(pred, gt);
        return py::make_tuple(l1, l2);
      },
      py::arg("pred"), py::arg("gt"));

  m.def("fscore", &fscore, py::arg("pred"), py::arg("gt"), py::arg("delta"));

  m.def(
      "miou",
      [](const std::vector<int>& pred, const std::vector<int>& gt,
         int class_count) {
        const auto [mean, per] = miou(pred, gt, class_count);
        return py::make_tuple(mean, per);
      },
      py::arg("pred"), py::arg("gt"), py::arg("class_count"));

  m.def(
      "extract_analytic",
      [](const std::string& kind, int resolution, double radius) {
        UdfFn fn;
        if (kind == "sphere")
          fn = sphere_udf(Vec3(0.5, 0.5, 0.5), radius);
        else if (kind == "plane")
          fn = plane_udf(0.5);
        else
          throw ConfigError("kind must be sphere or plane");
        GridConfig gc;
        gc.resolution = resolution;
        const TriMesh mesh =
            pseudo_sign_marching_cubes(eval_udf_grid(fn, gc), {});
        return py::make_tuple(mesh.vertices, mesh.faces);
      },
      py::arg("kind") = "sphere", py::arg("resolution") = 48,
      py::arg("radius") = 0.3,
      "mesh an analytic field through the UDF extraction path");

  m.def(
      "evaluate",
      [](const std::string& ckpt, const std::string& manifest,
         const std::string& split, int resolution) {
        const Checkpoint c = load_checkpoint(ckpt);
        const DatasetManifest data = DatasetManifest::load(manifest);
        EvalConfig cfg;
        cfg.resolution = resolution;
        const EvalResult r = evaluate_checkpoint(c, data, split, cfg);
        py::dict d = report_dict(r.aggregate);
        py::dict per;
        for (size_t i = 0; i < r.per_scene.size(); ++i)
          per[py::str(r.scene_ids[i])] = report_dict(r.per_scene[i]);
        d["per_scene"] = per;
        return d;
      },
      py::arg("checkpoint"), py::arg("manifest"), py::arg("split") = "test",
      py::arg("resolution") = 64);

  m.def(
      "extract_mesh",
      [](const std::string& ckpt, const std::string& scene, int resolution) {
        const Checkpoint c = load_checkpoint(ckpt);
        Model model = build_model(c);
        const SceneRuntime rt =
            SceneRuntime::build(load_archive(scene), model.cfg, 10240);
        const nn::Mat eg = compute_encoding(model, rt);
        const UdfFn fn = make_udf_fn(model, rt, eg);
        GridConfig gc;
        gc.resolution = resolution;
        const TriMesh mesh =
            pseudo_sign_marching_cubes(eval_udf_grid(fn, gc), {});
        return py::make_tuple(mesh.vertices, mesh.faces);
      },
      py::arg("checkpoint"), py::arg("scene"), py::arg("resolution") = 64);

  m.def(
      "knn_probe",
      [](const nn::Mat& features, const std::vector<int>& labels, int k,
         int folds, uint64_t seed) {
        const ProbeReport r = knn_probe(features, labels, k, folds, seed);
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["silhouette"] = r.silhouette;
        d["per_class_accuracy"] = r.per_class_accuracy;
        d["excluded_classes"] = r.excluded_classes;
        return d;
      },
      py::arg("features"), py::arg("labels"), py::arg("k") = 10,
      py::arg("folds") = 5, py::arg("seed") = 0);

  m.def(
      "load_features",
      [](const std::string& path) {
        const FeatureDump d = load_feature_dump(path);
        return py::make_tuple(d.coords, d.features, d.labels, d.which);
      },
      py::arg("path"), "(coords, features, labels, which) from a probe dump");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ArchiveError>(m, "ArchiveError");
}
