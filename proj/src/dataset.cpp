#include "ircx/dataset.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ircx/archive.h"
#include "ircx/errors.h"

namespace fs = std::filesystem;

namespace ircx {

void SceneSample::validate() const {
  mesh.validate();
  if (class_count < 1) throw DataError("scene " + scene_id + ": class_count < 1");
  for (int l : mesh.face_labels)
    if (l < 0 || l >= class_count)
      throw DataError("scene " + scene_id + ": face label out of range");
  for (int l : surface.labels)
    if (l < 0 || l >= class_count)
      throw DataError("scene " + scene_id + ": surface label out of range");
  for (int l : queries.gt_label)
    if (l < 0 || l >= class_count)
      throw DataError("scene " + scene_id + ": query label out of range");
  if (surface.points.rows() != static_cast<Eigen::Index>(surface.labels.size()))
    throw DataError("scene " + scene_id + ": surface label count mismatch");
  if (queries.points.rows() != queries.gt_distance.size() ||
      queries.points.rows() != static_cast<Eigen::Index>(queries.gt_label.size()))
    throw DataError("scene " + scene_id + ": query array count mismatch");
  const double eps = 1e-9;
  if (surface.points.size() > 0 &&
      (surface.points.minCoeff() < -eps || surface.points.maxCoeff() > 1 + eps))
    throw DataError("scene " + scene_id + ": surface points outside unit cube");
}

SceneSample prepare_scene(const TriMesh& mesh, const std::string& scene_id,
                          int n_surface, int m_query, uint64_t seed,
                          int class_count, const OffSurfaceConfig& cfg) {
  SceneSample s;
  s.scene_id = scene_id;
  auto [normalized, tf] = normalize_to_unit_cube(mesh);
  s.mesh = std::move(normalized);
  s.transform = tf;
  if (class_count == 0) {
    int max_label = 0;
    for (int l : mesh.face_labels) max_label = std::max(max_label, l);
    class_count = max_label + 1;
  }
  s.class_count = class_count;
  s.surface = sample_surface(s.mesh, n_surface, seed);
  s.queries = sample_off_surface(s.mesh, m_query, cfg, seed);
  s.validate();
  return s;
}

void write_archive(const SceneSample& sample, const std::string& path) {
  Archive a;
  a.put_str("scene_id", sample.scene_id);
  a.put_str("source", sample.source);
  a.put_i32("class_count", {sample.class_count});
  a.put_f64("mesh/vertices", Eigen::MatrixXd(sample.mesh.vertices));
  {
    std::vector<int> f(sample.mesh.faces.size());
    Eigen::Map<Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        f.data(), sample.mesh.faces.rows(), 3) = sample.mesh.faces;
    a.put_i32("mesh/faces", f,
              {static_cast<uint64_t>(sample.mesh.faces.rows()), 3});
  }
  a.put_i32("mesh/face_labels", sample.mesh.face_labels);
  a.put_f64("surface/points", Eigen::MatrixXd(sample.surface.points));
  a.put_i32("surface/labels", sample.surface.labels);
  a.put_f64("queries/points", Eigen::MatrixXd(sample.queries.points));
  a.put_f64("queries/gt_distance", sample.queries.gt_distance);
  a.put_i32("queries/gt_label", sample.queries.gt_label);
  Eigen::VectorXd tf(4);
  tf << sample.transform.scale, sample.transform.translation.x(),
      sample.transform.translation.y(), sample.transform.translation.z();
  a.put_f64("transform", tf);
  a.save(path, "IRCX1");
}

SceneSample load_archive(const std::string& path) {
  Archive a = Archive::load(path, "IRCX1");
  SceneSample s;
  s.scene_id = a.get_str("scene_id");
  s.source = a.get_str("source");
  s.class_count = a.get_i32("class_count").at(0);
  s.mesh.vertices = a.get_f64("mesh/vertices");
  {
    std::vector<int> f = a.get_i32("mesh/faces");
    s.mesh.faces = Eigen::Map<
        Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        f.data(), static_cast<Eigen::Index>(f.size() / 3), 3);
  }
  s.mesh.face_labels = a.get_i32("mesh/face_labels");
  s.surface.points = a.get_f64("surface/points");
  s.surface.labels = a.get_i32("surface/labels");
  s.queries.points = a.get_f64("queries/points");
  s.queries.gt_distance = a.get_f64_vector("queries/gt_distance");
  s.queries.gt_label = a.get_i32("queries/gt_label");
  Eigen::VectorXd tf = a.get_f64_vector("transform");
  if (tf.size() != 4) throw DataError(path + ": bad transform entry");
  s.transform.scale = tf[0];
  s.transform.translation = Vec3(tf[1], tf[2], tf[3]);
  return s;
}

std::vector<DatasetManifest::Entry> DatasetManifest::split_entries(
    const std::string& split) const {
  std::vector<Entry> out;
  for (const Entry& e : entries)
    if (e.split == split) out.push_back(e);
  return out;
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const Entry& e : entries) {
    if (e.split != "train" && e.split != "test")
      throw DataError("manifest " + name + ": unknown split '" + e.split + "'");
    if (!seen.insert(e.scene_id).second)
      throw DataError("manifest " + name + ": duplicate scene_id '" +
                      e.scene_id + "'");
  }
}

void DatasetManifest::save(const std::string& manifest_path) const {
  validate();
  fs::path mp(manifest_path);
  if (mp.has_parent_path()) fs::create_directories(mp.parent_path());
  std::ofstream out(mp);
  if (!out) throw DataError("cannot write " + manifest_path);
  for (const Entry& e : entries)
    out << e.scene_id << '\t' << e.split << '\t' << e.path << '\n';
  out.close();

  std::ofstream cls(mp.parent_path() / "classes.txt");
  if (!cls) throw DataError("cannot write class names next to " + manifest_path);
  for (const std::string& c : class_names) cls << c << '\n';
}

DatasetManifest DatasetManifest::load(const std::string& manifest_path) {
  fs::path mp(manifest_path);
  std::ifstream in(mp);
  if (!in) throw DataError("cannot open manifest " + manifest_path);
  DatasetManifest m;
  m.name = mp.stem().string();
  if (m.name == "manifest" && mp.has_parent_path())
    m.name = mp.parent_path().filename().string();

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Entry e;
    if (!std::getline(ls, e.scene_id, '\t') ||
        !std::getline(ls, e.split, '\t') || !std::getline(ls, e.path, '\t'))
      throw DataError(manifest_path + ":" + std::to_string(lineno) +
                      ": expected scene_id<TAB>split<TAB>path");
    fs::path ap(e.path);
    if (ap.is_relative() && mp.has_parent_path())
      e.path = (mp.parent_path() / ap).string();
    // keep the prefix as the source tag for merged manifests
    auto slash = e.scene_id.find('/');
    if (slash != std::string::npos) e.source = e.scene_id.substr(0, slash);
    m.entries.push_back(std::move(e));
  }

  fs::path cls_path = mp.parent_path() / "classes.txt";
  std::ifstream cls(cls_path);
  if (!cls)
    throw DataError("missing class names file " + cls_path.string());
  while (std::getline(cls, line))
    if (!line.empty()) m.class_names.push_back(line);
  m.validate();
  return m;
}

DatasetManifest merge_datasets(const std::vector<DatasetManifest>& manifests,
                               const std::optional<MergeOptions>& opts) {
  if (manifests.empty()) throw ConfigError("merge: no manifests given");

  std::vector<std::string> target_names =
      opts && !opts->class_names.empty() ? opts->class_names
                                         : manifests.front().class_names;

  DatasetManifest merged;
  merged.name = "merged";
  merged.class_names = target_names;

  std::set<std::string> names_seen;
  for (const DatasetManifest& m : manifests) {
    if (m.name.empty()) throw ConfigError("merge: manifest without a name");
    if (!names_seen.insert(m.name).second)
      throw ConfigError("merge: duplicate dataset name '" + m.name + "'");

    const std::vector<int>* remap = nullptr;
    if (opts) {
      auto it = opts->remap.find(m.name);
      if (it != opts->remap.end()) remap = &it->second;
    }
    if (!remap && m.class_names != target_names)
      throw ConfigError("merge: dataset '" + m.name +
                        "' has a different class map and no remap was given");
    if (remap) {
      if (static_cast<int>(remap->size()) != m.class_count())
        throw ConfigError("merge: remap for '" + m.name + "' has " +
                          std::to_string(remap->size()) + " entries, expected " +
                          std::to_string(m.class_count()));
      for (int t : *remap)
        if (t < 0 || t >= static_cast<int>(target_names.size()))
          throw ConfigError("merge: remap for '" + m.name +
                            "' maps outside the target class set");
      if (!opts || opts->out_dir.empty())
        throw ConfigError("merge: remapping '" + m.name +
                          "' requires an output directory");
    }

    for (const DatasetManifest::Entry& e : m.entries) {
      DatasetManifest::Entry out = e;
      out.scene_id = m.name + "/" + e.scene_id;
      out.source = m.name;
      if (remap) {
        SceneSample s = load_archive(e.path);
        auto apply = [&](std::vector<int>& labels) {
          for (int& l : labels) l = (*remap)[l];
        };
        apply(s.mesh.face_labels);
        apply(s.surface.labels);
        apply(s.queries.gt_label);
        s.class_count = static_cast<int>(target_names.size());
        s.source = m.name;
        fs::create_directories(fs::path(opts->out_dir) / m.name);
        out.path =
            (fs::path(opts->out_dir) / m.name / fs::path(e.path).filename())
                .string();
        write_archive(s, out.path);
      }
      merged.entries.push_back(std::move(out));
    }
  }
  merged.validate();
  return merged;
}

}  // namespace ircx
