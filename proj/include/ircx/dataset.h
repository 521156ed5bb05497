#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ircx/geometry.h"
#include "ircx/sampling.h"

namespace ircx {

// One prepared scene: normalized mesh, encoder-input surface samples and
// the labeled query bank. Everything a train/eval step needs.
struct SceneSample {
  std::string scene_id;
  std::string source;  // dataset tag, empty until a merge assigns one
  int class_count = 0;
  TriMesh mesh;  // normalized copy, kept for evaluation against ground truth
  PointCloud surface;
  QuerySet queries;
  SimilarityTransform transform;  // original -> normalized

  void validate() const;  // label ranges, point containment
};

SceneSample prepare_scene(const TriMesh& mesh, const std::string& scene_id,
                          int n_surface = 10000, int m_query = 100000,
                          uint64_t seed = 0, int class_count = 0,
                          const OffSurfaceConfig& cfg = {});

void write_archive(const SceneSample& sample, const std::string& path);
SceneSample load_archive(const std::string& path);

struct DatasetManifest {
  struct Entry {
    std::string scene_id;
    std::string split;  // "train" or "test"
    std::string path;   // archive path, resolved on load
    std::string source;
  };

  std::string name;  // dataset tag used as prefix when merging
  std::vector<std::string> class_names;
  std::vector<Entry> entries;

  int class_count() const { return static_cast<int>(class_names.size()); }
  std::vector<Entry> split_entries(const std::string& split) const;
  void validate() const;  // unique ids, known splits

  // TSV `scene_id<TAB>split<TAB>path`; class names go to a sibling
  // classes.txt in the same directory.
  void save(const std::string& manifest_path) const;
  static DatasetManifest load(const std::string& manifest_path);
};

struct MergeOptions {
  // target class names; required when remapping
  std::vector<std::string> class_names;
  // per-dataset-name old-label -> new-label table
  std::map<std::string, std::vector<int>> remap;
  // archives that need remapped labels are rewritten here
  std::string out_dir;
};

DatasetManifest merge_datasets(const std::vector<DatasetManifest>& manifests,
                               const std::optional<MergeOptions>& opts = {});

}  // namespace ircx
