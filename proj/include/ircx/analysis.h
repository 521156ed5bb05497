#pragma once

#include <cmath>

#include "ircx/training.h"

namespace ircx {

struct ProbeReport {
  double accuracy = std::nan("");
  double silhouette = std::nan("");
  std::vector<double> per_class_accuracy;  // NaN for absent/excluded classes
  std::string feature_tag;
  std::vector<int> excluded_classes;  // fewer samples than folds
};

// Stratified k-fold kNN-classifier accuracy plus silhouette score over
// Euclidean feature distances. Classes with fewer samples than folds are
// excluded with a warning on stderr.
ProbeReport knn_probe(const nn::Mat& features, const std::vector<int>& labels,
                      int k = 10, int folds = 5, uint64_t seed = 0);

// Per-point features of one scene for external embedding tools. `which` is
// eg (encoding), ec (context) or es (fused); ec/es need a contextualizer.
struct FeatureDump {
  Points coords;
  nn::Mat features;
  std::vector<int> labels;
  std::string which;
  std::string scene_id;
};

FeatureDump compute_feature_dump(const Checkpoint& ckpt, const SceneSample& scene,
                                 const std::string& which,
                                 int encoder_points = 10240);

// IRCX1 container with entries coords / features / labels / which / scene_id.
void save_feature_dump(const FeatureDump& dump, const std::string& path);
FeatureDump load_feature_dump(const std::string& path);

}  // namespace ircx
