#include "ircx/analysis.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "ircx/archive.h"
#include "ircx/errors.h"
#include "ircx/rng.h"

namespace ircx {

using nn::Mat;

ProbeReport knn_probe(const Mat& features, const std::vector<int>& labels,
                      int k, int folds, uint64_t seed) {
  const int n = static_cast<int>(features.rows());
  if (n != static_cast<int>(labels.size()))
    throw ArgumentError("knn_probe: one label per feature row required");
  if (k < 1) throw ArgumentError("knn_probe: k must be >= 1");
  if (folds < 2) throw ArgumentError("knn_probe: folds must be >= 2");
  if (n == 0) throw ArgumentError("knn_probe: empty feature set");

  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw ArgumentError("knn_probe: negative label");
    max_label = std::max(max_label, l);
  }
  const int C = max_label + 1;

  std::vector<std::vector<int>> by_class(C);
  for (int i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

  ProbeReport report;
  report.per_class_accuracy.assign(C, std::nan(""));
  std::vector<int> kept;
  std::vector<char> class_kept(C, 0);
  for (int c = 0; c < C; ++c) {
    if (by_class[c].empty()) continue;
    if (static_cast<int>(by_class[c].size()) < folds) {
      std::fprintf(stderr,
                   "warning: knn_probe excludes class %d (%zu samples < %d folds)\n",
                   c, by_class[c].size(), folds);
      report.excluded_classes.push_back(c);
      continue;
    }
    class_kept[c] = 1;
    kept.insert(kept.end(), by_class[c].begin(), by_class[c].end());
  }
  int kept_classes = 0;
  for (int c = 0; c < C; ++c) kept_classes += class_kept[c];
  if (kept_classes < 2)
    throw DataError("knn_probe: needs >= 2 classes with at least `folds` samples");

  // Stratified folds: shuffle each class separately, deal round-robin.
  std::vector<int> fold_of(n, -1);
  for (int c = 0; c < C; ++c) {
    if (!class_kept[c]) continue;
    auto rows = by_class[c];
    Rng g = stream(seed, "probe_fold", static_cast<uint64_t>(c));
    const auto perm = g.permutation(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i)
      fold_of[rows[perm[i]]] = static_cast<int>(i % folds);
  }

  std::vector<int64_t> class_correct(C, 0), class_total(C, 0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i : kept) (fold_of[i] == f ? test : train).push_back(i);
    if (train.empty() || test.empty()) continue;
    const int kk = std::min<int>(k, static_cast<int>(train.size()));

    Mat tr(train.size(), features.cols()), te(test.size(), features.cols());
    for (size_t i = 0; i < train.size(); ++i) tr.row(i) = features.row(train[i]);
    for (size_t i = 0; i < test.size(); ++i) te.row(i) = features.row(test[i]);
    const Eigen::VectorXd tr2 = tr.rowwise().squaredNorm();
    const Eigen::VectorXd te2 = te.rowwise().squaredNorm();
    Mat d2 = -2.0 * te * tr.transpose();
    d2.colwise() += te2;
    d2.rowwise() += tr2.transpose();

    std::vector<int> idx(train.size());
    std::vector<int> votes(C);
    for (int i = 0; i < static_cast<int>(test.size()); ++i) {
      std::iota(idx.begin(), idx.end(), 0);
      std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(),
                        [&](int a, int b) {
                          const double da = d2(i, a), db = d2(i, b);
                          if (da != db) return da < db;
                          return train[a] < train[b];
                        });
      std::fill(votes.begin(), votes.end(), 0);
      for (int j = 0; j < kk; ++j) ++votes[labels[train[idx[j]]]];
      int best = 0;
      for (int c = 1; c < C; ++c)
        if (votes[c] > votes[best]) best = c;
      const int truth = labels[test[i]];
      ++class_total[truth];
      if (best == truth) ++class_correct[truth];
    }
  }

  int64_t correct = 0, total = 0;
  for (int c = 0; c < C; ++c) {
    if (!class_kept[c]) continue;
    correct += class_correct[c];
    total += class_total[c];
    if (class_total[c] > 0)
      report.per_class_accuracy[c] =
          static_cast<double>(class_correct[c]) / static_cast<double>(class_total[c]);
  }
  report.accuracy = total > 0 ? static_cast<double>(correct) / total : std::nan("");

  // Silhouette: per-point mean distance to every kept class, blocked GEMM.
  const int m = static_cast<int>(kept.size());
  Mat kf(m, features.cols());
  std::vector<int> klab(m);
  std::vector<int64_t> class_count(C, 0);
  for (int i = 0; i < m; ++i) {
    kf.row(i) = features.row(kept[i]);
    klab[i] = labels[kept[i]];
    ++class_count[klab[i]];
  }
  Mat sums = Mat::Zero(m, C);
  const Eigen::VectorXd kf2 = kf.rowwise().squaredNorm();
  const int block = 1024;
  for (int start = 0; start < m; start += block) {
    const int rows = std::min(block, m - start);
    Mat d2 = -2.0 * kf.middleRows(start, rows) * kf.transpose();
    d2.colwise() += kf2.segment(start, rows);
    d2.rowwise() += kf2.transpose();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < m; ++j)
        sums(start + i, klab[j]) += std::sqrt(std::max(0.0, d2(i, j)));
  }
  double sil_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const int ci = klab[i];
    // self-distance is zero, drop it from the intra mean
    const double a = class_count[ci] > 1
                         ? sums(i, ci) / static_cast<double>(class_count[ci] - 1)
                         : 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < C; ++c) {
      if (c == ci || !class_kept[c]) continue;
      b = std::min(b, sums(i, c) / static_cast<double>(class_count[c]));
    }
    const double denom = std::max(a, b);
    sil_sum += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  report.silhouette = sil_sum / m;
  return report;
}

FeatureDump compute_feature_dump(const Checkpoint& ckpt, const SceneSample& scene,
                                 const std::string& which, int encoder_points) {
  if (which != "eg" && which != "ec" && which != "es")
    throw ConfigError("unknown feature tag '" + which + "' (expected eg|ec|es)");
  Model model = build_model(ckpt);
  if ((which == "ec" || which == "es") && !model.ctx)
    throw ConfigError("checkpoint has no contextualizer; cannot export " + which);

  SceneRuntime rt = SceneRuntime::build(scene, model.cfg, encoder_points);
  const Mat eg = compute_encoding(model, rt);

  FeatureDump dump;
  dump.coords = rt.enc_pts;
  dump.which = which;
  dump.scene_id = rt.scene.scene_id;
  if (rt.scene.surface.has_labels()) {
    const auto& lab = rt.scene.surface.labels;
    dump.labels.assign(lab.begin(), lab.begin() + rt.enc_pts.rows());
  }
  if (which == "eg") {
    dump.features = eg;
  } else {
    const Mat ec = compute_context(model, rt, eg);
    dump.features = which == "ec" ? ec : fuse(eg, ec);
  }
  return dump;
}

void save_feature_dump(const FeatureDump& dump, const std::string& path) {
  Archive a;
  a.put_f64("coords", Mat(dump.coords));
  a.put_f64("features", dump.features);
  a.put_i32("labels", dump.labels);
  a.put_str("which", dump.which);
  a.put_str("scene_id", dump.scene_id);
  a.save(path, "IRCX1");
}

FeatureDump load_feature_dump(const std::string& path) {
  const Archive a = Archive::load(path, "IRCX1");
  FeatureDump dump;
  dump.coords = a.get_f64("coords");
  dump.features = a.get_f64("features");
  dump.labels = a.get_i32("labels");
  dump.which = a.get_str("which");
  dump.scene_id = a.get_str("scene_id");
  return dump;
}

}  // namespace ircx
