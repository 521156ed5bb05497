#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ircx/geometry.h"

namespace ircx {

struct MetricConfig {
  double delta = 0.005;    // F1 distance threshold, unit-cube scale
  int mesh_samples = 100000;  // points drawn per mesh for mesh-vs-mesh metrics

  void validate() const;
};

// NaN marks fields a checkpoint cannot produce (e.g. semantics of a
// geometry-only model); they serialize as "-".
struct MetricReport {
  double cd_l1 = std::nan("");
  double cd_l2 = std::nan("");
  double f1_delta = std::nan("");
  double f1_2delta = std::nan("");
  double mf1_delta = std::nan("");
  double mf1_2delta = std::nan("");
  double miou = std::nan("");
  std::vector<double> per_class_iou;  // NaN for zero-union classes
};

// Symmetric mean nearest-neighbor distance (L1) and squared distance (L2).
// Either side empty -> {inf, inf}.
std::pair<double, double> chamfer(const Points& pred, const Points& gt);

// F1 = 2PR/(P+R); precision = fraction of pred within delta of gt, recall
// symmetric; 0 when P+R = 0. Either side empty -> 0.
double fscore(const Points& pred, const Points& gt, double delta);

// Per-class fscore restricted to same-class points, averaged over classes
// present in gt. Returns {mean, per-class}; absent classes carry NaN.
std::pair<double, std::vector<double>> semantic_fscore(
    const Points& pred, const std::vector<int>& pred_labels, const Points& gt,
    const std::vector<int>& gt_labels, double delta, int class_count);

// Confusion-matrix IoU; mean over classes with nonzero union.
std::pair<double, std::vector<double>> miou(const std::vector<int>& pred,
                                            const std::vector<int>& gt,
                                            int class_count);

// Paper-convention presentation: CD-L1 x1e2, CD-L2 x1e4, rest as-is.
std::string report_kv(const MetricReport& r);
std::string report_csv_header();
std::string report_csv_row(const std::string& name, const MetricReport& r);

// Field-wise mean ignoring NaN; per_class_iou averaged classwise.
MetricReport aggregate_reports(const std::vector<MetricReport>& rows);

}  // namespace ircx
