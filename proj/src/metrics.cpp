#include "ircx/metrics.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "ircx/errors.h"
#include "ircx/spatial.h"

namespace ircx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest-neighbor distance from every row of `from` to the set `to`.
Eigen::VectorXd nn_distances(const Points& from, const Points& to) {
  SpatialIndex index(to);
  Eigen::VectorXd d(from.rows());
  std::vector<int> idx;
  std::vector<double> dist;
  for (int i = 0; i < from.rows(); ++i) {
    index.knn(from.row(i).transpose(), 1, idx, dist);
    d[i] = dist[0];
  }
  return d;
}

Points select_rows(const Points& p, const std::vector<int>& rows) {
  Points out(rows.size(), 3);
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = p.row(rows[i]);
  return out;
}

}  // namespace

void MetricConfig::validate() const {
  if (delta <= 0.0) throw ConfigError("metrics: delta must be > 0");
  if (mesh_samples < 1) throw ConfigError("metrics: mesh_samples must be >= 1");
}

std::pair<double, double> chamfer(const Points& pred, const Points& gt) {
  if (pred.rows() == 0 || gt.rows() == 0) return {kInf, kInf};
  Eigen::VectorXd dp = nn_distances(pred, gt);
  Eigen::VectorXd dg = nn_distances(gt, pred);
  const double l1 = 0.5 * (dp.mean() + dg.mean());
  const double l2 = 0.5 * (dp.array().square().mean() + dg.array().square().mean());
  return {l1, l2};
}

double fscore(const Points& pred, const Points& gt, double delta) {
  if (delta <= 0.0) throw ArgumentError("fscore: delta must be > 0");
  if (pred.rows() == 0 || gt.rows() == 0) return 0.0;
  const double precision =
      (nn_distances(pred, gt).array() <= delta).cast<double>().mean();
  const double recall =
      (nn_distances(gt, pred).array() <= delta).cast<double>().mean();
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::pair<double, std::vector<double>> semantic_fscore(
    const Points& pred, const std::vector<int>& pred_labels, const Points& gt,
    const std::vector<int>& gt_labels, double delta, int class_count) {
  if (pred.rows() != static_cast<Eigen::Index>(pred_labels.size()) ||
      gt.rows() != static_cast<Eigen::Index>(gt_labels.size()))
    throw ArgumentError("semantic_fscore: label count mismatch");
  for (int l : pred_labels)
    if (l < 0 || l >= class_count) throw ArgumentError("semantic_fscore: label out of range");
  for (int l : gt_labels)
    if (l < 0 || l >= class_count) throw ArgumentError("semantic_fscore: label out of range");

  std::vector<double> per_class(class_count, std::nan(""));
  double acc = 0.0;
  int present = 0;
  for (int c = 0; c < class_count; ++c) {
    std::vector<int> pr, gr;
    for (size_t i = 0; i < pred_labels.size(); ++i)
      if (pred_labels[i] == c) pr.push_back(static_cast<int>(i));
    for (size_t i = 0; i < gt_labels.size(); ++i)
      if (gt_labels[i] == c) gr.push_back(static_cast<int>(i));
    if (gr.empty()) continue;  // class absent from gt: excluded from the mean
    per_class[c] =
        pr.empty() ? 0.0
                   : fscore(select_rows(pred, pr), select_rows(gt, gr), delta);
    acc += per_class[c];
    ++present;
  }
  return {present > 0 ? acc / present : std::nan(""), per_class};
}

std::pair<double, std::vector<double>> miou(const std::vector<int>& pred,
                                            const std::vector<int>& gt,
                                            int class_count) {
  if (pred.size() != gt.size()) throw ArgumentError("miou: length mismatch");
  std::vector<int64_t> confusion(
      static_cast<size_t>(class_count) * class_count, 0);
  for (size_t i = 0; i < gt.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= class_count || gt[i] < 0 || gt[i] >= class_count)
      throw ArgumentError("miou: label out of range");
    ++confusion[static_cast<size_t>(gt[i]) * class_count + pred[i]];
  }
  std::vector<double> per_class(class_count, std::nan(""));
  double acc = 0.0;
  int counted = 0;
  for (int c = 0; c < class_count; ++c) {
    int64_t tp = confusion[static_cast<size_t>(c) * class_count + c];
    int64_t fp = 0, fn = 0;
    for (int o = 0; o < class_count; ++o) {
      if (o == c) continue;
      fp += confusion[static_cast<size_t>(o) * class_count + c];
      fn += confusion[static_cast<size_t>(c) * class_count + o];
    }
    const int64_t uni = tp + fp + fn;
    if (uni == 0) continue;
    per_class[c] = static_cast<double>(tp) / static_cast<double>(uni);
    acc += per_class[c];
    ++counted;
  }
  return {counted > 0 ? acc / counted : std::nan(""), per_class};
}

namespace {

std::string fmt(double v, double scale = 1.0) {
  if (std::isnan(v)) return "-";
  std::ostringstream os;
  os.precision(6);
  os << v * scale;
  return os.str();
}

}  // namespace

std::string report_kv(const MetricReport& r) {
  std::ostringstream os;
  os << "cd_l1=" << fmt(r.cd_l1) << "\n";
  os << "cd_l2=" << fmt(r.cd_l2) << "\n";
  os << "cd_l1_x100=" << fmt(r.cd_l1, 1e2) << "\n";
  os << "cd_l2_x10000=" << fmt(r.cd_l2, 1e4) << "\n";
  os << "f1_delta=" << fmt(r.f1_delta) << "\n";
  os << "f1_2delta=" << fmt(r.f1_2delta) << "\n";
  os << "mf1_delta=" << fmt(r.mf1_delta) << "\n";
  os << "mf1_2delta=" << fmt(r.mf1_2delta) << "\n";
  os << "miou=" << fmt(r.miou) << "\n";
  for (size_t c = 0; c < r.per_class_iou.size(); ++c)
    os << "iou_class_" << c << "=" << fmt(r.per_class_iou[c]) << "\n";
  return os.str();
}

std::string report_csv_header() {
  return "name,cd_l1_x100,cd_l2_x10000,f1_delta,f1_2delta,mf1_delta,"
         "mf1_2delta,miou";
}

std::string report_csv_row(const std::string& name, const MetricReport& r) {
  std::ostringstream os;
  os << name << ',' << fmt(r.cd_l1, 1e2) << ',' << fmt(r.cd_l2, 1e4) << ','
     << fmt(r.f1_delta) << ',' << fmt(r.f1_2delta) << ',' << fmt(r.mf1_delta)
     << ',' << fmt(r.mf1_2delta) << ',' << fmt(r.miou);
  return os.str();
}

MetricReport aggregate_reports(const std::vector<MetricReport>& rows) {
  MetricReport agg;
  auto mean_of = [&](auto field) {
    double acc = 0.0;
    int n = 0;
    for (const MetricReport& r : rows) {
      const double v = r.*field;
      if (!std::isnan(v)) {
        acc += v;
        ++n;
      }
    }
    return n > 0 ? acc / n : std::nan("");
  };
  agg.cd_l1 = mean_of(&MetricReport::cd_l1);
  agg.cd_l2 = mean_of(&MetricReport::cd_l2);
  agg.f1_delta = mean_of(&MetricReport::f1_delta);
  agg.f1_2delta = mean_of(&MetricReport::f1_2delta);
  agg.mf1_delta = mean_of(&MetricReport::mf1_delta);
  agg.mf1_2delta = mean_of(&MetricReport::mf1_2delta);
  agg.miou = mean_of(&MetricReport::miou);

  size_t classes = 0;
  for (const MetricReport& r : rows)
    classes = std::max(classes, r.per_class_iou.size());
  agg.per_class_iou.assign(classes, std::nan(""));
  for (size_t c = 0; c < classes; ++c) {
    double acc = 0.0;
    int n = 0;
    for (const MetricReport& r : rows)
      if (c < r.per_class_iou.size() && !std::isnan(r.per_class_iou[c])) {
        acc += r.per_class_iou[c];
        ++n;
      }
    if (n > 0) agg.per_class_iou[c] = acc / n;
  }
  return agg;
}

}  // namespace ircx
