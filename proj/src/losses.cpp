#include "ircx/losses.h"

#include "ircx/errors.h"

namespace ircx {

void LossConfig::validate() const {
  if (clamp <= 0.0) throw ConfigError("loss: clamp must be > 0");
  if (weighting != "single" && weighting != "uncertainty")
    throw ConfigError("loss: unknown weighting '" + weighting + "'");
}

int clamped_l1(ad::Tape& t, int pred, const Eigen::VectorXd& gt, double clamp) {
  if (clamp <= 0.0) throw ArgumentError("clamped_l1: clamp must be > 0");
  if ((gt.array() < 0.0).any())
    throw ArgumentError("clamped_l1: gt distances must be >= 0");
  return ad::clamped_l1_mean(t, pred, gt, clamp);
}

int cross_entropy(ad::Tape& t, int logits,
                  std::shared_ptr<const std::vector<int>> labels) {
  return ad::cross_entropy_mean(t, logits, std::move(labels));
}

int uncertainty_combine(ad::Tape& t, const std::vector<int>& losses,
                        int log_vars) {
  const int k = static_cast<int>(losses.size());
  if (t.val(log_vars).rows() != 1 || t.val(log_vars).cols() != k)
    throw ArgumentError("uncertainty_combine: log_vars must be (1 x K)");
  int total = -1;
  for (int i = 0; i < k; ++i) {
    int s = ad::slice_cols(t, log_vars, i, 1);
    int term = ad::add(t, ad::mul(t, ad::exp_op(t, ad::neg(t, s)), losses[i]), s);
    total = total < 0 ? term : ad::add(t, total, term);
  }
  return total;
}

std::vector<int> near_surface_rows(const QuerySet& q, double clamp) {
  std::vector<int> rows;
  for (int i = 0; i < q.gt_distance.size(); ++i)
    if (q.gt_distance[i] < clamp) rows.push_back(i);
  return rows;
}

}  // namespace ircx
