#pragma once

#include <memory>
#include <vector>

#include "ircx/geometry.h"
#include "ircx/tensor.h"

namespace ircx {

struct LossConfig {
  double clamp = 0.1;            // distance clamp in unit-cube scale
  bool near_surface_seg = true;  // supervise semantics only where gt < clamp
  std::string weighting = "single";  // "single" | "uncertainty"

  void validate() const;
};

// mean |min(pred, c) - min(gt, c)|
int clamped_l1(ad::Tape& t, int pred, const Eigen::VectorXd& gt, double clamp);

// mean -log softmax(logits)[label]
int cross_entropy(ad::Tape& t, int logits,
                  std::shared_ptr<const std::vector<int>> labels);

// sum_k exp(-s_k) L_k + s_k over scalar loss nodes; log_vars is a (1 x K) node.
int uncertainty_combine(ad::Tape& t, const std::vector<int>& losses,
                        int log_vars);

// Rows of the query set eligible for semantic supervision.
std::vector<int> near_surface_rows(const QuerySet& q, double clamp);

}  // namespace ircx
