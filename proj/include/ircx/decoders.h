#pragma once

#include "ircx/nn.h"

namespace ircx {

struct AggregatorConfig {
  int k = 4;       // nearest encoding vectors per query
  int hidden = 32; // attention scorer width
};

// Scalar attention over the K nearest surface features of each query:
// a_j = softmax_j(score(h_j, q - p_j)), output sum_j a_j h_j. The scorer's
// first layer is a sum of a feature map and a position map so that extra
// (zero-valued) feature channels cannot disturb the score — heads built for
// width d and d+l then score identically whenever the extra channels are 0.
struct Aggregator {
  AggregatorConfig cfg;
  int channels = 0;
  nn::Linear score_feat;  // channels -> hidden, fan-out keyed rows
  nn::Linear score_pos;   // 3 -> hidden, bias-free
  nn::Linear score_out;   // hidden -> 1

  static Aggregator create(nn::ParamStore& ps, const std::string& prefix,
                           int channels, const AggregatorConfig& cfg,
                           uint64_t seed);
  // features: (N x channels) node; queries: (M x 3) node; nb pairs queries
  // against the N surface points with k = cfg.k. Returns (M x channels).
  int forward(nn::Pass& p, int features, int queries,
              const nn::NeighborLists& nb) const;
};

// Aggregated feature + query coords -> softplus distance (M x 1), >= 0 by
// construction and differentiable w.r.t. the query position.
struct UdfHead {
  Aggregator agg;
  nn::Mlp mlp;

  static UdfHead create(nn::ParamStore& ps, const std::string& prefix,
                        int channels, const AggregatorConfig& agg_cfg,
                        const std::vector<int>& hidden, uint64_t seed);
  int forward(nn::Pass& p, int features, int queries,
              const nn::NeighborLists& nb) const;
};

// Aggregated feature -> class logits (M x C). No positional input: class
// identity is carried by the features. First layer fan-out keyed so the d and
// d+l variants share their first d weight rows exactly.
struct SegHead {
  Aggregator agg;
  nn::Mlp mlp;
  int class_count = 0;

  static SegHead create(nn::ParamStore& ps, const std::string& prefix,
                        int channels, int class_count,
                        const AggregatorConfig& agg_cfg,
                        const std::vector<int>& hidden, uint64_t seed);
  int forward(nn::Pass& p, int features, int queries,
              const nn::NeighborLists& nb) const;
};

}  // namespace ircx
