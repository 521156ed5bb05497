#pragma once

#include "ircx/encoder.h"

namespace ircx {

// Compact network over the frozen encoding E_g producing l context channels
// E_c; fused features are E_g with E_c appended. Variants mirror the ablation
// table: a 5-scale UNet (default), a 3-scale UNet, and a pointwise MLP.
struct ContextConfig {
  std::string variant = "unet5";  // unet5 | unet3 | mlp
  std::vector<int> channels{32, 32, 64, 64, 128};
  std::vector<int> blocks{1, 1, 1, 1, 1};
  int neighbors = 8;
  double ratio = 0.25;
  int l = 4;
  std::vector<int> mlp_hidden{64, 64};

  void validate() const;
  int scale_count() const;  // 5, 3 or 0 (mlp)
};

// Named presets: ctx.unet5, ctx.unet3, ctx.mlp, ctx.wide, ctx.deep,
// ctx.wide-deep, ctx.l2, ctx.l1. Throws ConfigError on unknown names.
ContextConfig context_preset(const std::string& name);

struct Contextualizer {
  ContextConfig cfg;
  int d = 0;  // encoding width it consumes
  PtUnet unet;  // unet variants; input is coords concat E_g
  nn::Mlp mlp;  // mlp variant; input is E_g only (no geometry by design)

  static Contextualizer create(nn::ParamStore& ps, const std::string& prefix,
                               const ContextConfig& cfg, int d, uint64_t seed);
  // eg: (N x d) node aligned with pyramid level-0 points -> (N x l) node.
  int forward(nn::Pass& p, int eg, const nn::PointPyramid& py) const;
};

// Columnwise concat [E_g | E_c]; ArgumentError on row mismatch. E_g columns
// pass through untouched.
int fuse(nn::Pass& p, int eg, int ec);
nn::Mat fuse(const nn::Mat& eg, const nn::Mat& ec);

int64_t count_parameters(const ContextConfig& cfg, int d);

}  // namespace ircx
