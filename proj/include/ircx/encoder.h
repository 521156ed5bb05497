#pragma once

#include "ircx/nn.h"

namespace ircx {

// Down/up UNet of point-transformer blocks over a PointPyramid. The encoder
// and the contextualiser are both instances of this with different in/out
// widths and head init.
struct PtUnetConfig {
  std::vector<int> channels;
  std::vector<int> blocks;  // per encode scale; decode path runs 1 per scale
  int neighbors = 8;
  double ratio = 0.25;
  int in_dim = 3;
  int out_dim = 32;
  nn::Init head_init = nn::Init::kaiming_in;

  int scale_count() const { return static_cast<int>(channels.size()); }
  void validate() const;
};

struct PtUnet {
  PtUnetConfig cfg;
  nn::Linear stem;
  std::vector<std::vector<nn::PtBlock>> enc_blocks;
  std::vector<nn::TransitionDown> downs;  // [s] maps scale s -> s+1
  std::vector<nn::TransitionUp> ups;      // [s] maps scale s+1 -> s
  std::vector<nn::PtBlock> dec_blocks;    // one per decode scale
  nn::Linear head;

  static PtUnet create(nn::ParamStore& ps, const std::string& prefix,
                       const PtUnetConfig& cfg, uint64_t seed);
  // x: (N x in_dim) node over pyramid level-0 points. Throws ConfigError if
  // the input cloud is too small for the configured downsampling chain.
  int forward(nn::Pass& p, int x, const nn::PointPyramid& py) const;
};

struct EncoderConfig {
  std::vector<int> channels{32, 64, 128, 256, 512};
  std::vector<int> blocks{1, 1, 1, 1, 1};
  int neighbors = 8;
  double ratio = 0.25;
  int out_dim = 32;  // d

  void validate() const;
  PtUnetConfig unet() const;
};

// E_g producer: coords in, one out_dim feature per input point.
struct Encoder {
  EncoderConfig cfg;
  PtUnet unet;

  static Encoder create(nn::ParamStore& ps, const std::string& prefix,
                        const EncoderConfig& cfg, uint64_t seed);
  int forward(nn::Pass& p, const nn::PointPyramid& py) const;
};

int64_t count_parameters(const EncoderConfig& cfg);

}  // namespace ircx
