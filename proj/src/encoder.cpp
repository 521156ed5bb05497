#include "ircx/encoder.h"

#include <cmath>

#include "ircx/errors.h"

namespace ircx {

using nn::Pass;
using nn::PointPyramid;

void PtUnetConfig::validate() const {
  if (channels.empty()) throw ConfigError("unet: no scales configured");
  if (blocks.size() != channels.size())
    throw ConfigError("unet: blocks list must match channels list");
  for (int c : channels)
    if (c < 1) throw ConfigError("unet: channel widths must be positive");
  for (int b : blocks)
    if (b < 1) throw ConfigError("unet: block counts must be positive");
  if (in_dim < 1 || out_dim < 1) throw ConfigError("unet: bad in/out dims");
  if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("unet: ratio in (0,1]");
  if (neighbors < 1) throw ConfigError("unet: neighbors must be >= 1");
}

PtUnet PtUnet::create(nn::ParamStore& ps, const std::string& prefix,
                      const PtUnetConfig& cfg, uint64_t seed) {
  cfg.validate();
  PtUnet u;
  u.cfg = cfg;
  const int S = cfg.scale_count();
  u.stem = nn::Linear::create(ps, prefix + ".stem", cfg.in_dim, cfg.channels[0],
                              seed);
  u.enc_blocks.resize(S);
  for (int s = 0; s < S; ++s) {
    if (s > 0)
      u.downs.push_back(nn::TransitionDown::create(
          ps, prefix + ".down" + std::to_string(s), cfg.channels[s - 1],
          cfg.channels[s], seed));
    for (int b = 0; b < cfg.blocks[s]; ++b)
      u.enc_blocks[s].push_back(nn::PtBlock::create(
          ps, prefix + ".s" + std::to_string(s) + ".b" + std::to_string(b),
          cfg.channels[s], seed));
  }
  for (int s = S - 2; s >= 0; --s) {
    u.ups.push_back(nn::TransitionUp::create(
        ps, prefix + ".up" + std::to_string(s), cfg.channels[s + 1],
        cfg.channels[s], cfg.channels[s], seed));
    u.dec_blocks.push_back(nn::PtBlock::create(
        ps, prefix + ".d" + std::to_string(s), cfg.channels[s], seed));
  }
  u.head =
      nn::Linear::create(ps, prefix + ".head", cfg.channels[0], cfg.out_dim,
                         seed, cfg.head_init);
  return u;
}

int PtUnet::forward(Pass& p, int x, const PointPyramid& py) const {
  const int S = cfg.scale_count();
  if (py.level_count() < S)
    throw ConfigError("unet: pyramid has fewer scales than the network");
  const int n0 = static_cast<int>(py.levels[0].coords.rows());
  if (static_cast<double>(n0) * std::pow(cfg.ratio, S - 1) < 1.0)
    throw ConfigError("unet: " + std::to_string(n0) +
                      " points cannot support " + std::to_string(S) +
                      " scales at ratio " + std::to_string(cfg.ratio));

  std::vector<int> skip(S);
  x = ad::relu(p.tape, stem(p, x));
  for (int s = 0; s < S; ++s) {
    if (s > 0) x = downs[s - 1](p, x, py.levels[s].pool_nb);
    for (const nn::PtBlock& blk : enc_blocks[s])
      x = blk(p, x, py.levels[s].self_nb);
    skip[s] = x;
  }
  int y = skip[S - 1];
  for (int i = 0; i < static_cast<int>(ups.size()); ++i) {
    const int s = S - 2 - i;  // destination scale
    y = ups[i](p, y, skip[s], py.levels[s + 1].up);
    y = dec_blocks[i](p, y, py.levels[s].self_nb);
  }
  return head(p, y);
}

void EncoderConfig::validate() const { unet().validate(); }

PtUnetConfig EncoderConfig::unet() const {
  PtUnetConfig u;
  u.channels = channels;
  u.blocks = blocks;
  u.neighbors = neighbors;
  u.ratio = ratio;
  u.in_dim = 3;
  u.out_dim = out_dim;
  u.head_init = nn::Init::kaiming_in;
  return u;
}

Encoder Encoder::create(nn::ParamStore& ps, const std::string& prefix,
                        const EncoderConfig& cfg, uint64_t seed) {
  Encoder e;
  e.cfg = cfg;
  e.unet = PtUnet::create(ps, prefix, cfg.unet(), seed);
  return e;
}

int Encoder::forward(Pass& p, const PointPyramid& py) const {
  int coords = p.leaf(nn::Mat(py.levels[0].coords));
  return unet.forward(p, coords, py);
}

int64_t count_parameters(const EncoderConfig& cfg) {
  cfg.validate();
  nn::ParamStore scratch;
  Encoder::create(scratch, "enc", cfg, 0);
  return scratch.scalar_count("enc");
}

}  // namespace ircx
