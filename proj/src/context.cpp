#include "ircx/context.h"

#include "ircx/errors.h"

namespace ircx {

using nn::Pass;

void ContextConfig::validate() const {
  if (l < 1) throw ConfigError("context: l must be >= 1");
  if (variant == "mlp") {
    if (mlp_hidden.empty()) throw ConfigError("context: mlp needs hidden dims");
    return;
  }
  if (variant != "unet5" && variant != "unet3")
    throw ConfigError("context: unknown variant '" + variant + "'");
  const int S = scale_count();
  if (static_cast<int>(channels.size()) < S)
    throw ConfigError("context: " + variant + " needs " + std::to_string(S) +
                      " channel widths");
  if (static_cast<int>(blocks.size()) < S)
    throw ConfigError("context: " + variant + " needs " + std::to_string(S) +
                      " block counts");
}

int ContextConfig::scale_count() const {
  if (variant == "unet5") return 5;
  if (variant == "unet3") return 3;
  return 0;
}

ContextConfig context_preset(const std::string& name) {
  ContextConfig c;  // ctx.unet5 defaults
  if (name == "ctx.unet5") return c;
  if (name == "ctx.unet3") {
    c.variant = "unet3";
    c.channels = {32, 32, 64};
    c.blocks = {1, 1, 1};
    return c;
  }
  if (name == "ctx.mlp") {
    c.variant = "mlp";
    return c;
  }
  if (name == "ctx.wide") {
    c.channels = {32, 64, 128, 256, 512};
    return c;
  }
  if (name == "ctx.deep") {
    c.blocks = {1, 2, 3, 5, 2};
    return c;
  }
  if (name == "ctx.wide-deep") {
    c.channels = {32, 64, 128, 256, 512};
    c.blocks = {1, 2, 3, 5, 2};
    return c;
  }
  if (name == "ctx.l2") {
    c.l = 2;
    return c;
  }
  if (name == "ctx.l1") {
    c.l = 1;
    return c;
  }
  throw ConfigError("unknown context preset '" + name + "'");
}

Contextualizer Contextualizer::create(nn::ParamStore& ps,
                                      const std::string& prefix,
                                      const ContextConfig& cfg, int d,
                                      uint64_t seed) {
  cfg.validate();
  if (d < 1) throw ConfigError("context: encoding width must be >= 1");
  Contextualizer c;
  c.cfg = cfg;
  c.d = d;
  if (cfg.variant == "mlp") {
    std::vector<int> dims{d};
    dims.insert(dims.end(), cfg.mlp_hidden.begin(), cfg.mlp_hidden.end());
    dims.push_back(cfg.l);
    c.mlp = nn::Mlp::create(ps, prefix + ".mlp", dims, seed);
    // zero final layer: E_c starts at exactly zero (safe start)
    nn::Param& last = ps.at(c.mlp.layers.back().w);
    last.value.setZero();
    return c;
  }
  const int S = cfg.scale_count();
  PtUnetConfig u;
  u.channels.assign(cfg.channels.begin(), cfg.channels.begin() + S);
  u.blocks.assign(cfg.blocks.begin(), cfg.blocks.begin() + S);
  u.neighbors = cfg.neighbors;
  u.ratio = cfg.ratio;
  u.in_dim = 3 + d;
  u.out_dim = cfg.l;
  u.head_init = nn::Init::zeros;  // safe start
  c.unet = PtUnet::create(ps, prefix, u, seed);
  return c;
}

int Contextualizer::forward(Pass& p, int eg, const nn::PointPyramid& py) const {
  if (p.val(eg).cols() != d)
    throw ConfigError("context: encoding has " +
                      std::to_string(p.val(eg).cols()) + " channels, expected " +
                      std::to_string(d));
  if (p.val(eg).rows() != py.levels[0].coords.rows())
    throw ArgumentError("context: encoding rows do not match the point set");
  if (cfg.variant == "mlp") return mlp(p, eg);
  int coords = p.leaf(nn::Mat(py.levels[0].coords));
  int x = ad::concat_cols(p.tape, coords, eg);
  return unet.forward(p, x, py);
}

int fuse(Pass& p, int eg, int ec) {
  if (p.val(eg).rows() != p.val(ec).rows())
    throw ArgumentError("fuse: row mismatch");
  return ad::concat_cols(p.tape, eg, ec);
}

nn::Mat fuse(const nn::Mat& eg, const nn::Mat& ec) {
  if (eg.rows() != ec.rows()) throw ArgumentError("fuse: row mismatch");
  nn::Mat out(eg.rows(), eg.cols() + ec.cols());
  out << eg, ec;
  return out;
}

int64_t count_parameters(const ContextConfig& cfg, int d) {
  cfg.validate();
  nn::ParamStore scratch;
  Contextualizer::create(scratch, "ctx", cfg, d, 0);
  return scratch.scalar_count("ctx");
}

}  // namespace ircx
