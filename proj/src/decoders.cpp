#include "ircx/decoders.h"

#include "ircx/errors.h"

namespace ircx {

using nn::Pass;

Aggregator Aggregator::create(nn::ParamStore& ps, const std::string& prefix,
                              int channels, const AggregatorConfig& cfg,
                              uint64_t seed) {
  if (cfg.k < 1) throw ConfigError("aggregator: k must be >= 1");
  if (cfg.hidden < 1) throw ConfigError("aggregator: hidden must be >= 1");
  Aggregator a;
  a.cfg = cfg;
  a.channels = channels;
  a.score_feat = nn::Linear::create(ps, prefix + ".sf", channels, cfg.hidden,
                                    seed, nn::Init::kaiming_out);
  a.score_pos = nn::Linear::create(ps, prefix + ".sp", 3, cfg.hidden, seed,
                                   nn::Init::kaiming_in, /*bias=*/false);
  a.score_out = nn::Linear::create(ps, prefix + ".so", cfg.hidden, 1, seed);
  return a;
}

int Aggregator::forward(Pass& p, int features, int queries,
                        const nn::NeighborLists& nb) const {
  if (nb.k != cfg.k)
    throw ArgumentError("aggregator: neighbor lists built with k=" +
                        std::to_string(nb.k) + ", configured k=" +
                        std::to_string(cfg.k));
  if (p.val(features).cols() != channels)
    throw ConfigError("aggregator expects " + std::to_string(channels) +
                      " channels, got " + std::to_string(p.val(features).cols()));
  ad::Tape& t = p.tape;
  int h = ad::gather_rows(t, features, nb.neighbor);
  int qg = ad::gather_rows(t, queries, nb.center);
  int rel = ad::sub(t, qg, p.leaf(nb.neighbor_coords));
  int s = ad::add(t, score_feat(p, h), score_pos(p, rel));
  s = score_out(p, ad::relu(t, s));
  int a = ad::group_softmax(t, s, nb.k);
  return ad::group_sum(t, ad::row_scale(t, h, a), nb.k);
}

UdfHead UdfHead::create(nn::ParamStore& ps, const std::string& prefix,
                        int channels, const AggregatorConfig& agg_cfg,
                        const std::vector<int>& hidden, uint64_t seed) {
  UdfHead u;
  u.agg = Aggregator::create(ps, prefix + ".agg", channels, agg_cfg, seed);
  std::vector<int> dims{channels + 3};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  u.mlp = nn::Mlp::create(ps, prefix + ".mlp", dims, seed);
  return u;
}

int UdfHead::forward(Pass& p, int features, int queries,
                     const nn::NeighborLists& nb) const {
  int fused = agg.forward(p, features, queries, nb);
  int x = ad::concat_cols(p.tape, fused, queries);
  return ad::softplus(p.tape, mlp(p, x));
}

SegHead SegHead::create(nn::ParamStore& ps, const std::string& prefix,
                        int channels, int class_count,
                        const AggregatorConfig& agg_cfg,
                        const std::vector<int>& hidden, uint64_t seed) {
  if (class_count < 2) throw ConfigError("seg head: class_count must be >= 2");
  SegHead s;
  s.class_count = class_count;
  s.agg = Aggregator::create(ps, prefix + ".agg", channels, agg_cfg, seed);
  std::vector<int> dims{channels};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(class_count);
  s.mlp = nn::Mlp::create(ps, prefix + ".mlp", dims, seed, nn::Init::kaiming_out);
  return s;
}

int SegHead::forward(Pass& p, int features, int queries,
                     const nn::NeighborLists& nb) const {
  int fused = agg.forward(p, features, queries, nb);
  return mlp(p, fused);
}

}  // namespace ircx
