#include "ircx/nn.h"

#include <cmath>

#include "ircx/errors.h"
#include "ircx/rng.h"
#include "ircx/sampling.h"
#include "ircx/spatial.h"

namespace ircx::nn {

Mat init_matrix(int rows, int cols, Init mode, uint64_t seed,
                const std::string& name) {
  if (rows < 1 || cols < 1) throw ArgumentError("init_matrix: empty shape");
  if (mode == Init::zeros) return Mat::Zero(rows, cols);
  const double fan = mode == Init::kaiming_in ? rows : cols;
  const double bound = std::sqrt(6.0 / fan);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    Rng g = stream(seed, name, static_cast<uint64_t>(r));
    for (int c = 0; c < cols; ++c) m(r, c) = (2.0 * g.uniform() - 1.0) * bound;
  }
  return m;
}

int ParamStore::add(const std::string& name, int rows, int cols, Init init,
                    uint64_t seed) {
  return add_value(name, init_matrix(rows, cols, init, seed, name));
}

int ParamStore::add_value(const std::string& name, Mat value) {
  if (by_name_.count(name))
    throw ArgumentError("parameter '" + name + "' already exists");
  Param p;
  p.name = name;
  p.value = std::move(value);
  params_.push_back(std::move(p));
  int idx = static_cast<int>(params_.size()) - 1;
  by_name_[name] = idx;
  return idx;
}

int ParamStore::index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    throw ArgumentError("no parameter named '" + name + "'");
  return it->second;
}

void ParamStore::set_trainable(const std::string& prefix, bool trainable) {
  for (Param& p : params_)
    if (p.name.rfind(prefix, 0) == 0) p.trainable = trainable;
}

int64_t ParamStore::scalar_count(const std::string& prefix,
                                 bool trainable_only) const {
  int64_t n = 0;
  for (const Param& p : params_) {
    if (!prefix.empty() && p.name.rfind(prefix, 0) != 0) continue;
    if (trainable_only && !p.trainable) continue;
    n += p.value.size();
  }
  return n;
}

std::vector<std::string> ParamStore::names(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const Param& p : params_)
    if (prefix.empty() || p.name.rfind(prefix, 0) == 0) out.push_back(p.name);
  return out;
}

int Pass::p(int param_index) {
  if (param_index < 0 || param_index >= store->count())
    throw ArgumentError("Pass: parameter index out of range");
  if (param_index >= static_cast<int>(node_of.size()))
    node_of.resize(store->count(), -1);
  if (node_of[param_index] == -1)
    node_of[param_index] = tape.leaf(store->at(param_index).value);
  return node_of[param_index];
}

Mat Pass::grad_of(int param_index) {
  const Param& prm = store->at(param_index);
  if (param_index >= static_cast<int>(node_of.size()) ||
      node_of[param_index] == -1)
    return Mat::Zero(prm.value.rows(), prm.value.cols());
  return tape.grad(node_of[param_index]);
}

Linear Linear::create(ParamStore& ps, const std::string& name, int in, int out,
                      uint64_t seed, Init weight_init, bool bias) {
  Linear l;
  l.in = in;
  l.out = out;
  l.w = ps.add(name + ".w", in, out, weight_init, seed);
  if (bias) l.b = ps.add(name + ".b", 1, out, Init::zeros, seed);
  return l;
}

int Linear::operator()(Pass& p, int x) const {
  if (p.val(x).cols() != in)
    throw ConfigError("linear layer expects " + std::to_string(in) +
                      " channels, got " + std::to_string(p.val(x).cols()));
  int y = ad::matmul(p.tape, x, p.p(w));
  if (b != -1) y = ad::add_bias(p.tape, y, p.p(b));
  return y;
}

Mlp Mlp::create(ParamStore& ps, const std::string& name,
                const std::vector<int>& dims, uint64_t seed, Init first_init) {
  if (dims.size() < 2) throw ArgumentError("mlp needs at least 2 dims");
  Mlp m;
  for (size_t i = 0; i + 1 < dims.size(); ++i)
    m.layers.push_back(Linear::create(
        ps, name + "." + std::to_string(i), dims[i], dims[i + 1], seed,
        i == 0 ? first_init : Init::kaiming_in));
  return m;
}

int Mlp::operator()(Pass& p, int x) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    x = layers[i](p, x);
    if (i + 1 < layers.size()) x = ad::relu(p.tape, x);
  }
  return x;
}

NeighborLists knn_pairs(const Points& queries, const Points& support, int k) {
  if (k < 1) throw ArgumentError("knn_pairs: k must be >= 1");
  SpatialIndex index(support);
  const int n = static_cast<int>(queries.rows());
  auto center = std::make_shared<std::vector<int>>();
  auto neighbor = std::make_shared<std::vector<int>>();
  center->reserve(static_cast<size_t>(n) * k);
  neighbor->reserve(static_cast<size_t>(n) * k);
  NeighborLists nb;
  nb.k = k;
  nb.rel.resize(n * k, 3);
  nb.neighbor_coords.resize(n * k, 3);
  std::vector<int> idx;
  std::vector<double> dist;
  for (int i = 0; i < n; ++i) {
    index.knn(queries.row(i).transpose(), k, idx, dist);
    for (int j = 0; j < k; ++j) {
      center->push_back(i);
      neighbor->push_back(idx[j]);
      nb.rel.row(i * k + j) = queries.row(i) - support.row(idx[j]);
      nb.neighbor_coords.row(i * k + j) = support.row(idx[j]);
    }
  }
  nb.center = std::move(center);
  nb.neighbor = std::move(neighbor);
  return nb;
}

Interp idw_interp(const Points& fine, const Points& coarse, int k, double eps) {
  const int kc = std::min<int>(k, static_cast<int>(coarse.rows()));
  if (kc < 1) throw ArgumentError("idw_interp: empty coarse set");
  SpatialIndex index(coarse);
  const int n = static_cast<int>(fine.rows());
  Interp it;
  it.k = kc;
  auto source = std::make_shared<std::vector<int>>();
  source->reserve(static_cast<size_t>(n) * kc);
  it.weights.resize(n * kc, 1);
  std::vector<int> idx;
  std::vector<double> dist;
  for (int i = 0; i < n; ++i) {
    index.knn(fine.row(i).transpose(), kc, idx, dist);
    double total = 0.0;
    for (int j = 0; j < kc; ++j) total += 1.0 / (dist[j] + eps);
    for (int j = 0; j < kc; ++j) {
      source->push_back(idx[j]);
      it.weights(i * kc + j, 0) = (1.0 / (dist[j] + eps)) / total;
    }
  }
  it.source = std::move(source);
  return it;
}

int apply_interp(Pass& p, int values, const Interp& it) {
  int gathered = ad::gather_rows(p.tape, values, it.source);
  int w = p.leaf(it.weights);
  return ad::group_sum(p.tape, ad::row_scale(p.tape, gathered, w), it.k);
}

PtBlock PtBlock::create(ParamStore& ps, const std::string& name, int channels,
                        uint64_t seed) {
  PtBlock b;
  b.channels = channels;
  b.fc1 = Linear::create(ps, name + ".fc1", channels, channels, seed);
  b.phi = Linear::create(ps, name + ".phi", channels, channels, seed);
  b.psi = Linear::create(ps, name + ".psi", channels, channels, seed);
  b.alpha = Linear::create(ps, name + ".alpha", channels, channels, seed);
  b.theta1 = Linear::create(ps, name + ".theta1", 3, channels, seed);
  b.theta2 = Linear::create(ps, name + ".theta2", channels, channels, seed);
  b.gamma1 = Linear::create(ps, name + ".gamma1", channels, channels, seed);
  b.gamma2 = Linear::create(ps, name + ".gamma2", channels, channels, seed);
  b.fc2 = Linear::create(ps, name + ".fc2", channels, channels, seed, Init::zeros);
  return b;
}

int PtBlock::operator()(Pass& p, int x, const NeighborLists& nb) const {
  if (p.val(x).cols() != channels)
    throw ConfigError("pt_block expects " + std::to_string(channels) +
                      " channels, got " + std::to_string(p.val(x).cols()));
  Tape& t = p.tape;
  int h = ad::relu(t, fc1(p, x));
  int phi_i = ad::gather_rows(t, phi(p, h), nb.center);
  int psi_j = ad::gather_rows(t, psi(p, h), nb.neighbor);
  int alpha_j = ad::gather_rows(t, alpha(p, h), nb.neighbor);
  int rel = p.leaf(nb.rel);
  int delta = theta2(p, ad::relu(t, theta1(p, rel)));
  int attn = ad::add(t, ad::sub(t, phi_i, psi_j), delta);
  int scores = gamma2(p, ad::relu(t, gamma1(p, attn)));
  int w = ad::group_softmax(t, scores, nb.k);
  int vals = ad::add(t, alpha_j, delta);
  int agg = ad::group_sum(t, ad::mul(t, w, vals), nb.k);
  return ad::add(t, x, fc2(p, agg));
}

TransitionDown TransitionDown::create(ParamStore& ps, const std::string& name,
                                      int in, int out, uint64_t seed) {
  TransitionDown td;
  td.proj = Linear::create(ps, name + ".proj", in, out, seed);
  return td;
}

int TransitionDown::operator()(Pass& p, int x,
                               const NeighborLists& pool_nb) const {
  int gathered = ad::gather_rows(p.tape, x, pool_nb.neighbor);
  int pooled = ad::group_max(p.tape, gathered, pool_nb.k);
  return proj(p, pooled);
}

TransitionUp TransitionUp::create(ParamStore& ps, const std::string& name,
                                  int coarse_in, int fine_in, int out,
                                  uint64_t seed) {
  TransitionUp tu;
  tu.up = Linear::create(ps, name + ".up", coarse_in, out, seed);
  tu.skip = Linear::create(ps, name + ".skip", fine_in, out, seed);
  return tu;
}

int TransitionUp::operator()(Pass& p, int coarse, int fine_skip,
                             const Interp& it) const {
  int u = apply_interp(p, up(p, coarse), it);
  return ad::add(p.tape, u, skip(p, fine_skip));
}

PointPyramid PointPyramid::build(const Points& coords, int scale_count,
                                 double ratio, int neighbors) {
  if (scale_count < 1) throw ArgumentError("pyramid: need at least one scale");
  if (ratio <= 0.0 || ratio > 1.0) throw ArgumentError("pyramid: ratio in (0,1]");
  PointPyramid py;
  py.levels.resize(scale_count);
  py.levels[0].coords = coords;
  const int n0 = static_cast<int>(coords.rows());
  if (n0 < 1) throw ArgumentError("pyramid: empty point set");
  py.levels[0].self_nb =
      knn_pairs(coords, coords, std::min(neighbors, n0));
  for (int s = 1; s < scale_count; ++s) {
    const Points& prev = py.levels[s - 1].coords;
    const int np = static_cast<int>(prev.rows());
    int ns = std::max(1, static_cast<int>(std::llround(np * ratio)));
    ns = std::min(ns, np);
    PyramidLevel& lv = py.levels[s];
    lv.parent_rows = farthest_point_sample(prev, ns);
    lv.coords.resize(ns, 3);
    for (int i = 0; i < ns; ++i) lv.coords.row(i) = prev.row(lv.parent_rows[i]);
    lv.self_nb = knn_pairs(lv.coords, lv.coords, std::min(neighbors, ns));
    lv.pool_nb = knn_pairs(lv.coords, prev, std::min(neighbors, np));
    lv.up = idw_interp(prev, lv.coords, 3);
  }
  return py;
}

}  // namespace ircx::nn
