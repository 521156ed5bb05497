#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ircx/geometry.h"
#include "ircx/tensor.h"

namespace ircx::nn {

using ad::Mat;
using ad::Tape;

// kaiming_out keys the uniform bound to fan-out instead of fan-in, which makes
// a layer's weight rows independent of how many input channels exist. Heads
// that see either d or d+l input columns then share the first d rows exactly.
enum class Init { kaiming_in, kaiming_out, zeros };

// Deterministic per-row init: row r of `name` is drawn from its own RNG
// stream keyed by (seed, name, r), so a shape change in one parameter never
// shifts the draws of any other, and wider matrices extend narrower ones
// column-prefix-exactly.
Mat init_matrix(int rows, int cols, Init mode, uint64_t seed,
                const std::string& name);

struct Param {
  std::string name;
  Mat value;
  Mat m, v;  // Adam moments, sized on first optimizer step
  bool trainable = true;
};

class ParamStore {
 public:
  int add(const std::string& name, int rows, int cols, Init init, uint64_t seed);
  int add_value(const std::string& name, Mat value);

  bool has(const std::string& name) const { return by_name_.count(name) > 0; }
  int index(const std::string& name) const;  // ArgumentError if missing
  Param& at(int i) { return params_[i]; }
  const Param& at(int i) const { return params_[i]; }
  int count() const { return static_cast<int>(params_.size()); }

  void set_trainable(const std::string& prefix, bool trainable);
  int64_t scalar_count(const std::string& prefix = "",
                       bool trainable_only = false) const;
  std::vector<std::string> names(const std::string& prefix = "") const;

 private:
  std::vector<Param> params_;
  std::map<std::string, int> by_name_;
};

// One forward pass: a tape plus lazily created parameter leaves, so gradients
// land in tape nodes that map back to store parameters.
struct Pass {
  explicit Pass(ParamStore& s) : store(&s), node_of(s.count(), -1) {}

  ParamStore* store;
  Tape tape;
  std::vector<int> node_of;  // param index -> tape node, -1 until used

  int p(int param_index);
  int leaf(Mat m) { return tape.leaf(std::move(m)); }
  const Mat& val(int node) const { return tape.val(node); }

  // After backward: gradient of a parameter, zero matrix if it never
  // entered the graph.
  Mat grad_of(int param_index);
};

struct Linear {
  int w = -1, b = -1;  // param indices, b = -1 when bias-free
  int in = 0, out = 0;

  static Linear create(ParamStore& ps, const std::string& name, int in, int out,
                       uint64_t seed, Init weight_init = Init::kaiming_in,
                       bool bias = true);
  int operator()(Pass& p, int x) const;
};

struct Mlp {
  std::vector<Linear> layers;  // relu between layers, none after the last

  static Mlp create(ParamStore& ps, const std::string& name,
                    const std::vector<int>& dims, uint64_t seed,
                    Init first_init = Init::kaiming_in);
  int operator()(Pass& p, int x) const;
};

// Flattened center/neighbor pairs for k-NN structured ops; row i*k+j is the
// j-th neighbor of center i. rel holds center_coord - neighbor_coord rows.
struct NeighborLists {
  int k = 0;
  std::shared_ptr<const std::vector<int>> center;
  std::shared_ptr<const std::vector<int>> neighbor;
  Mat rel;
  Mat neighbor_coords;  // (n*k x 3), for rebuilding rel against a live query node
};

NeighborLists knn_pairs(const Points& queries, const Points& support, int k);

// Inverse-distance interpolation stencil from a coarse set onto fine coords.
struct Interp {
  int k = 0;
  std::shared_ptr<const std::vector<int>> source;  // (n_fine*k) coarse rows
  Mat weights;                                     // (n_fine*k x 1), sums to 1 per point
};

Interp idw_interp(const Points& fine, const Points& coarse, int k = 3,
                  double eps = 1e-8);

// values (coarse x c) -> (fine x c) under a fixed stencil.
int apply_interp(Pass& p, int values, const Interp& it);

// Vector self-attention block (residual): y_i = x_i +
// fc2( sum_j softmax_j(gamma(phi(h_i) - psi(h_j) + delta_ij)) . (alpha(h_j) + delta_ij) )
// with h = relu(fc1(x)) and delta_ij = theta(p_i - p_j). fc2 zero-init makes
// the block the identity at initialization.
struct PtBlock {
  int channels = 0;
  Linear fc1, phi, psi, alpha, theta1, theta2, gamma1, gamma2, fc2;

  static PtBlock create(ParamStore& ps, const std::string& name, int channels,
                        uint64_t seed);
  int operator()(Pass& p, int x, const NeighborLists& nb) const;
};

// Max-pool features over each kept point's k-NN in the source set, then
// a linear projection to out channels.
struct TransitionDown {
  Linear proj;

  static TransitionDown create(ParamStore& ps, const std::string& name, int in,
                               int out, uint64_t seed);
  int operator()(Pass& p, int x, const NeighborLists& pool_nb) const;
};

// IDW-interpolate coarse features to fine coords and add a projected skip.
struct TransitionUp {
  Linear up, skip;

  static TransitionUp create(ParamStore& ps, const std::string& name,
                             int coarse_in, int fine_in, int out, uint64_t seed);
  int operator()(Pass& p, int coarse, int fine_skip, const Interp& it) const;
};

// Geometry shared by every forward pass over one point set: FPS subsets per
// scale, per-scale self k-NN, pooling k-NN into the parent scale, and the
// interpolation stencil back up. Built once per scene and reused.
struct PyramidLevel {
  Points coords;
  std::vector<int> parent_rows;  // rows of the previous level kept by FPS
  NeighborLists self_nb;
  NeighborLists pool_nb;  // this level's points against the previous level
  Interp up;              // from this level back to the previous level
};

struct PointPyramid {
  std::vector<PyramidLevel> levels;  // level 0 carries the input coords

  static PointPyramid build(const Points& coords, int scale_count, double ratio,
                            int neighbors);
  int level_count() const { return static_cast<int>(levels.size()); }
};

}  // namespace ircx::nn
