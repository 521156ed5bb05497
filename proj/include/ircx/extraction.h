#pragma once

#include <functional>

#include "ircx/geometry.h"

namespace ircx {

// Regular sample grid over [-margin*h, 1+margin*h]^3, x-fastest layout.
struct ScalarGrid {
  int resolution = 0;  // samples per axis
  Vec3 origin = Vec3::Zero();
  double spacing = 0.0;
  Eigen::VectorXd values;  // resolution^3 unsigned distances
  Points gradients;        // resolution^3 x 3, or 0 rows when absent

  int index(int i, int j, int k) const {
    return (k * resolution + j) * resolution + i;
  }
  Vec3 position(int i, int j, int k) const {
    return origin + spacing * Vec3(i, j, k);
  }
  bool has_gradients() const {
    return gradients.rows() == values.size() && values.size() > 0;
  }
  void validate() const;
};

// Batch evaluator: fills one value per query row; when grad is non-null,
// also one gradient row per query. Must be row-independent so chunked
// evaluation is bit-identical to single-shot evaluation.
using UdfFn = std::function<void(const Points& queries, Eigen::VectorXd& values,
                                 Points* gradients)>;

struct GridConfig {
  int resolution = 64;
  int chunk_size = 65536;
  int margin = 3;  // voxels beyond the unit cube on each side
  bool gradients = true;

  void validate() const;
};

ScalarGrid eval_udf_grid(const UdfFn& fn, const GridConfig& cfg = {});

// Wraps a value-only evaluator with central differences (step h).
UdfFn fd_gradient_wrap(const UdfFn& fn, double h);

struct ExtractConfig {
  double iso_offset = 0.0;
  // Sign flips (and surface cubes) are only considered where the UDF is
  // below gate_scale * spacing; keeps far-field noise out of the mesh.
  double gate_scale = 2.0;

  void validate() const;
};

// Gradient-divergence pseudo-signs, then table-driven marching cubes on the
// pseudo-signed values. An all-positive sign field yields an empty mesh.
TriMesh pseudo_sign_marching_cubes(const ScalarGrid& grid,
                                   const ExtractConfig& cfg = {});

// Analytic fields used by oracles and the extract self-check.
UdfFn sphere_udf(const Vec3& center, double radius);
UdfFn plane_udf(double z0);

}  // namespace ircx
