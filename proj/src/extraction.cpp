#include "ircx/extraction.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "ircx/errors.h"
#include "ircx/mc_tables.h"

namespace ircx {

void ScalarGrid::validate() const {
  if (resolution < 2) throw ArgumentError("ScalarGrid: resolution must be >= 2");
  if (spacing <= 0.0) throw ArgumentError("ScalarGrid: spacing must be positive");
  const std::int64_t n = static_cast<std::int64_t>(resolution);
  if (values.size() != n * n * n)
    throw ArgumentError("ScalarGrid: value count does not match resolution^3");
  if (gradients.rows() != 0 && gradients.rows() != values.size())
    throw ArgumentError("ScalarGrid: gradient count does not match resolution^3");
  if (values.size() > 0 && values.minCoeff() < -1e-12)
    throw ArgumentError("ScalarGrid: values must be non-negative");
}

void GridConfig::validate() const {
  if (resolution < 8) throw ArgumentError("GridConfig: resolution must be >= 8");
  if (chunk_size < 1) throw ArgumentError("GridConfig: chunk_size must be >= 1");
  if (margin < 0) throw ArgumentError("GridConfig: margin must be >= 0");
  if (resolution - 1 - 2 * margin < 1)
    throw ArgumentError("GridConfig: margin leaves no room for the unit cube");
}

void ExtractConfig::validate() const {
  if (gate_scale <= 0.0)
    throw ArgumentError("ExtractConfig: gate_scale must be positive");
}

ScalarGrid eval_udf_grid(const UdfFn& fn, const GridConfig& cfg) {
  cfg.validate();
  if (!fn) throw ArgumentError("eval_udf_grid: empty evaluator");

  ScalarGrid g;
  g.resolution = cfg.resolution;
  g.spacing = 1.0 / (cfg.resolution - 1 - 2 * cfg.margin);
  g.origin = Vec3::Constant(-cfg.margin * g.spacing);

  const int n = cfg.resolution;
  const std::int64_t total = static_cast<std::int64_t>(n) * n * n;
  g.values.resize(total);
  if (cfg.gradients) g.gradients.resize(total, 3);

  for (std::int64_t start = 0; start < total; start += cfg.chunk_size) {
    const int m = static_cast<int>(std::min<std::int64_t>(cfg.chunk_size, total - start));
    Points q(m, 3);
    for (int r = 0; r < m; ++r) {
      const std::int64_t idx = start + r;
      const int i = static_cast<int>(idx % n);
      const int j = static_cast<int>((idx / n) % n);
      const int k = static_cast<int>(idx / (static_cast<std::int64_t>(n) * n));
      q.row(r) = g.position(i, j, k).transpose();
    }
    Eigen::VectorXd vals;
    Points grads;
    fn(q, vals, cfg.gradients ? &grads : nullptr);
    if (vals.size() != m)
      throw ArgumentError("eval_udf_grid: evaluator returned wrong value count");
    g.values.segment(start, m) = vals;
    if (cfg.gradients) {
      if (grads.rows() != m)
        throw ArgumentError("eval_udf_grid: evaluator returned wrong gradient count");
      g.gradients.middleRows(start, m) = grads;
    }
  }
  g.validate();
  return g;
}

UdfFn fd_gradient_wrap(const UdfFn& fn, double h) {
  if (!fn) throw ArgumentError("fd_gradient_wrap: empty evaluator");
  if (h <= 0.0) throw ArgumentError("fd_gradient_wrap: step must be positive");
  return [fn, h](const Points& q, Eigen::VectorXd& values, Points* gradients) {
    fn(q, values, nullptr);
    if (!gradients) return;
    gradients->resize(q.rows(), 3);
    for (int a = 0; a < 3; ++a) {
      Points qp = q, qm = q;
      qp.col(a).array() += h;
      qm.col(a).array() -= h;
      Eigen::VectorXd vp, vm;
      fn(qp, vp, nullptr);
      fn(qm, vm, nullptr);
      gradients->col(a) = (vp - vm) / (2.0 * h);
    }
  };
}

namespace {

// Diverging-gradient test for the edge a -> b along +axis: the surface lies
// between the endpoints iff both gradients point back toward their own side.
bool edge_flips(const ScalarGrid& g, int a, int b, int axis, double gate) {
  if (g.values[a] > gate || g.values[b] > gate) return false;
  const Eigen::RowVector3d ga = g.gradients.row(a);
  const Eigen::RowVector3d gb = g.gradients.row(b);
  const double na = ga.norm(), nb = gb.norm();
  if (na < 1e-12 || nb < 1e-12) return false;
  return ga.dot(gb) < 0.0 && ga[axis] < 0.0 && gb[axis] > 0.0;
}

}  // namespace

TriMesh pseudo_sign_marching_cubes(const ScalarGrid& grid, const ExtractConfig& cfg) {
  grid.validate();
  cfg.validate();
  if (!grid.has_gradients())
    throw ArgumentError("pseudo_sign_marching_cubes: grid has no gradients");

  const int n = grid.resolution;
  const std::int64_t total = grid.values.size();
  const double gate = cfg.gate_scale * grid.spacing;

  // Per-vertex sign by majority vote over the incident axis-edge tests,
  // resolved in one descending scan so each vote reads an assigned neighbor.
  // Seeding at the max corner keeps the far side of an open surface positive.
  std::vector<std::int8_t> sign(static_cast<size_t>(total));
  const std::int64_t sx = 1, sy = n, sz = static_cast<std::int64_t>(n) * n;
  for (int k = n - 1; k >= 0; --k) {
    for (int j = n - 1; j >= 0; --j) {
      for (int i = n - 1; i >= 0; --i) {
        const std::int64_t idx = grid.index(i, j, k);
        int vote = 0;
        if (i + 1 < n) {
          const std::int64_t nb = idx + sx;
          vote += edge_flips(grid, static_cast<int>(idx), static_cast<int>(nb), 0, gate)
                      ? -sign[nb] : sign[nb];
        }
        if (j + 1 < n) {
          const std::int64_t nb = idx + sy;
          vote += edge_flips(grid, static_cast<int>(idx), static_cast<int>(nb), 1, gate)
                      ? -sign[nb] : sign[nb];
        }
        if (k + 1 < n) {
          const std::int64_t nb = idx + sz;
          vote += edge_flips(grid, static_cast<int>(idx), static_cast<int>(nb), 2, gate)
                      ? -sign[nb] : sign[nb];
        }
        sign[idx] = vote < 0 ? -1 : 1;  // ties positive
      }
    }
  }

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  std::unordered_map<std::int64_t, int> edge_vertex;  // global edge id -> vertex

  std::int64_t corner_id[8];
  double f[8];
  for (int k = 0; k + 1 < n; ++k) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        int mc = 0;
        double min_abs = std::numeric_limits<double>::infinity();
        for (int c = 0; c < 8; ++c) {
          const int* off = kMcCornerOffsets[c];
          const std::int64_t id = grid.index(i + off[0], j + off[1], k + off[2]);
          corner_id[c] = id;
          f[c] = sign[id] * grid.values[id] - cfg.iso_offset;
          min_abs = std::min(min_abs, grid.values[id]);
          if (f[c] < 0.0) mc |= 1 << c;
        }
        if (mc == 0 || mc == 255) continue;
        if (min_abs > gate) continue;  // sign wall away from the surface

        const int* table = kMcTriTable[mc];
        for (int t = 0; table[t] != -1; t += 3) {
          int vie[3];
          for (int m = 0; m < 3; ++m) {
            const int e = table[t + m];
            const int c0 = kMcEdgeCorners[e][0];
            const int c1 = kMcEdgeCorners[e][1];
            int axis = 0;
            for (int a = 0; a < 3; ++a)
              if (kMcCornerOffsets[c0][a] != kMcCornerOffsets[c1][a]) axis = a;
            const bool c0_low = kMcCornerOffsets[c0][axis] < kMcCornerOffsets[c1][axis];
            const std::int64_t low_id = c0_low ? corner_id[c0] : corner_id[c1];
            const std::int64_t key = low_id * 3 + axis;
            auto it = edge_vertex.find(key);
            if (it == edge_vertex.end()) {
              const double fa = f[c0], fb = f[c1];
              const double tt = fa / (fa - fb);
              const Vec3 pa = grid.origin +
                  grid.spacing * Vec3(i + kMcCornerOffsets[c0][0],
                                      j + kMcCornerOffsets[c0][1],
                                      k + kMcCornerOffsets[c0][2]);
              const Vec3 pb = grid.origin +
                  grid.spacing * Vec3(i + kMcCornerOffsets[c1][0],
                                      j + kMcCornerOffsets[c1][1],
                                      k + kMcCornerOffsets[c1][2]);
              it = edge_vertex.emplace(key, static_cast<int>(verts.size())).first;
              verts.push_back(pa + tt * (pb - pa));
            }
            vie[m] = it->second;
          }
          if (vie[0] == vie[1] || vie[1] == vie[2] || vie[0] == vie[2]) continue;
          tris.push_back({vie[0], vie[1], vie[2]});
        }
      }
    }
  }

  TriMesh mesh;
  mesh.vertices.resize(static_cast<int>(verts.size()), 3);
  for (size_t r = 0; r < verts.size(); ++r)
    mesh.vertices.row(static_cast<int>(r)) = verts[r].transpose();
  mesh.faces.resize(static_cast<int>(tris.size()), 3);
  for (size_t r = 0; r < tris.size(); ++r)
    for (int c = 0; c < 3; ++c) mesh.faces(static_cast<int>(r), c) = tris[r][c];
  return mesh;
}

UdfFn sphere_udf(const Vec3& center, double radius) {
  if (radius <= 0.0) throw ArgumentError("sphere_udf: radius must be positive");
  return [center, radius](const Points& q, Eigen::VectorXd& values, Points* gradients) {
    const int m = static_cast<int>(q.rows());
    values.resize(m);
    if (gradients) gradients->resize(m, 3);
    for (int r = 0; r < m; ++r) {
      const Vec3 d = q.row(r).transpose() - center;
      const double dist = d.norm();
      values[r] = std::abs(dist - radius);
      if (gradients) {
        if (dist < 1e-12) {
          gradients->row(r) = Eigen::RowVector3d(0, 0, dist >= radius ? 1.0 : -1.0);
        } else {
          const double s = dist >= radius ? 1.0 : -1.0;
          gradients->row(r) = (s / dist) * d.transpose();
        }
      }
    }
  };
}

UdfFn plane_udf(double z0) {
  return [z0](const Points& q, Eigen::VectorXd& values, Points* gradients) {
    values = (q.col(2).array() - z0).abs();
    if (gradients) {
      gradients->resize(q.rows(), 3);
      gradients->col(0).setZero();
      gradients->col(1).setZero();
      for (int r = 0; r < q.rows(); ++r)
        (*gradients)(r, 2) = q(r, 2) >= z0 ? 1.0 : -1.0;
    }
  };
}

}  // namespace ircx
