#pragma once

#include <cstdint>
#include <vector>

#include "ircx/geometry.h"

namespace ircx {

// Area-weighted uniform surface samples; labels inherited from faces.
PointCloud sample_surface(const TriMesh& mesh, int n, uint64_t seed);

struct OffSurfaceConfig {
  std::vector<double> noise_sigmas{0.08, 0.02, 0.003};
  double uniform_fraction = 0.05;
  double margin = 0.1;  // queries are clamped to [-margin, 1+margin]^3
};

// Gaussian-perturbed surface samples mixed with uniform samples in [0,1]^3.
// gt_distance is exact; gt_label is the nearest face's label when present.
QuerySet sample_off_surface(const TriMesh& mesh, int m,
                            const OffSurfaceConfig& cfg, uint64_t seed);

// Farthest-point sampling; the start point and all ties are resolved by
// lexicographic coordinate comparison, so the selection depends only on the
// point set, not its order. target == n returns the identity order.
std::vector<int> farthest_point_sample(const Points& points, int target);

}  // namespace ircx
