#include "ircx/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ircx/errors.h"
#include "ircx/rng.h"
#include "ircx/spatial.h"

namespace ircx {

PointCloud sample_surface(const TriMesh& mesh, int n, uint64_t seed) {
  mesh.validate();
  if (n < 1) throw ArgumentError("sample_surface: n must be >= 1");
  const int nf = static_cast<int>(mesh.faces.rows());
  std::vector<double> cum(nf);
  double acc = 0.0;
  for (int f = 0; f < nf; ++f) {
    acc += mesh.face_area(f);
    cum[f] = acc;
  }
  if (acc <= 0.0) throw ArgumentError("sample_surface: mesh has zero area");

  Rng rng = stream(seed, "surface");
  PointCloud out;
  out.points.resize(n, 3);
  if (mesh.has_labels()) out.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    const int f = static_cast<int>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const int fc = std::min(f, nf - 1);
    const Vec3 a = mesh.vertices.row(mesh.faces(fc, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(fc, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(fc, 2));
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    out.points.row(i) = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
    if (mesh.has_labels()) out.labels[i] = mesh.face_labels[fc];
  }
  return out;
}

QuerySet sample_off_surface(const TriMesh& mesh, int m,
                            const OffSurfaceConfig& cfg, uint64_t seed) {
  if (cfg.uniform_fraction < 0.0 || cfg.uniform_fraction > 1.0)
    throw ConfigError("sample_off_surface: uniform_fraction outside [0,1]");
  if (cfg.noise_sigmas.empty() && cfg.uniform_fraction < 1.0)
    throw ConfigError("sample_off_surface: empty sigma list needs uniform_fraction = 1");
  if (m < 1) throw ArgumentError("sample_off_surface: m must be >= 1");

  const int n_uniform = static_cast<int>(std::llround(m * cfg.uniform_fraction));
  const int n_noise = m - n_uniform;
  const int ns = static_cast<int>(cfg.noise_sigmas.size());

  QuerySet out;
  out.points.resize(m, 3);

  Rng urng = stream(seed, "uniform-queries");
  int row = 0;
  for (int i = 0; i < n_uniform; ++i, ++row)
    for (int a = 0; a < 3; ++a) out.points(row, a) = urng.uniform();

  if (n_noise > 0) {
    PointCloud base = sample_surface(mesh, n_noise, hash_str(seed, "query-base"));
    int b = 0;
    for (int s = 0; s < ns; ++s) {
      const int cnt = n_noise / ns + (s < n_noise % ns ? 1 : 0);
      Rng nrng = stream(seed, "noise", static_cast<uint64_t>(s));
      const double sigma = cfg.noise_sigmas[s];
      for (int i = 0; i < cnt; ++i, ++b, ++row) {
        for (int a = 0; a < 3; ++a) {
          double v = base.points(b, a) + sigma * nrng.normal();
          out.points(row, a) = std::clamp(v, -cfg.margin, 1.0 + cfg.margin);
        }
      }
    }
  }

  MeshDistanceQuery mdq(mesh);
  out.gt_distance.resize(m);
  if (mesh.has_labels()) out.gt_label.resize(m);
  for (int i = 0; i < m; ++i) {
    int face = -1;
    out.gt_distance[i] = mdq.distance(out.points.row(i), &face);
    if (mesh.has_labels()) out.gt_label[i] = mesh.face_labels[face];
  }
  return out;
}

std::vector<int> farthest_point_sample(const Points& points, int target) {
  const int n = static_cast<int>(points.rows());
  if (target < 1 || target > n)
    throw ArgumentError("farthest_point_sample: bad target size");
  std::vector<int> sel;
  if (target == n) {
    sel.resize(n);
    for (int i = 0; i < n; ++i) sel[i] = i;
    return sel;
  }

  auto lex_less = [&](int a, int b) {
    for (int c = 0; c < 3; ++c) {
      if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
    }
    return a < b;
  };
  int start = 0;
  for (int i = 1; i < n; ++i)
    if (lex_less(i, start)) start = i;

  sel.reserve(target);
  sel.push_back(start);
  Eigen::VectorXd mind(n);
  for (int i = 0; i < n; ++i)
    mind[i] = (points.row(i) - points.row(start)).squaredNorm();
  for (int t = 1; t < target; ++t) {
    int far = 0;
    for (int i = 1; i < n; ++i) {
      if (mind[i] > mind[far] || (mind[i] == mind[far] && lex_less(i, far)))
        far = i;
    }
    sel.push_back(far);
    for (int i = 0; i < n; ++i)
      mind[i] = std::min(mind[i], (points.row(i) - points.row(far)).squaredNorm());
  }
  return sel;
}

}  // namespace ircx
