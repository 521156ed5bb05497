#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ircx/errors.h"
#include "ircx/rng.h"
#include "ircx/spatial.h"

using namespace ircx;

TEST_CASE("knn on a line of points") {
  Points pts(3, 3);
  pts << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  SpatialIndex index(pts);
  const auto [idx, dist] = index.knn(Vec3(0.1, 0, 0), 2);
  CHECK(idx == std::vector<int>{0, 1});
  CHECK(dist[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(dist[1] == doctest::Approx(0.9).epsilon(1e-12));

  const auto [idx2, dist2] = index.knn(Vec3(2, 0, 0), 1);
  CHECK(idx2[0] == 2);
  CHECK(dist2[0] == 0.0);  // coincident point
}

TEST_CASE("knn matches the exhaustive oracle, ties to the lower index") {
  Rng rng = stream(17, "spatial");
  Points pts(200, 3);
  for (int i = 0; i < 200; ++i)
    for (int c = 0; c < 3; ++c) pts(i, c) = rng.uniform();
  // duplicated point forces an exact tie
  pts.row(150) = pts.row(3);
  SpatialIndex index(pts);

  for (int t = 0; t < 50; ++t) {
    Vec3 q(rng.uniform(), rng.uniform(), rng.uniform());
    if (t == 0) q = pts.row(3);  // query exactly on the duplicated pair
    const auto [idx, dist] = index.knn(q, 5);

    std::vector<std::pair<double, int>> all;
    for (int i = 0; i < 200; ++i)
      all.push_back({(pts.row(i).transpose() - q).norm(), i});
    std::sort(all.begin(), all.end());
    for (int j = 0; j < 5; ++j) {
      CHECK(idx[j] == all[j].second);
      CHECK(dist[j] == doctest::Approx(all[j].first).epsilon(1e-12));
    }
  }
}

TEST_CASE("knn rejects k beyond the point count") {
  Points pts(4, 3);
  pts.setRandom();
  SpatialIndex index(pts);
  CHECK_THROWS_AS(index.knn(Vec3(0, 0, 0), 5), ArgumentError);
}

TEST_CASE("MeshDistanceQuery equals the linear-scan oracle") {
  Rng rng = stream(21, "mdq");
  TriMesh m;
  const int faces = 30;
  m.vertices.resize(faces * 3, 3);
  for (int i = 0; i < faces * 3; ++i)
    for (int c = 0; c < 3; ++c) m.vertices(i, c) = rng.uniform();
  m.faces.resize(faces, 3);
  for (int f = 0; f < faces; ++f) m.faces.row(f) << f * 3, f * 3 + 1, f * 3 + 2;

  MeshDistanceQuery q(m);
  for (int t = 0; t < 100; ++t) {
    const Vec3 p(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2),
                 rng.uniform(-0.2, 1.2));
    int fast_face = -1, slow_face = -1;
    const double fast = q.distance(p, &fast_face);
    const double slow = point_mesh_distance(p, m, &slow_face);
    CHECK(fast == slow);
    CHECK(fast_face == slow_face);
  }
}
