#include <doctest.h>

#include <cmath>

#include "ircx/errors.h"
#include "ircx/geometry.h"
#include "ircx/rng.h"

using namespace ircx;

namespace {

TriMesh random_mesh(int faces, uint64_t seed) {
  Rng rng = stream(seed, "mesh");
  TriMesh m;
  m.vertices.resize(faces * 3, 3);
  m.faces.resize(faces, 3);
  for (int i = 0; i < faces * 3; ++i)
    for (int c = 0; c < 3; ++c) m.vertices(i, c) = rng.uniform();
  for (int f = 0; f < faces; ++f) m.faces.row(f) << f * 3, f * 3 + 1, f * 3 + 2;
  return m;
}

}  // namespace

TEST_CASE("point_triangle_distance hand cases") {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK(point_triangle_distance(a, a, b, c) == 0.0);  // on a vertex
  // above the interior: distance is the height
  CHECK(point_triangle_distance(Vec3(0.2, 0.2, 0.7), a, b, c) ==
        doctest::Approx(0.7).epsilon(1e-12));
  // beyond the ab edge: closest point is on the edge
  CHECK(point_triangle_distance(Vec3(0.5, -0.3, 0.4), a, b, c) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // beyond vertex b
  CHECK(point_triangle_distance(Vec3(2, 0, 0), a, b, c) ==
        doctest::Approx(1.0).epsilon(1e-12));
  Vec3 closest;
  point_triangle_distance(Vec3(0.2, 0.2, 0.7), a, b, c, &closest);
  CHECK((closest - Vec3(0.2, 0.2, 0.0)).norm() < 1e-12);
}

TEST_CASE("point_mesh_distance matches a dense-sampling lower bound") {
  const TriMesh m = random_mesh(20, 3);
  Rng rng = stream(4, "queries");
  for (int t = 0; t < 10; ++t) {
    const Vec3 q(rng.uniform(), rng.uniform(), rng.uniform());
    const double d = point_mesh_distance(q, m);

    // dense barycentric samples of every face: an upper bound on the true
    // distance that converges from above
    double dense = std::numeric_limits<double>::infinity();
    const int g = 160;
    for (int f = 0; f < m.faces.rows(); ++f) {
      const Vec3 a = m.vertices.row(m.faces(f, 0));
      const Vec3 b = m.vertices.row(m.faces(f, 1));
      const Vec3 c = m.vertices.row(m.faces(f, 2));
      for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g - i; ++j) {
          const double u = static_cast<double>(i) / g;
          const double v = static_cast<double>(j) / g;
          const Vec3 p = a + u * (b - a) + v * (c - a);
          dense = std::min(dense, (q - p).norm());
        }
    }
    CHECK(d <= dense + 1e-12);
    CHECK(dense - d < 2e-3);
  }
}

TEST_CASE("normalize_to_unit_cube is reproduced by its own transform") {
  const TriMesh m = random_mesh(34, 9);  // ~100 vertices
  const auto [normalized, tf] = normalize_to_unit_cube(m);
  const Points replay = tf.apply(m.vertices);
  CHECK((replay - normalized.vertices).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(normalized.vertices.minCoeff() >= -1e-12);
  CHECK(normalized.vertices.maxCoeff() <= 1.0 + 1e-12);
  // the longest axis spans [0,1] exactly
  const auto lo = normalized.vertices.colwise().minCoeff();
  const auto hi = normalized.vertices.colwise().maxCoeff();
  CHECK((hi - lo).maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));

  // normalizing a normalized mesh is the identity scale
  const auto [again, tf2] = normalize_to_unit_cube(normalized);
  CHECK(tf2.scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-extent mesh is rejected") {
  TriMesh flat;
  flat.vertices.resize(3, 3);
  flat.vertices.setZero();
  flat.faces.resize(1, 3);
  flat.faces << 0, 1, 2;
  CHECK_THROWS_AS(normalize_to_unit_cube(flat), ArgumentError);
}

TEST_CASE("TriMesh::validate catches structural errors") {
  TriMesh m;
  m.vertices.resize(3, 3);
  m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  m.faces.resize(1, 3);
  m.faces << 0, 1, 2;
  CHECK_NOTHROW(m.validate());

  TriMesh bad_index = m;
  bad_index.faces(0, 2) = 5;
  CHECK_THROWS_AS(bad_index.validate(), ArgumentError);

  TriMesh bad_labels = m;
  bad_labels.face_labels = {1, 2};  // face count is 1
  CHECK_THROWS_AS(bad_labels.validate(), ArgumentError);

  TriMesh degenerate = m;
  degenerate.faces.row(0) << 1, 1, 1;
  CHECK_THROWS_AS(degenerate.validate(), ArgumentError);
}

TEST_CASE("face_area of the unit right triangle") {
  TriMesh m;
  m.vertices.resize(3, 3);
  m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  m.faces.resize(1, 3);
  m.faces << 0, 1, 2;
  CHECK(m.face_area(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.total_area() == doctest::Approx(0.5).epsilon(1e-15));
}
