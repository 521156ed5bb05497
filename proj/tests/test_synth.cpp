#include <doctest.h>

#include <Eigen/Geometry>
#include <set>

#include "ircx/errors.h"
#include "ircx/synth.h"

using namespace ircx;

namespace {

RoomSpec bare_room() {
  RoomSpec spec;
  spec.tables = {0, 0};
  spec.chairs = {0, 0};
  spec.columns = {0, 0};
  spec.doors = {0, 0};
  spec.clutter = {0, 0};
  spec.ceiling_probability = 0.0;
  return spec;
}

std::set<int> distinct_labels(const TriMesh& mesh) {
  return std::set<int>(mesh.face_labels.begin(), mesh.face_labels.end());
}

}  // namespace

TEST_CASE("empty room is floor plus walls only") {
  const TriMesh mesh = generate_synthetic_scene(bare_room(), 8, 3);
  mesh.validate();
  const auto labels = distinct_labels(mesh);
  const std::set<int> want{kFloor, kWall};
  CHECK(labels == want);
}

TEST_CASE("same spec and seed reproduce the scene bit for bit") {
  const RoomSpec spec;  // defaults, all furniture enabled
  const TriMesh a = generate_synthetic_scene(spec, 8, 11);
  const TriMesh b = generate_synthetic_scene(spec, 8, 11);
  REQUIRE(a.vertices.rows() == b.vertices.rows());
  CHECK((a.vertices - b.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.faces - b.faces).cwiseAbs().maxCoeff() == 0);
  CHECK(a.face_labels == b.face_labels);

  const TriMesh c = generate_synthetic_scene(spec, 8, 12);
  const bool differs = c.vertices.rows() != a.vertices.rows() ||
                       (c.vertices - a.vertices).cwiseAbs().maxCoeff() > 0;
  CHECK(differs);
}

TEST_CASE("box furniture stays inside the room and axis-aligned") {
  RoomSpec spec = bare_room();
  spec.width = {4.0, 4.0};
  spec.depth = {3.0, 3.0};
  spec.height = {2.5, 2.5};
  spec.tables = {5, 5};
  const TriMesh mesh = generate_synthetic_scene(spec, 8, 7);

  const auto labels = distinct_labels(mesh);
  CHECK(labels.size() >= 3);
  CHECK(labels.count(kTable) == 1);

  // Everything within the wall envelope.
  const double t = spec.wall_thickness;
  for (int i = 0; i < mesh.vertices.rows(); ++i) {
    const Vec3 v = mesh.vertices.row(i);
    CHECK(v[0] >= -t - 1e-9);
    CHECK(v[0] <= 4.0 + t + 1e-9);
    CHECK(v[1] >= -t - 1e-9);
    CHECK(v[1] <= 3.0 + t + 1e-9);
    CHECK(v[2] >= -1e-9);
    CHECK(v[2] <= 2.5 + 1e-9);
  }

  // Table faces are box faces: normals along coordinate axes.
  int table_faces = 0;
  for (int f = 0; f < mesh.faces.rows(); ++f) {
    if (mesh.face_labels[f] != kTable) continue;
    ++table_faces;
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2));
    const Vec3 n = (b - a).cross(c - a).normalized();
    const Vec3 axis_dist = n.cwiseAbs();
    const double off_axis = axis_dist.maxCoeff();
    CHECK(off_axis == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(table_faces >= 5 * 10);  // five boxes, five visible sides, two tris each
}

TEST_CASE("primitives beyond class_count are rejected") {
  CHECK_THROWS_AS(generate_synthetic_scene(bare_room(), 1, 0), ConfigError);

  RoomSpec spec = bare_room();
  spec.tables = {1, 1};
  CHECK_THROWS_AS(generate_synthetic_scene(spec, 2, 0), ConfigError);
  // Enough classes for tables (label 2) -> fine.
  const TriMesh mesh = generate_synthetic_scene(spec, 3, 0);
  CHECK(distinct_labels(mesh).count(kTable) == 1);
}

TEST_CASE("class names cover the palette") {
  std::set<std::string> names;
  for (int c = 0; c < kSynthClassCount; ++c) names.insert(synth_class_name(c));
  CHECK(names.size() == static_cast<size_t>(kSynthClassCount));
  CHECK(std::string(synth_class_name(kFloor)) == "floor");
}
