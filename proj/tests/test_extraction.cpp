#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <map>

#include "ircx/errors.h"
#include "ircx/extraction.h"
#include "ircx/metrics.h"

using namespace ircx;

namespace {

// Mean absolute distance of mesh vertices to the analytic sphere.
double sphere_vertex_error(const TriMesh& mesh, const Vec3& c, double r,
                           double* worst = nullptr) {
  double acc = 0.0, mx = 0.0;
  for (int i = 0; i < mesh.vertices.rows(); ++i) {
    const Vec3 v = mesh.vertices.row(i);
    const double err = std::abs((v - c).norm() - r);
    acc += err;
    mx = std::max(mx, err);
  }
  if (worst) *worst = mx;
  return acc / std::max<int>(1, static_cast<int>(mesh.vertices.rows()));
}

}  // namespace

TEST_CASE("grid evaluation passes the stub through and is chunk-invariant") {
  const Vec3 c(0.5, 0.5, 0.5);
  const UdfFn fn = sphere_udf(c, 0.3);

  GridConfig cfg;
  cfg.resolution = 32;
  const ScalarGrid grid = eval_udf_grid(fn, cfg);
  grid.validate();
  REQUIRE(grid.values.size() == 32 * 32 * 32);
  REQUIRE(grid.has_gradients());

  // stub pass-through: every sample equals the analytic distance
  double worst = 0.0;
  for (int k = 0; k < 32; ++k)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const Vec3 p = grid.position(i, j, k);
        const double want = std::abs((p - c).norm() - 0.3);
        worst = std::max(worst,
                         std::abs(grid.values[grid.index(i, j, k)] - want));
      }
  CHECK(worst < 1e-6);

  // chunk size must not matter, bit for bit
  GridConfig tiny = cfg;
  tiny.resolution = 12;
  tiny.chunk_size = 1;
  GridConfig big = tiny;
  big.chunk_size = 100000;
  const ScalarGrid g1 = eval_udf_grid(fn, tiny);
  const ScalarGrid g2 = eval_udf_grid(fn, big);
  CHECK((g1.values - g2.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.gradients - g2.gradients).cwiseAbs().maxCoeff() == 0.0);

  GridConfig bad;
  bad.resolution = 4;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  GridConfig crowded;
  crowded.resolution = 8;
  crowded.margin = 4;
  CHECK_THROWS_AS(crowded.validate(), ArgumentError);
  ExtractConfig gateless;
  gateless.gate_scale = 0.0;
  CHECK_THROWS_AS(gateless.validate(), ArgumentError);
}

TEST_CASE("finite-difference gradients track the analytic ones") {
  const Vec3 c(0.45, 0.55, 0.5);
  const UdfFn analytic = sphere_udf(c, 0.25);

  // strip gradients, rebuild them by central differences
  const UdfFn value_only = [&](const Points& q, Eigen::VectorXd& v, Points* g) {
    analytic(q, v, nullptr);
    if (g) g->resize(0, 3);
  };
  GridConfig cfg;
  cfg.resolution = 16;
  const ScalarGrid ga = eval_udf_grid(analytic, cfg);
  const ScalarGrid gf = eval_udf_grid(fd_gradient_wrap(value_only, 1e-4), cfg);

  double worst = 0.0;
  for (int i = 0; i < ga.gradients.rows(); ++i) {
    // skip samples near the field's gradient discontinuities
    if (ga.values[i] < 0.02) continue;
    const Vec3 a = ga.gradients.row(i);
    const Vec3 f = gf.gradients.row(i);
    worst = std::max(worst, (a - f).norm() / std::max(1.0, a.norm()));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("sphere extraction stays within 1.5 voxels of the surface") {
  const Vec3 c(0.5, 0.5, 0.5);
  const double r = 0.3;
  GridConfig cfg;
  cfg.resolution = 64;
  const ScalarGrid grid = eval_udf_grid(sphere_udf(c, r), cfg);
  const TriMesh mesh = pseudo_sign_marching_cubes(grid);
  mesh.validate();
  REQUIRE(mesh.vertices.rows() > 500);

  double worst = 0.0;
  sphere_vertex_error(mesh, c, r, &worst);
  CHECK(worst <= 1.5 * grid.spacing);

  // closed surface: every undirected edge borders exactly two faces
  std::map<std::pair<int, int>, int> edge_count;
  for (int f = 0; f < mesh.faces.rows(); ++f)
    for (int e = 0; e < 3; ++e) {
      int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  int open_edges = 0;
  for (const auto& kv : edge_count)
    if (kv.second != 2) ++open_edges;
  CHECK(open_edges == 0);
}

TEST_CASE("plane extraction is flat with consistent normals") {
  GridConfig cfg;
  cfg.resolution = 48;
  const ScalarGrid grid = eval_udf_grid(plane_udf(0.5), cfg);
  const TriMesh mesh = pseudo_sign_marching_cubes(grid);
  REQUIRE(mesh.faces.rows() > 100);

  int aligned = 0;
  const double cos2deg = std::cos(2.0 * M_PI / 180.0);
  for (int f = 0; f < mesh.faces.rows(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 d = mesh.vertices.row(mesh.faces(f, 2));
    const Vec3 n = (b - a).cross(d - a).normalized();
    if (std::abs(n.dot(Vec3::UnitZ())) >= cos2deg) ++aligned;
  }
  CHECK(static_cast<double>(aligned) / mesh.faces.rows() >= 0.99);

  // vertices sit on the plane up to interpolation error
  for (int i = 0; i < mesh.vertices.rows(); ++i)
    CHECK(std::abs(mesh.vertices(i, 2) - 0.5) < grid.spacing);
}

TEST_CASE("a constant field produces no surface") {
  GridConfig cfg;
  cfg.resolution = 16;
  const UdfFn flat = [](const Points& q, Eigen::VectorXd& v, Points* g) {
    v.setConstant(q.rows(), 1.0);
    if (g) {
      g->resize(q.rows(), 3);
      g->setZero();
      g->col(0).setConstant(1.0);  // arbitrary unit direction
    }
  };
  const ScalarGrid grid = eval_udf_grid(flat, cfg);
  const TriMesh mesh = pseudo_sign_marching_cubes(grid);
  CHECK(mesh.vertices.rows() == 0);
  CHECK(mesh.faces.rows() == 0);
}

TEST_CASE("extraction is deterministic and converges with resolution") {
  const Vec3 c(0.5, 0.5, 0.5);
  const double r = 0.3;

  GridConfig lo;
  lo.resolution = 32;
  const ScalarGrid grid_lo = eval_udf_grid(sphere_udf(c, r), lo);
  const TriMesh mesh_lo_a = pseudo_sign_marching_cubes(grid_lo);
  const TriMesh mesh_lo_b = pseudo_sign_marching_cubes(grid_lo);
  CHECK((mesh_lo_a.vertices - mesh_lo_b.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mesh_lo_a.faces - mesh_lo_b.faces).cwiseAbs().maxCoeff() == 0);

  GridConfig hi;
  hi.resolution = 64;
  const TriMesh mesh_hi =
      pseudo_sign_marching_cubes(eval_udf_grid(sphere_udf(c, r), hi));

  const double err_lo = sphere_vertex_error(mesh_lo_a, c, r);
  const double err_hi = sphere_vertex_error(mesh_hi, c, r);
  CHECK(err_lo / err_hi >= 1.5);

  // fidelity against a dense analytic sample of the sphere
  Points gt(10000, 3);
  for (int i = 0; i < 10000; ++i) {
    // Fibonacci lattice directions
    const double z = 1.0 - 2.0 * (i + 0.5) / 10000.0;
    const double phi = 2.0 * M_PI * std::fmod(i * 0.6180339887498949, 1.0);
    const double s = std::sqrt(1.0 - z * z);
    gt.row(i) = (c + r * Vec3(s * std::cos(phi), s * std::sin(phi), z)).transpose();
  }
  const double f1 = fscore(mesh_hi.vertices, gt, 2.0 * grid_lo.spacing);
  CHECK(f1 >= 0.99);
}
