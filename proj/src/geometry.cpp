#include "ircx/geometry.h"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>

#include "ircx/errors.h"

namespace ircx {

void TriMesh::validate() const {
  const int nv = static_cast<int>(vertices.rows());
  for (int f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k)
      if (faces(f, k) < 0 || faces(f, k) >= nv)
        throw ArgumentError("TriMesh: face index out of range");
    if (faces(f, 0) == faces(f, 1) && faces(f, 1) == faces(f, 2))
      throw ArgumentError("TriMesh: fully degenerate face");
  }
  if (!face_labels.empty() &&
      static_cast<int>(face_labels.size()) != faces.rows())
    throw ArgumentError("TriMesh: face_labels length mismatch");
}

double TriMesh::face_area(int f) const {
  const Vec3 a = vertices.row(faces(f, 0));
  const Vec3 b = vertices.row(faces(f, 1));
  const Vec3 c = vertices.row(faces(f, 2));
  return 0.5 * (b - a).cross(c - a).norm();
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int f = 0; f < faces.rows(); ++f) s += face_area(f);
  return s;
}

std::pair<TriMesh, SimilarityTransform> normalize_to_unit_cube(const TriMesh& mesh) {
  if (mesh.vertices.rows() < 1)
    throw ArgumentError("normalize_to_unit_cube: empty mesh");
  const Vec3 lo = mesh.vertices.colwise().minCoeff();
  const Vec3 hi = mesh.vertices.colwise().maxCoeff();
  const double extent = (hi - lo).maxCoeff();
  if (extent <= 0.0)
    throw ArgumentError("normalize_to_unit_cube: zero-extent mesh");
  SimilarityTransform tf;
  tf.scale = 1.0 / extent;
  tf.translation = -lo * tf.scale;
  TriMesh out = mesh;
  out.vertices = tf.apply(mesh.vertices);
  return {std::move(out), tf};
}

// Ericson, Real-Time Collision Detection, closest point on triangle.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c, Vec3* closest) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  Vec3 q;
  if (d1 <= 0.0 && d2 <= 0.0) {
    q = a;
  } else {
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
      q = b;
    } else {
      const double vc = d1 * d4 - d3 * d2;
      if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        q = a + (d1 / (d1 - d3)) * ab;
      } else {
        const Vec3 cp = p - c;
        const double d5 = ab.dot(cp), d6 = ac.dot(cp);
        if (d6 >= 0.0 && d5 <= d6) {
          q = c;
        } else {
          const double vb = d5 * d2 - d1 * d6;
          if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
            q = a + (d2 / (d2 - d6)) * ac;
          } else {
            const double va = d3 * d6 - d5 * d4;
            if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
              q = b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
            } else {
              const double denom = 1.0 / (va + vb + vc);
              q = a + ab * (vb * denom) + ac * (vc * denom);
            }
          }
        }
      }
    }
  }
  if (closest) *closest = q;
  return (p - q).norm();
}

double point_mesh_distance(const Vec3& p, const TriMesh& mesh, int* nearest_face) {
  if (mesh.faces.rows() == 0)
    throw ArgumentError("point_mesh_distance: mesh has no faces");
  double best = std::numeric_limits<double>::infinity();
  int bestf = -1;
  for (int f = 0; f < mesh.faces.rows(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2));
    const double d = point_triangle_distance(p, a, b, c);
    if (d < best) {
      best = d;
      bestf = f;
    }
  }
  if (nearest_face) *nearest_face = bestf;
  return best;
}

}  // namespace ircx
