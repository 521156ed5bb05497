#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace ircx {

using Vec3 = Eigen::Vector3d;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct TriMesh {
  Points vertices;
  Faces faces;
  std::vector<int> face_labels;  // empty or one label per face

  bool has_labels() const { return !face_labels.empty(); }
  void validate() const;  // index bounds, label count, degenerate faces
  double face_area(int f) const;
  double total_area() const;
};

struct PointCloud {
  Points points;
  std::vector<int> labels;  // empty or one per point

  int size() const { return static_cast<int>(points.rows()); }
  bool has_labels() const { return !labels.empty(); }
};

struct QuerySet {
  Points points;
  Eigen::VectorXd gt_distance;  // empty or one per point
  std::vector<int> gt_label;    // empty or one per point

  int size() const { return static_cast<int>(points.rows()); }
};

// out = scale * v + translation, applied componentwise with uniform scale.
struct SimilarityTransform {
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& v) const { return scale * v + translation; }
  Points apply(const Points& p) const {
    return (p * scale).rowwise() + translation.transpose();
  }
};

// Uniform-scales the longest axis onto [0,1]; other axes land inside.
// Throws ArgumentError on a zero-extent mesh.
std::pair<TriMesh, SimilarityTransform> normalize_to_unit_cube(const TriMesh& mesh);

// Exact distance from p to triangle (a,b,c), plus the closest point.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c, Vec3* closest = nullptr);

// Exact min over all faces. Returns distance; optionally the argmin face.
double point_mesh_distance(const Vec3& p, const TriMesh& mesh,
                           int* nearest_face = nullptr);

}  // namespace ircx
