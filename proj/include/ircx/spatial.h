#pragma once

#include <vector>

#include "ircx/geometry.h"

namespace ircx {

// Immutable kd-tree over a fixed point set. Queries match exhaustive search
// exactly: ascending Euclidean distance, ties broken by lower index.
class SpatialIndex {
 public:
  explicit SpatialIndex(const Points& points);

  int point_count() const { return static_cast<int>(points_.rows()); }
  const Points& points() const { return points_; }

  // Throws ArgumentError if k > point_count.
  void knn(const Vec3& q, int k, std::vector<int>& indices,
           std::vector<double>& distances) const;
  std::pair<std::vector<int>, std::vector<double>> knn(const Vec3& q, int k) const;

 private:
  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  int build(int begin, int end);

  Points points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Exact distances from many points to a mesh, with bounding-sphere pruning.
// Argmin-face ties resolve to the lowest face index (same as a linear scan).
class MeshDistanceQuery {
 public:
  explicit MeshDistanceQuery(const TriMesh& mesh);
  double distance(const Vec3& p, int* nearest_face = nullptr) const;

 private:
  const TriMesh& mesh_;
  Points centroids_;
  Eigen::VectorXd radii_;
  std::vector<int> by_area_;  // face visit order, large faces first
};

}  // namespace ircx
