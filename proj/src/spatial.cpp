#include "ircx/spatial.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "ircx/errors.h"

namespace ircx {

namespace {
constexpr int kLeafSize = 16;
}

SpatialIndex::SpatialIndex(const Points& points) : points_(points) {
  if (points_.rows() == 0) throw ArgumentError("SpatialIndex: empty point set");
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.rows() / kLeafSize + 8);
  root_ = build(0, static_cast<int>(order_.size()));
}

int SpatialIndex::build(int begin, int end) {
  Node n;
  n.begin = begin;
  n.end = end;
  if (end - begin <= kLeafSize) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    const auto p = points_.row(order_[i]);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double pa = points_(a, axis), pb = points_(b, axis);
                     return pa < pb || (pa == pb && a < b);
                   });
  n.axis = axis;
  n.split = points_(order_[mid], axis);
  nodes_.push_back(n);
  const int self = static_cast<int>(nodes_.size()) - 1;
  const int l = build(begin, mid);
  const int r = build(mid, end);
  nodes_[self].left = l;
  nodes_[self].right = r;
  return self;
}

namespace {
struct Cand {
  double d2;
  int idx;
  // Max-heap ordering: the "worst" candidate on top.
  bool operator<(const Cand& o) const {
    return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
  }
};
}  // namespace

void SpatialIndex::knn(const Vec3& q, int k, std::vector<int>& indices,
                       std::vector<double>& distances) const {
  if (k < 1) throw ArgumentError("knn: k must be >= 1");
  if (k > point_count()) throw ArgumentError("knn: k exceeds point count");

  std::priority_queue<Cand> heap;
  auto consider = [&](int idx) {
    const double d2 = (points_.row(idx).transpose() - q).squaredNorm();
    if (static_cast<int>(heap.size()) < k) {
      heap.push({d2, idx});
    } else if (Cand{d2, idx} < heap.top()) {
      heap.pop();
      heap.push({d2, idx});
    }
  };

  // Recursive descent, near child first; prune on strict distance excess so
  // equal-distance lower-index points are never lost.
  auto visit = [&](auto&& self, int node) -> void {
    const Node& n = nodes_[node];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) consider(order_[i]);
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    self(self, near);
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().d2)
      self(self, far);
  };
  visit(visit, root_);

  std::vector<Cand> out;
  out.reserve(k);
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  indices.resize(k);
  distances.resize(k);
  for (int i = 0; i < k; ++i) {
    indices[i] = out[i].idx;
    distances[i] = std::sqrt(out[i].d2);
  }
}

std::pair<std::vector<int>, std::vector<double>> SpatialIndex::knn(const Vec3& q,
                                                                   int k) const {
  std::vector<int> idx;
  std::vector<double> dist;
  knn(q, k, idx, dist);
  return {std::move(idx), std::move(dist)};
}

MeshDistanceQuery::MeshDistanceQuery(const TriMesh& mesh) : mesh_(mesh) {
  const int nf = static_cast<int>(mesh.faces.rows());
  if (nf == 0) throw ArgumentError("MeshDistanceQuery: mesh has no faces");
  centroids_.resize(nf, 3);
  radii_.resize(nf);
  std::vector<double> areas(nf);
  for (int f = 0; f < nf; ++f) {
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2));
    const Vec3 ctr = (a + b + c) / 3.0;
    centroids_.row(f) = ctr;
    radii_[f] = std::sqrt(std::max({(a - ctr).squaredNorm(),
                                    (b - ctr).squaredNorm(),
                                    (c - ctr).squaredNorm()}));
    areas[f] = mesh.face_area(f);
  }
  by_area_.resize(nf);
  std::iota(by_area_.begin(), by_area_.end(), 0);
  std::sort(by_area_.begin(), by_area_.end(), [&](int a, int b) {
    return areas[a] > areas[b] || (areas[a] == areas[b] && a < b);
  });
}

double MeshDistanceQuery::distance(const Vec3& p, int* nearest_face) const {
  const int nf = static_cast<int>(mesh_.faces.rows());
  // Cheap upper bound from a large-face scan prefix, then exact pruned scan in
  // index order so that argmin ties resolve exactly like a linear scan.
  double bound = std::numeric_limits<double>::infinity();
  const int prefix = std::min(nf, 8);
  for (int i = 0; i < prefix; ++i) {
    const int f = by_area_[i];
    const Vec3 a = mesh_.vertices.row(mesh_.faces(f, 0));
    const Vec3 b = mesh_.vertices.row(mesh_.faces(f, 1));
    const Vec3 c = mesh_.vertices.row(mesh_.faces(f, 2));
    bound = std::min(bound, point_triangle_distance(p, a, b, c));
  }
  double best = std::numeric_limits<double>::infinity();
  int bestf = -1;
  for (int f = 0; f < nf; ++f) {
    const double lb = (centroids_.row(f).transpose() - p).norm() - radii_[f];
    if (lb > bound) continue;
    const Vec3 a = mesh_.vertices.row(mesh_.faces(f, 0));
    const Vec3 b = mesh_.vertices.row(mesh_.faces(f, 1));
    const Vec3 c = mesh_.vertices.row(mesh_.faces(f, 2));
    const double d = point_triangle_distance(p, a, b, c);
    if (d < best) {
      best = d;
      bestf = f;
      bound = std::min(bound, best);
    }
  }
  if (nearest_face) *nearest_face = bestf;
  return best;
}

}  // namespace ircx
