#include "ircx/synth.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "ircx/errors.h"
#include "ircx/rng.h"

namespace ircx {

const char* synth_class_name(int c) {
  static const char* names[] = {"floor", "wall",  "table",   "chair",
                                "column", "door", "clutter", "ceiling"};
  if (c < 0 || c >= kSynthClassCount) throw ArgumentError("bad synth class id");
  return names[c];
}

double Range::draw(Rng& rng) const { return rng.uniform(lo, hi); }

int IntRange::draw(Rng& rng) const {
  if (hi < lo) throw ConfigError("IntRange: hi < lo");
  return lo + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(hi - lo) + 1));
}

namespace {

struct MeshBuilder {
  std::vector<Vec3> verts;
  std::vector<Eigen::Vector3i> faces;
  std::vector<int> labels;

  int vertex(const Vec3& v) {
    verts.push_back(v);
    return static_cast<int>(verts.size()) - 1;
  }

  void quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, int label) {
    const int i0 = vertex(a), i1 = vertex(b), i2 = vertex(c), i3 = vertex(d);
    faces.push_back({i0, i1, i2});
    faces.push_back({i0, i2, i3});
    labels.push_back(label);
    labels.push_back(label);
  }

  // Axis-aligned box; face mask bits: -x,+x,-y,+y,-z,+z.
  void box(const Vec3& lo, const Vec3& hi, int label, unsigned mask = 0x3f) {
    const double x0 = lo[0], y0 = lo[1], z0 = lo[2];
    const double x1 = hi[0], y1 = hi[1], z1 = hi[2];
    if (mask & 1u)
      quad({x0, y0, z0}, {x0, y1, z0}, {x0, y1, z1}, {x0, y0, z1}, label);
    if (mask & 2u)
      quad({x1, y0, z0}, {x1, y0, z1}, {x1, y1, z1}, {x1, y1, z0}, label);
    if (mask & 4u)
      quad({x0, y0, z0}, {x0, y0, z1}, {x1, y0, z1}, {x1, y0, z0}, label);
    if (mask & 8u)
      quad({x0, y1, z0}, {x1, y1, z0}, {x1, y1, z1}, {x0, y1, z1}, label);
    if (mask & 16u)
      quad({x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0}, label);
    if (mask & 32u)
      quad({x0, y0, z1}, {x0, y1, z1}, {x1, y1, z1}, {x1, y0, z1}, label);
  }

  void prism(const Vec3& center, double radius, double z0, double z1, int sides,
             int label) {
    for (int s = 0; s < sides; ++s) {
      const double a0 = 2.0 * std::numbers::pi * s / sides;
      const double a1 = 2.0 * std::numbers::pi * (s + 1) / sides;
      const Vec3 p0(center[0] + radius * std::cos(a0),
                    center[1] + radius * std::sin(a0), z0);
      const Vec3 p1(center[0] + radius * std::cos(a1),
                    center[1] + radius * std::sin(a1), z0);
      quad(p0, p1, {p1[0], p1[1], z1}, {p0[0], p0[1], z1}, label);
    }
  }

  TriMesh finish() const {
    TriMesh mesh;
    mesh.vertices.resize(static_cast<long>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i];
    mesh.faces.resize(static_cast<long>(faces.size()), 3);
    for (size_t i = 0; i < faces.size(); ++i) mesh.faces.row(i) = faces[i];
    mesh.face_labels = labels;
    mesh.validate();
    return mesh;
  }
};

struct Footprint {
  double x0, y0, x1, y1;
  bool overlaps(const Footprint& o, double gap) const {
    return x0 - gap < o.x1 && o.x0 - gap < x1 && y0 - gap < o.y1 && o.y0 - gap < y1;
  }
};

// Rejection placement; falls back to the last attempt so counts stay exact.
Footprint place(Rng& rng, double w, double d, double room_w, double room_d,
                double margin, const std::vector<Footprint>& taken, double gap) {
  Footprint f{};
  for (int attempt = 0; attempt < 24; ++attempt) {
    const double x = rng.uniform(margin, std::max(margin + 1e-6, room_w - margin - w));
    const double y = rng.uniform(margin, std::max(margin + 1e-6, room_d - margin - d));
    f = {x, y, x + w, y + d};
    bool ok = true;
    for (const auto& t : taken)
      if (f.overlaps(t, gap)) {
        ok = false;
        break;
      }
    if (ok) break;
  }
  return f;
}

}  // namespace

TriMesh generate_synthetic_scene(const RoomSpec& spec, int class_count,
                                 uint64_t seed) {
  if (class_count < 2)
    throw ConfigError("generate_synthetic_scene: need at least floor+wall classes");
  Rng rng = stream(seed, "room");

  const double W = spec.width.draw(rng);
  const double D = spec.depth.draw(rng);
  const double H = spec.height.draw(rng);
  const double t = spec.wall_thickness;

  const int n_tables = spec.tables.draw(rng);
  const int n_chairs = spec.chairs.draw(rng);
  const int n_columns = spec.columns.draw(rng);
  const int n_doors = spec.doors.draw(rng);
  const int n_clutter = spec.clutter.draw(rng);
  const bool ceiling = rng.uniform() < spec.ceiling_probability;

  auto require_class = [&](int cls, int count) {
    if (count > 0 && cls >= class_count)
      throw ConfigError(std::string("generate_synthetic_scene: class '") +
                        synth_class_name(cls) + "' needs class_count > " +
                        std::to_string(cls));
  };
  require_class(kTable, n_tables);
  require_class(kChair, n_chairs);
  require_class(kColumn, n_columns);
  require_class(kDoor, n_doors);
  require_class(kClutter, n_clutter);
  require_class(kCeiling, ceiling ? 1 : 0);

  MeshBuilder mb;

  // Floor and the four wall slabs (inner face flush with the floor rectangle).
  mb.quad({0, 0, 0}, {W, 0, 0}, {W, D, 0}, {0, D, 0}, kFloor);
  mb.box({-t, -t, 0}, {W + t, 0, H}, kWall, 0x3f & ~16u);
  mb.box({-t, D, 0}, {W + t, D + t, H}, kWall, 0x3f & ~16u);
  mb.box({-t, 0, 0}, {0, D, H}, kWall, 0x3f & ~16u);
  mb.box({W, 0, 0}, {W + t, D, H}, kWall, 0x3f & ~16u);
  if (ceiling) mb.quad({0, 0, H}, {0, D, H}, {W, D, H}, {W, 0, H}, kCeiling);

  std::vector<Footprint> taken;
  struct TableTop {
    Footprint fp;
    double z;
  };
  std::vector<TableTop> tables;

  for (int i = 0; i < n_tables; ++i) {
    const double w = rng.uniform(0.9, 1.6);
    const double d = rng.uniform(0.6, 1.0);
    const double h = rng.uniform(0.66, 0.78);
    const Footprint f = place(rng, w, d, W, D, 0.4, taken, 0.25);
    taken.push_back(f);
    tables.push_back({f, h});
    mb.box({f.x0, f.y0, 0}, {f.x1, f.y1, h}, kTable, 0x3f & ~16u);
  }
  for (int i = 0; i < n_chairs; ++i) {
    const double s = rng.uniform(0.38, 0.48);
    const double h = rng.uniform(0.4, 0.5);
    const Footprint f = place(rng, s, s, W, D, 0.35, taken, 0.15);
    taken.push_back(f);
    mb.box({f.x0, f.y0, 0}, {f.x1, f.y1, h}, kChair, 0x3f & ~16u);
  }
  for (int i = 0; i < n_columns; ++i) {
    const double r = rng.uniform(0.12, 0.2);
    const Footprint f = place(rng, 2 * r, 2 * r, W, D, 0.5, taken, 0.3);
    taken.push_back(f);
    mb.prism({0.5 * (f.x0 + f.x1), 0.5 * (f.y0 + f.y1), 0}, r, 0.0, H, 12, kColumn);
  }
  for (int i = 0; i < n_doors; ++i) {
    const int wall = static_cast<int>(rng.uniform_index(4));
    const double w = rng.uniform(0.9, 1.1);
    const double h = std::min(rng.uniform(2.0, 2.1), H - 0.2);
    const double thick = 0.05;
    const double along = (wall < 2 ? W : D);
    const double pos = rng.uniform(0.2, std::max(0.21, along - 0.2 - w));
    switch (wall) {
      case 0:  // y = 0 wall, panel protrudes into the room
        mb.box({pos, 0, 0}, {pos + w, thick, h}, kDoor, 0x3f & ~(4u | 16u));
        break;
      case 1:  // y = D
        mb.box({pos, D - thick, 0}, {pos + w, D, h}, kDoor, 0x3f & ~(8u | 16u));
        break;
      case 2:  // x = 0
        mb.box({0, pos, 0}, {thick, pos + w, h}, kDoor, 0x3f & ~(1u | 16u));
        break;
      default:  // x = W
        mb.box({W - thick, pos, 0}, {W, pos + w, h}, kDoor, 0x3f & ~(2u | 16u));
        break;
    }
  }
  for (int i = 0; i < n_clutter; ++i) {
    const double s = rng.uniform(0.1, 0.32);
    const double h = rng.uniform(0.1, 0.35);
    double z0 = 0.0;
    Footprint f{};
    if (!tables.empty() && rng.uniform() < 0.6) {
      const auto& tt = tables[rng.uniform_index(tables.size())];
      const double tw = tt.fp.x1 - tt.fp.x0, td = tt.fp.y1 - tt.fp.y0;
      const double sx = std::min(s, tw * 0.8), sy = std::min(s, td * 0.8);
      const double x = rng.uniform(tt.fp.x0, tt.fp.x1 - sx);
      const double y = rng.uniform(tt.fp.y0, tt.fp.y1 - sy);
      f = {x, y, x + sx, y + sy};
      z0 = tt.z;
    } else {
      f = place(rng, s, s, W, D, 0.3, taken, 0.1);
      taken.push_back(f);
    }
    mb.box({f.x0, f.y0, z0}, {f.x1, f.y1, z0 + h}, kClutter, 0x3f & ~16u);
  }

  return mb.finish();
}

}  // namespace ircx
