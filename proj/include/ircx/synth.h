#pragma once

#include <cstdint>

#include "ircx/geometry.h"

namespace ircx {

// Fixed class palette for synthetic rooms.
enum SynthClass : int {
  kFloor = 0,
  kWall = 1,
  kTable = 2,
  kChair = 3,
  kColumn = 4,
  kDoor = 5,
  kClutter = 6,
  kCeiling = 7,
};
constexpr int kSynthClassCount = 8;
const char* synth_class_name(int c);

struct Range {
  double lo = 0.0, hi = 0.0;
  double draw(class Rng& rng) const;
};

struct IntRange {
  int lo = 0, hi = 0;
  int draw(class Rng& rng) const;
};

// Room extents are in meters; the prepared pipeline normalizes later.
struct RoomSpec {
  Range width{3.2, 6.0};
  Range depth{3.0, 5.5};
  Range height{2.4, 3.4};
  double wall_thickness = 0.08;
  IntRange tables{1, 3};
  IntRange chairs{1, 4};
  IntRange columns{0, 2};
  IntRange doors{1, 2};
  IntRange clutter{2, 6};
  double ceiling_probability = 0.5;
};

// Labeled open room with floor, walls and primitive furniture. Deterministic
// per seed. Throws ConfigError when the requested primitives need labels
// beyond class_count.
TriMesh generate_synthetic_scene(const RoomSpec& spec, int class_count,
                                 uint64_t seed);

}  // namespace ircx
