#pragma once

namespace ircx {

// 256-case marching-cubes triangulation: flat edge-index triples per sign
// configuration (bit c set = corner c negative), -1 terminated.
extern const int kMcTriTable[256][16];
// Cube edge endpoints and corner offsets matching the table convention.
extern const int kMcEdgeCorners[12][2];
extern const int kMcCornerOffsets[8][3];

inline constexpr int kMcTriTableWidth = 16;

}  // namespace ircx
