#!/usr/bin/env python3
"""Generate the 256-case marching-cubes triangulation table.

Corner layout (unit cube):
  0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0)
  4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)
Edges 0-11: bottom ring (0,1)(1,2)(2,3)(3,0), top ring (4,5)(5,6)(6,7)(7,4),
verticals (0,4)(1,5)(2,6)(3,7).

For each sign configuration (bit set = corner negative/inside) the surface
patch boundary is traced per face with marching squares; on ambiguous faces
the rule "negative corners stay separated" is applied. The rule depends only
on the face's corner signs, so the two cubes sharing a face always cut it the
same way and the extracted surface is watertight by construction. Face arcs
chain into loops; loops are fan-triangulated. Triangle winding is chosen so
normals point from the negative side toward the positive side.
"""

CORNERS = [
    (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
    (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1),
]

EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 0),
    (4, 5), (5, 6), (6, 7), (7, 4),
    (0, 4), (1, 5), (2, 6), (3, 7),
]

# Corner cycles, counter-clockwise as seen from outside the cube.
FACES = [
    (0, 3, 2, 1),  # z = 0
    (4, 5, 6, 7),  # z = 1
    (0, 1, 5, 4),  # y = 0
    (2, 3, 7, 6),  # y = 1
    (0, 4, 7, 3),  # x = 0
    (1, 2, 6, 5),  # x = 1
]

EDGE_OF = {}
for ei, (a, b) in enumerate(EDGES):
    EDGE_OF[(a, b)] = ei
    EDGE_OF[(b, a)] = ei


def face_arcs(config, face):
    """Directed arcs (from_edge -> to_edge) cut into one face.

    Walking the face cycle CCW (outside view), a neg->pos crossing starts an
    arc and the next pos->neg crossing ends it, which traces the boundary of
    the negative region with that region on the left.
    """
    neg = [bool(config & (1 << c)) for c in range(8)]
    crossings = []  # (slot, kind, edge); slot orders them around the cycle
    for k in range(4):
        a, b = face[k], face[(k + 1) % 4]
        if neg[a] != neg[b]:
            kind = 'exit' if neg[a] else 'entry'
            crossings.append((k, kind, EDGE_OF[(a, b)]))
    arcs = []
    m = len(crossings)
    for i in range(m):
        slot, kind, edge = crossings[i]
        if kind != 'exit':
            continue
        # Pair each exit with the entry preceding it around the cycle: the
        # arc then hugs a single negative corner, keeping diagonal negative
        # corners in separate patches (the fixed ambiguity resolution).
        prv = crossings[(i - 1) % m]
        assert prv[1] == 'entry', 'crossings must alternate'
        arcs.append((edge, prv[2]))
    return arcs


def cube_loops(config):
    out = {}
    for face in FACES:
        for frm, to in face_arcs(config, face):
            assert frm not in out, 'cut edge emitted twice as arc start'
            out[frm] = to
    loops = []
    seen = set()
    for start in sorted(out):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        cur = out[start]
        while cur != start:
            loop.append(cur)
            seen.add(cur)
            cur = out[cur]
        loops.append(loop)
    assert len(seen) == len(out), 'arcs did not close into loops'
    return loops


def edge_midpoint(edge):
    a, b = EDGES[edge]
    pa, pb = CORNERS[a], CORNERS[b]
    return tuple((pa[i] + pb[i]) / 2.0 for i in range(3))


def cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def triangulate(config):
    tris = []
    for loop in cube_loops(config):
        for i in range(1, len(loop) - 1):
            tris.append((loop[0], loop[i], loop[i + 1]))
    return tris


def orientation_sign():
    """+1 if fan winding already points toward the positive side."""
    # Single negative corner 0: the patch normal must point away from it.
    tris = triangulate(1)
    assert len(tris) == 1
    p = [edge_midpoint(e) for e in tris[0]]
    n = cross(sub(p[1], p[0]), sub(p[2], p[0]))
    toward_pos = sub((1, 1, 1), (0, 0, 0))
    d = dot(n, toward_pos)
    assert d != 0
    return 1 if d > 0 else -1


def main():
    flip = orientation_sign() < 0
    table = []
    max_len = 0
    for config in range(256):
        tris = triangulate(config)
        if flip:
            tris = [(a, c, b) for (a, b, c) in tris]
        flat = [e for t in tris for e in t]
        max_len = max(max_len, len(flat))
        table.append(flat)

    width = max_len + 1  # room for the -1 terminator
    lines = []
    lines.append('#include "ircx/mc_tables.h"')
    lines.append('')
    lines.append('namespace ircx {')
    lines.append('')
    lines.append('// Triangles per sign configuration as flat edge-index')
    lines.append('// triples, -1 terminated. Built by tools/gen_mc_tables.py:')
    lines.append('// per-face marching squares with the "negative corners')
    lines.append('// separated" rule on ambiguous faces, arcs chained into')
    lines.append('// loops, loops fan-triangulated. The face rule depends only')
    lines.append('// on face corner signs, so adjacent cubes always agree and')
    lines.append('// closed sign fields yield watertight meshes.')
    lines.append(f'const int kMcTriTable[256][{width}] = {{')
    for config, flat in enumerate(table):
        row = flat + [-1] * (width - len(flat))
        lines.append('    {' + ', '.join(str(v) for v in row) + '},')
    lines.append('};')
    lines.append('')
    edge_rows = []
    for a, b in EDGES:
        edge_rows.append(f'{{{a}, {b}}}')
    lines.append('const int kMcEdgeCorners[12][2] = {' + ', '.join(edge_rows) + '};')
    lines.append('')
    lines.append('const int kMcCornerOffsets[8][3] = {')
    for c in CORNERS:
        lines.append(f'    {{{c[0]}, {c[1]}, {c[2]}}},')
    lines.append('};')
    lines.append('')
    lines.append('}  // namespace ircx')
    lines.append('')

    with open('src/mc_tables.cpp', 'w') as f:
        f.write('\n'.join(lines))

    with open('include/ircx/mc_tables.h', 'w') as f:
        f.write(f'''#pragma once

namespace ircx {{

// 256-case marching-cubes triangulation: flat edge-index triples per sign
// configuration (bit c set = corner c negative), -1 terminated.
extern const int kMcTriTable[256][{width}];
// Cube edge endpoints and corner offsets matching the table convention.
extern const int kMcEdgeCorners[12][2];
extern const int kMcCornerOffsets[8][3];

inline constexpr int kMcTriTableWidth = {width};

}}  // namespace ircx
''')
    print(f'max entries {max_len}, width {width}')


if __name__ == '__main__':
    main()
