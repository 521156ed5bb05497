#pragma once

#include <string>

#include "ircx/geometry.h"

namespace ircx {

// PLY with optional integer face property "label". Reads ascii and
// binary_little_endian; write_ply picks the format by flag.
TriMesh read_ply(const std::string& path);
void write_ply(const TriMesh& mesh, const std::string& path, bool binary = true);

// OBJ carries no labels; use the sidecar helpers (one integer per face line).
TriMesh read_obj(const std::string& path);
void write_obj(const TriMesh& mesh, const std::string& path);

std::vector<int> read_label_sidecar(const std::string& path);
void write_label_sidecar(const std::vector<int>& labels, const std::string& path);

// Dispatch by extension (.ply/.obj). For OBJ, looks for "<path>.labels".
TriMesh read_mesh(const std::string& path);
void write_mesh(const TriMesh& mesh, const std::string& path);

}  // namespace ircx
