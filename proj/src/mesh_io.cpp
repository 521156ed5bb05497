#include "ircx/mesh_io.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ircx/errors.h"

namespace ircx {

namespace {

struct PlyProperty {
  std::string type;
  std::string name;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<PlyProperty> props;
};

size_t type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64" || t == "int64" || t == "uint64") return 8;
  throw DataError("ply: unknown type " + t);
}

double read_binary_value(std::istream& in, const std::string& t) {
  char buf[8];
  in.read(buf, static_cast<std::streamsize>(type_size(t)));
  if (!in) throw DataError("ply: truncated binary payload");
  if (t == "char" || t == "int8") return *reinterpret_cast<int8_t*>(buf);
  if (t == "uchar" || t == "uint8") return *reinterpret_cast<uint8_t*>(buf);
  if (t == "short" || t == "int16") return *reinterpret_cast<int16_t*>(buf);
  if (t == "ushort" || t == "uint16") return *reinterpret_cast<uint16_t*>(buf);
  if (t == "int" || t == "int32") return *reinterpret_cast<int32_t*>(buf);
  if (t == "uint" || t == "uint32") return *reinterpret_cast<uint32_t*>(buf);
  if (t == "float" || t == "float32") {
    float f;
    std::memcpy(&f, buf, 4);
    return f;
  }
  double d;
  std::memcpy(&d, buf, 8);
  return d;
}

}  // namespace

TriMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply")
    throw DataError("ply: bad magic in " + path);

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info") continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian")
        binary = true;
      else if (fmt != "ascii")
        throw DataError("ply: unsupported format " + fmt);
    } else if (tok == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) throw DataError("ply: property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tok == "end_header") {
      break;
    }
  }

  TriMesh mesh;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      mesh.vertices.resize(e.count, 3);
      for (long i = 0; i < e.count; ++i) {
        if (binary) {
          for (const auto& p : e.props) {
            const double v = read_binary_value(in, p.type);
            if (p.name == "x") mesh.vertices(i, 0) = v;
            if (p.name == "y") mesh.vertices(i, 1) = v;
            if (p.name == "z") mesh.vertices(i, 2) = v;
          }
        } else {
          std::getline(in, line);
          std::istringstream ls(line);
          for (const auto& p : e.props) {
            double v;
            if (!(ls >> v)) throw DataError("ply: truncated vertex line");
            if (p.name == "x") mesh.vertices(i, 0) = v;
            if (p.name == "y") mesh.vertices(i, 1) = v;
            if (p.name == "z") mesh.vertices(i, 2) = v;
          }
        }
      }
    } else if (e.name == "face") {
      mesh.faces.resize(e.count, 3);
      bool has_label = false;
      for (const auto& p : e.props)
        if (!p.is_list && p.name == "label") has_label = true;
      if (has_label) mesh.face_labels.resize(e.count);
      for (long i = 0; i < e.count; ++i) {
        std::istringstream ls;
        if (!binary) {
          std::getline(in, line);
          ls.str(line);
        }
        for (const auto& p : e.props) {
          if (p.is_list) {
            long cnt;
            if (binary) {
              cnt = static_cast<long>(read_binary_value(in, p.count_type));
            } else if (!(ls >> cnt)) {
              throw DataError("ply: truncated face line");
            }
            std::vector<long> vals(cnt);
            for (long j = 0; j < cnt; ++j) {
              if (binary)
                vals[j] = static_cast<long>(read_binary_value(in, p.type));
              else if (!(ls >> vals[j]))
                throw DataError("ply: truncated face list");
            }
            if (p.name == "vertex_indices" || p.name == "vertex_index") {
              if (cnt != 3) throw DataError("ply: only triangle faces supported");
              for (int j = 0; j < 3; ++j)
                mesh.faces(i, j) = static_cast<int>(vals[j]);
            }
          } else {
            double v;
            if (binary)
              v = read_binary_value(in, p.type);
            else if (!(ls >> v))
              throw DataError("ply: truncated face property");
            if (p.name == "label") mesh.face_labels[i] = static_cast<int>(v);
          }
        }
      }
    } else {
      // Skip unknown elements (ascii only; binary would need full layout).
      if (binary) throw DataError("ply: unsupported element " + e.name);
      for (long i = 0; i < e.count; ++i) std::getline(in, line);
    }
  }
  mesh.validate();
  return mesh;
}

void write_ply(const TriMesh& mesh, const std::string& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii")
      << " 1.0\n";
  out << "element vertex " << mesh.vertices.rows() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << mesh.faces.rows() << "\n";
  out << "property list uchar int vertex_indices\n";
  if (mesh.has_labels()) out << "property int label\n";
  out << "end_header\n";
  if (binary) {
    for (long i = 0; i < mesh.vertices.rows(); ++i) {
      double xyz[3] = {mesh.vertices(i, 0), mesh.vertices(i, 1),
                       mesh.vertices(i, 2)};
      out.write(reinterpret_cast<const char*>(xyz), 24);
    }
    for (long i = 0; i < mesh.faces.rows(); ++i) {
      const uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      int32_t idx[3] = {mesh.faces(i, 0), mesh.faces(i, 1), mesh.faces(i, 2)};
      out.write(reinterpret_cast<const char*>(idx), 12);
      if (mesh.has_labels()) {
        const int32_t l = mesh.face_labels[i];
        out.write(reinterpret_cast<const char*>(&l), 4);
      }
    }
  } else {
    out.precision(17);
    for (long i = 0; i < mesh.vertices.rows(); ++i)
      out << mesh.vertices(i, 0) << " " << mesh.vertices(i, 1) << " "
          << mesh.vertices(i, 2) << "\n";
    for (long i = 0; i < mesh.faces.rows(); ++i) {
      out << "3 " << mesh.faces(i, 0) << " " << mesh.faces(i, 1) << " "
          << mesh.faces(i, 2);
      if (mesh.has_labels()) out << " " << mesh.face_labels[i];
      out << "\n";
    }
  }
  if (!out) throw DataError("write failed for " + path);
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<Vec3> verts;
  std::vector<Eigen::Vector3i> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "v") {
      Vec3 v;
      ls >> v[0] >> v[1] >> v[2];
      verts.push_back(v);
    } else if (tok == "f") {
      std::vector<int> idx;
      std::string part;
      while (ls >> part) {
        // "i", "i/j", "i/j/k" forms; indices are 1-based.
        idx.push_back(std::stoi(part.substr(0, part.find('/'))) - 1);
      }
      if (idx.size() < 3) throw DataError("obj: face with < 3 vertices");
      for (size_t j = 2; j < idx.size(); ++j)
        faces.push_back({idx[0], idx[static_cast<int>(j) - 1], idx[j]});
    }
  }
  TriMesh mesh;
  mesh.vertices.resize(static_cast<long>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i];
  mesh.faces.resize(static_cast<long>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i) mesh.faces.row(i) = faces[i];
  mesh.validate();
  return mesh;
}

void write_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  for (long i = 0; i < mesh.vertices.rows(); ++i)
    out << "v " << mesh.vertices(i, 0) << " " << mesh.vertices(i, 1) << " "
        << mesh.vertices(i, 2) << "\n";
  for (long i = 0; i < mesh.faces.rows(); ++i)
    out << "f " << mesh.faces(i, 0) + 1 << " " << mesh.faces(i, 1) + 1 << " "
        << mesh.faces(i, 2) + 1 << "\n";
  if (!out) throw DataError("write failed for " + path);
}

std::vector<int> read_label_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<int> labels;
  int v;
  while (in >> v) labels.push_back(v);
  return labels;
}

void write_label_sidecar(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (int l : labels) out << l << "\n";
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

TriMesh read_mesh(const std::string& path) {
  if (ends_with(path, ".ply")) return read_ply(path);
  if (ends_with(path, ".obj")) {
    TriMesh mesh = read_obj(path);
    std::ifstream probe(path + ".labels");
    if (probe.good()) {
      mesh.face_labels = read_label_sidecar(path + ".labels");
      mesh.validate();
    }
    return mesh;
  }
  throw DataError("unsupported mesh extension: " + path);
}

void write_mesh(const TriMesh& mesh, const std::string& path) {
  if (ends_with(path, ".ply")) {
    write_ply(mesh, path);
  } else if (ends_with(path, ".obj")) {
    write_obj(mesh, path);
    if (mesh.has_labels()) write_label_sidecar(mesh.face_labels, path + ".labels");
  } else {
    throw DataError("unsupported mesh extension: " + path);
  }
}

}  // namespace ircx
