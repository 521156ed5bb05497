#include "ircx/archive.h"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace ircx {

namespace {

constexpr uint32_t kVersion = 1;

void append_raw(std::string& out, const void* p, size_t n) {
  out.append(static_cast<const char*>(p), n);
}

void append_u32(std::string& out, uint32_t v) { append_raw(out, &v, 4); }
void append_u64(std::string& out, uint64_t v) { append_raw(out, &v, 8); }

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size())
      throw ArchiveError(ArchiveStatus::truncated,
                         "archive truncated at byte " + std::to_string(pos));
  }
  void read(void* p, size_t n) {
    need(n);
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  uint32_t u32() {
    uint32_t v;
    read(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    read(&v, 8);
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s(buf.data() + pos, n);
    pos += n;
    return s;
  }
};

size_t dtype_size(DType t) {
  switch (t) {
    case DType::f64: return 8;
    case DType::i32: return 4;
    case DType::u8: return 1;
  }
  throw ArchiveError(ArchiveStatus::truncated, "unknown dtype");
}

uint64_t shape_count(const std::vector<uint64_t>& shape) {
  uint64_t n = 1;
  for (uint64_t d : shape) n *= d;
  return n;
}

}  // namespace

void Archive::put_f64(const std::string& name, const Eigen::MatrixXd& m) {
  Entry e;
  e.dtype = DType::f64;
  e.shape = {static_cast<uint64_t>(m.rows()), static_cast<uint64_t>(m.cols())};
  e.bytes.resize(sizeof(double) * m.size());
  // row-major on disk so readers in other languages see the natural layout
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  std::memcpy(e.bytes.data(), rm.data(), e.bytes.size());
  entries_[name] = std::move(e);
}

void Archive::put_f64(const std::string& name, const Eigen::VectorXd& v) {
  Entry e;
  e.dtype = DType::f64;
  e.shape = {static_cast<uint64_t>(v.size())};
  e.bytes.resize(sizeof(double) * v.size());
  std::memcpy(e.bytes.data(), v.data(), e.bytes.size());
  entries_[name] = std::move(e);
}

void Archive::put_i32(const std::string& name, const std::vector<int>& v,
                      std::vector<uint64_t> shape) {
  Entry e;
  e.dtype = DType::i32;
  if (shape.empty()) shape = {static_cast<uint64_t>(v.size())};
  if (shape_count(shape) != v.size())
    throw ArchiveError(ArchiveStatus::truncated,
                       "shape does not match data for " + name);
  e.shape = std::move(shape);
  e.bytes.resize(sizeof(int32_t) * v.size());
  std::memcpy(e.bytes.data(), v.data(), e.bytes.size());
  entries_[name] = std::move(e);
}

void Archive::put_str(const std::string& name, const std::string& s) {
  Entry e;
  e.dtype = DType::u8;
  e.shape = {static_cast<uint64_t>(s.size())};
  e.bytes.assign(s.begin(), s.end());
  entries_[name] = std::move(e);
}

const Archive::Entry& Archive::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw ArchiveError(ArchiveStatus::missing_entry,
                       "archive has no entry named '" + name + "'");
  return it->second;
}

Eigen::MatrixXd Archive::get_f64(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != DType::f64)
    throw ArchiveError(ArchiveStatus::missing_entry, name + " is not f64");
  uint64_t rows = e.shape.size() > 0 ? e.shape[0] : 0;
  uint64_t cols = e.shape.size() > 1 ? e.shape[1] : 1;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      rows, cols);
  std::memcpy(rm.data(), e.bytes.data(), e.bytes.size());
  return rm;
}

Eigen::VectorXd Archive::get_f64_vector(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != DType::f64)
    throw ArchiveError(ArchiveStatus::missing_entry, name + " is not f64");
  Eigen::VectorXd v(shape_count(e.shape));
  std::memcpy(v.data(), e.bytes.data(), e.bytes.size());
  return v;
}

std::vector<int> Archive::get_i32(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != DType::i32)
    throw ArchiveError(ArchiveStatus::missing_entry, name + " is not i32");
  std::vector<int> v(shape_count(e.shape));
  std::memcpy(v.data(), e.bytes.data(), e.bytes.size());
  return v;
}

std::vector<uint64_t> Archive::shape(const std::string& name) const {
  return entry(name).shape;
}

std::string Archive::get_str(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != DType::u8)
    throw ArchiveError(ArchiveStatus::missing_entry, name + " is not a string");
  return std::string(e.bytes.begin(), e.bytes.end());
}

std::vector<std::string> Archive::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

void Archive::save(const std::string& path, const std::string& magic) const {
  if (magic.size() != 5)
    throw ArchiveError(ArchiveStatus::bad_magic, "magic must be 5 bytes");
  std::string buf;
  buf += magic;
  append_u32(buf, kVersion);
  append_u32(buf, static_cast<uint32_t>(entries_.size()));
  for (const auto& [name, e] : entries_) {
    append_u32(buf, static_cast<uint32_t>(name.size()));
    buf += name;
    buf.push_back(static_cast<char>(e.dtype));
    append_u32(buf, static_cast<uint32_t>(e.shape.size()));
    for (uint64_t d : e.shape) append_u64(buf, d);
    append_u64(buf, e.bytes.size());
    buf.append(e.bytes.data(), e.bytes.size());
  }
  uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()),
            static_cast<uInt>(buf.size())));
  append_u32(buf, crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArchiveError(ArchiveStatus::truncated, "cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ArchiveError(ArchiveStatus::truncated, "write failed: " + path);
}

Archive Archive::load(const std::string& path, const std::string& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ArchiveError(ArchiveStatus::truncated, "cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  if (buf.size() < magic.size() + 8)
    throw ArchiveError(ArchiveStatus::truncated, path + " is too short");
  if (buf.compare(0, magic.size(), magic) != 0)
    throw ArchiveError(ArchiveStatus::bad_magic,
                       path + " does not start with " + magic);

  // checksum over everything before the trailing u32
  uint32_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
  uint32_t actual = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()),
            static_cast<uInt>(buf.size() - 4)));
  if (stored != actual)
    throw ArchiveError(ArchiveStatus::checksum_mismatch,
                       path + " failed checksum");

  Reader r{buf};
  r.pos = magic.size();
  uint32_t version = r.u32();
  if (version != kVersion)
    throw ArchiveError(ArchiveStatus::version_mismatch,
                       path + " has version " + std::to_string(version) +
                           ", expected " + std::to_string(kVersion));
  uint32_t count = r.u32();
  Archive a;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = r.u32();
    std::string name = r.str(name_len);
    Entry e;
    uint8_t dt;
    r.read(&dt, 1);
    if (dt > 2)
      throw ArchiveError(ArchiveStatus::truncated,
                         "bad dtype for entry " + name);
    e.dtype = static_cast<DType>(dt);
    uint32_t ndim = r.u32();
    e.shape.resize(ndim);
    for (uint32_t d = 0; d < ndim; ++d) e.shape[d] = r.u64();
    uint64_t nbytes = r.u64();
    if (nbytes != shape_count(e.shape) * dtype_size(e.dtype))
      throw ArchiveError(ArchiveStatus::truncated,
                         "payload size mismatch for entry " + name);
    r.need(nbytes);
    e.bytes.assign(buf.data() + r.pos, buf.data() + r.pos + nbytes);
    r.pos += nbytes;
    a.entries_[name] = std::move(e);
  }
  if (r.pos != buf.size() - 4)
    throw ArchiveError(ArchiveStatus::truncated,
                       path + " has trailing bytes after manifest");
  return a;
}

}  // namespace ircx
