#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ircx {

enum class ArchiveStatus {
  ok,
  bad_magic,
  version_mismatch,
  truncated,
  checksum_mismatch,
  missing_entry,
};

struct ArchiveError : std::runtime_error {
  ArchiveStatus code;
  ArchiveError(ArchiveStatus c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
};

enum class DType : uint8_t { f64 = 0, i32 = 1, u8 = 2 };

// Little-endian container: magic, version, entry manifest
// (name, dtype, shape, offset), raw arrays, trailing CRC32.
class Archive {
 public:
  struct Entry {
    DType dtype;
    std::vector<uint64_t> shape;
    std::vector<char> bytes;
  };

  void put_f64(const std::string& name, const Eigen::MatrixXd& m);
  void put_f64(const std::string& name, const Eigen::VectorXd& v);
  void put_i32(const std::string& name, const std::vector<int>& v,
               std::vector<uint64_t> shape = {});
  void put_str(const std::string& name, const std::string& s);

  bool has(const std::string& name) const { return entries_.count(name) > 0; }
  const Entry& entry(const std::string& name) const;
  Eigen::MatrixXd get_f64(const std::string& name) const;
  Eigen::VectorXd get_f64_vector(const std::string& name) const;
  std::vector<int> get_i32(const std::string& name) const;
  std::vector<uint64_t> shape(const std::string& name) const;
  std::string get_str(const std::string& name) const;

  std::vector<std::string> names() const;

  // magic must be exactly 5 bytes, e.g. "IRCX1" or "IRCK1".
  void save(const std::string& path, const std::string& magic) const;
  static Archive load(const std::string& path, const std::string& magic);

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace ircx
