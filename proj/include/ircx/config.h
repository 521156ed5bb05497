#pragma once

#include <string>
#include <vector>

#include "ircx/training.h"

namespace ircx {

// Flat key=value run configuration ("section.key = value" lines, '#'
// comments). Every key has a registered default; unknown keys are rejected.
// echo() emits all keys in registration order and parses back verbatim.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value);  // ConfigError on unknown
  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;  // comma separated

  std::string echo() const;
  void validate() const;

  // Typed views; class_count/use_context stay unset (the regime decides).
  ModelConfig model() const;
  RegimeConfig regime() const;
  EvalConfig eval() const;

 private:
  struct Item {
    std::string key;
    std::string value;
  };
  int find(const std::string& key) const;
  std::vector<Item> items_;  // registration order
};

}  // namespace ircx
