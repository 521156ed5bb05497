#include "ircx/config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ircx/errors.h"
#include "ircx/synth.h"

namespace ircx {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  auto reg = [this](const char* key, const char* value) {
    items_.push_back({key, value});
  };
  reg("data.manifest", "");
  reg("data.out", "out");
  reg("data.surface_points", "10000");
  reg("data.query_points", "100000");
  reg("data.seed", "0");
  reg("data.mesh", "");
  reg("data.name", "dataset");
  reg("data.split", "train");
  reg("data.class_count", "0");
  reg("data.classes_file", "");
  reg("data.synth_train", "32");
  reg("data.synth_test", "8");
  reg("data.synth_style", "default");
  reg("data.synth_name", "synth");
  reg("data.synth_classes", "8");

  reg("model.d", "32");
  reg("model.encoder_channels", "32,64,128,256,512");
  reg("model.encoder_blocks", "1,1,1,1,1");
  reg("model.neighbors", "8");
  reg("model.ratio", "0.25");
  reg("model.agg_k", "4");
  reg("model.agg_hidden", "32");
  reg("model.udf_hidden", "64,64");
  reg("model.seg_hidden", "64,64");
  reg("model.context_preset", "");
  reg("model.context_variant", "unet5");
  reg("model.context_channels", "32,32,64,64,128");
  reg("model.context_blocks", "1,1,1,1,1");
  reg("model.context_l", "4");
  reg("model.context_mlp_hidden", "64,64");

  reg("training.regime", "joint");
  reg("training.lr", "0.001");
  reg("training.batch_size", "12");
  reg("training.encoder_points", "10240");
  reg("training.query_points", "50000");
  reg("training.epochs", "500");
  reg("training.seed", "0");
  reg("training.clamp", "0.1");
  reg("training.near_surface_seg", "true");
  reg("training.weighting", "auto");
  reg("training.init", "");
  reg("training.out", "run");

  reg("metrics.delta", "0.005");
  reg("metrics.mesh_samples", "100000");
  reg("metrics.resolution", "64");
  reg("metrics.chunk_size", "8192");
  reg("metrics.seed", "0");
  reg("metrics.checkpoint", "");
  reg("metrics.scene", "");
  reg("metrics.mesh_out", "mesh.ply");
  reg("metrics.report", "report.csv");
  reg("metrics.split", "test");
  reg("metrics.features", "eg");
  reg("metrics.features_out", "features.ircx");
  reg("metrics.probe_k", "10");
  reg("metrics.probe_folds", "5");
}

int RunConfig::find(const std::string& key) const {
  for (size_t i = 0; i < items_.size(); ++i)
    if (items_[i].key == key) return static_cast<int>(i);
  return -1;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const int i = find(key);
  if (i < 0) throw ConfigError("unknown config key '" + key + "'");
  items_[i].value = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const int i = find(key);
  if (i < 0) throw ConfigError("unknown config key '" + key + "'");
  return items_[i].value;
}

int RunConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + v + "'");
  }
}

uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    const uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" +
                      v + "'");
  }
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key '" + key + "' must be true or false, got '" + v +
                    "'");
}

std::vector<int> RunConfig::get_ints(const std::string& key) const {
  const std::string& v = get(key);
  std::vector<int> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty())
      throw ConfigError("config key '" + key + "' has an empty list entry");
    try {
      size_t pos = 0;
      out.push_back(std::stoi(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-integer entry: '" +
                        part + "'");
    }
  }
  return out;
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("duplicate config key '" + key + "'");
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::string RunConfig::echo() const {
  std::string out;
  std::string section;
  for (const auto& item : items_) {
    const std::string s = item.key.substr(0, item.key.find('.'));
    if (s != section) {
      if (!section.empty()) out += "\n";
      section = s;
    }
    out += item.key + " = " + item.value + "\n";
  }
  return out;
}

ModelConfig RunConfig::model() const {
  ModelConfig m;
  m.encoder.channels = get_ints("model.encoder_channels");
  m.encoder.blocks = get_ints("model.encoder_blocks");
  m.encoder.neighbors = get_int("model.neighbors");
  m.encoder.ratio = get_double("model.ratio");
  m.encoder.out_dim = get_int("model.d");
  const std::string preset = get("model.context_preset");
  if (!preset.empty()) {
    m.context = context_preset(preset);
  } else {
    m.context.variant = get("model.context_variant");
    m.context.channels = get_ints("model.context_channels");
    m.context.blocks = get_ints("model.context_blocks");
    m.context.l = get_int("model.context_l");
    m.context.mlp_hidden = get_ints("model.context_mlp_hidden");
  }
  m.context.neighbors = m.encoder.neighbors;
  m.context.ratio = m.encoder.ratio;
  m.agg.k = get_int("model.agg_k");
  m.agg.hidden = get_int("model.agg_hidden");
  m.udf_hidden = get_ints("model.udf_hidden");
  m.seg_hidden = get_ints("model.seg_hidden");
  return m;
}

RegimeConfig RunConfig::regime() const {
  RegimeConfig r;
  r.regime = parse_regime(get("training.regime"));
  r.lr = get_double("training.lr");
  r.batch_size = get_int("training.batch_size");
  r.encoder_points = get_int("training.encoder_points");
  r.query_points = get_int("training.query_points");
  r.epochs = get_int("training.epochs");
  r.seed = get_u64("training.seed");
  r.loss.clamp = get_double("training.clamp");
  r.loss.near_surface_seg = get_bool("training.near_surface_seg");
  const std::string w = get("training.weighting");
  if (w == "auto")
    r.loss.weighting = r.regime == Regime::joint ? "uncertainty" : "single";
  else
    r.loss.weighting = w;
  return r;
}

EvalConfig RunConfig::eval() const {
  EvalConfig e;
  e.metrics.delta = get_double("metrics.delta");
  e.metrics.mesh_samples = get_int("metrics.mesh_samples");
  e.resolution = get_int("metrics.resolution");
  e.chunk_size = get_int("metrics.chunk_size");
  e.encoder_points = get_int("training.encoder_points");
  e.seed = get_u64("metrics.seed");
  return e;
}

void RunConfig::validate() const {
  ModelConfig m = model();
  m.validate();
  m.context.validate();  // context block must be sane even when unused
  const RegimeConfig r = regime();
  r.validate();
  eval().validate();
  if (get_int("data.surface_points") < 1)
    throw ConfigError("data.surface_points must be >= 1");
  if (get_int("data.query_points") < 1)
    throw ConfigError("data.query_points must be >= 1");
  get_u64("data.seed");
  if (get_int("data.class_count") < 0)
    throw ConfigError("data.class_count must be >= 0");
  for (const char* key : {"data.split", "metrics.split"}) {
    const std::string& v = get(key);
    if (v != "train" && v != "test")
      throw ConfigError(std::string(key) + " must be train or test");
  }
  const std::string& style = get("data.synth_style");
  if (style != "default" && style != "a" && style != "b")
    throw ConfigError("data.synth_style must be default, a, or b");
  if (get_int("data.synth_train") < 0 || get_int("data.synth_test") < 0)
    throw ConfigError("data.synth_train/test must be >= 0");
  const int sc = get_int("data.synth_classes");
  if (sc < 2 || sc > kSynthClassCount)
    throw ConfigError("data.synth_classes must be in [2, " +
                      std::to_string(kSynthClassCount) + "]");
  const std::string& feat = get("metrics.features");
  if (feat != "eg" && feat != "ec" && feat != "es")
    throw ConfigError("metrics.features must be eg, ec, or es");
  if (get_int("metrics.probe_k") < 1)
    throw ConfigError("metrics.probe_k must be >= 1");
  if (get_int("metrics.probe_folds") < 2)
    throw ConfigError("metrics.probe_folds must be >= 2");
}

}  // namespace ircx
