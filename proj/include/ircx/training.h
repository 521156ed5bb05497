#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ircx/context.h"
#include "ircx/dataset.h"
#include "ircx/decoders.h"
#include "ircx/encoder.h"
#include "ircx/extraction.h"
#include "ircx/losses.h"
#include "ircx/metrics.h"

namespace ircx {

enum class Regime { joint, geometry_only, frozen_seg, frozen_ctx_seg };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& name);  // ConfigError on unknown names

// Shapes of every component; the regime decides which ones get built.
struct ModelConfig {
  EncoderConfig encoder;
  bool use_context = false;
  ContextConfig context;
  AggregatorConfig agg;
  std::vector<int> udf_hidden{64, 64};
  std::vector<int> seg_hidden{64, 64};
  int class_count = 0;  // 0 disables the segmentation head

  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  std::string hash() const;  // stable content hash of to_json()
};

// Component bundle over one parameter store. Components address their
// parameters by index, so the bundle is movable.
struct Model {
  ModelConfig cfg;
  nn::ParamStore params;
  Encoder encoder;
  std::optional<Contextualizer> ctx;
  UdfHead udf;
  std::optional<SegHead> seg;
  int log_vars = -1;  // param index; joint uncertainty training only

  static Model create(const ModelConfig& cfg, uint64_t seed,
                      bool with_log_vars = false);
  int feature_width() const {
    return cfg.encoder.out_dim + (cfg.use_context ? cfg.context.l : 0);
  }
};

struct RegimeConfig {
  Regime regime = Regime::joint;
  double lr = 1e-3;
  int batch_size = 12;        // scenes per optimizer step
  int encoder_points = 10240; // surface points fed to the encoder per scene
  int query_points = 50000;   // per scene per epoch, drawn without replacement
  int epochs = 1;
  uint64_t seed = 0;
  LossConfig loss;
  std::string context_preset;  // frozen_ctx_seg only; empty keeps the config

  void validate() const;
};

struct Checkpoint {
  ModelConfig model;
  nn::ParamStore params;  // values plus Adam moments
  int64_t adam_t = 0;
  int epoch = 0;  // epochs completed
  uint64_t seed = 0;
  std::string regime;
  std::string config_hash;
};

// IRCK1 container: every parameter (and its moments) as an f64 array plus a
// JSON metadata entry. Round trips bit-exactly.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// One record per epoch with named scalar fields; serialized as JSON lines.
struct TrainLog {
  std::vector<std::map<std::string, double>> epochs;
  // First optimizer step of the run, before any update was applied.
  double first_step_loss = std::nan("");
  double first_step_seg_loss = std::nan("");
};
void write_train_log(const TrainLog& log, const std::string& path);

struct TrainResult {
  Checkpoint checkpoint;
  TrainLog log;
};

// The four regimes. Frozen regimes require a geometry_only init checkpoint
// (its encoder/udf parameters stay bit-identical). Passing a checkpoint
// produced by the same regime/config resumes it.
TrainResult run_regime(const RegimeConfig& cfg, const ModelConfig& model_cfg,
                       const DatasetManifest& data,
                       const Checkpoint* init = nullptr);

struct EvalConfig {
  MetricConfig metrics;
  int resolution = 64;
  int chunk_size = 8192;
  int encoder_points = 10240;
  uint64_t seed = 0;  // surface-sampling seed for mesh-vs-mesh metrics

  void validate() const;
};

struct EvalResult {
  std::vector<std::string> scene_ids;
  std::vector<MetricReport> per_scene;
  MetricReport aggregate;
};

// Per-scene extraction + metrics over a split; aggregate is the field mean.
// Semantic fields stay NaN for checkpoints without a segmentation head.
EvalResult evaluate_checkpoint(const Checkpoint& ckpt,
                               const DatasetManifest& data,
                               const std::string& split, const EvalConfig& cfg);

// Fixed per-scene forward-pass geometry: encoder input subset (deterministic
// prefix of the stored surface samples) and the point pyramid over it.
struct SceneRuntime {
  SceneSample scene;
  Points enc_pts;
  nn::PointPyramid pyramid;

  static SceneRuntime build(SceneSample scene, const ModelConfig& cfg,
                            int encoder_points);
};

Model build_model(const Checkpoint& ckpt);

// Plain-matrix forwards shared by evaluation, extraction and analysis.
nn::Mat compute_encoding(Model& m, const SceneRuntime& rt);                // E_g
nn::Mat compute_context(Model& m, const SceneRuntime& rt, const nn::Mat& eg);  // E_c
// E_g for plain models, [E_g | E_c] when a contextualizer is present.
nn::Mat compute_features(Model& m, const SceneRuntime& rt, const nn::Mat& eg);

// Chunk-safe UDF evaluator over a fixed encoding; analytic query gradients.
// Captures m/rt by reference: keep them alive while the evaluator is used.
UdfFn make_udf_fn(Model& m, const SceneRuntime& rt, nn::Mat eg);

// Segmentation logits at arbitrary points, chunked. feats must be the
// width the head was built for.
nn::Mat seg_logits_at(Model& m, const SceneRuntime& rt, const nn::Mat& feats,
                      const Points& pts, int chunk_size = 8192);

std::vector<int> argmax_rows(const nn::Mat& logits);

}  // namespace ircx
