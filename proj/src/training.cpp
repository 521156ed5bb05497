#include "ircx/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "ircx/archive.h"
#include "ircx/errors.h"
#include "ircx/rng.h"
#include "ircx/spatial.h"

namespace ircx {

using nlohmann::json;
using nn::Mat;

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::joint: return "joint";
    case Regime::geometry_only: return "geometry_only";
    case Regime::frozen_seg: return "frozen_seg";
    case Regime::frozen_ctx_seg: return "frozen_ctx_seg";
  }
  throw ArgumentError("regime_name: bad enum value");
}

Regime parse_regime(const std::string& name) {
  if (name == "joint") return Regime::joint;
  if (name == "geometry_only") return Regime::geometry_only;
  if (name == "frozen_seg") return Regime::frozen_seg;
  if (name == "frozen_ctx_seg") return Regime::frozen_ctx_seg;
  throw ConfigError("unknown regime '" + name +
                    "' (expected joint|geometry_only|frozen_seg|frozen_ctx_seg)");
}

void ModelConfig::validate() const {
  encoder.validate();
  if (use_context) {
    context.validate();
    if (context.variant != "mlp" &&
        (context.neighbors != encoder.neighbors || context.ratio != encoder.ratio))
      throw ConfigError(
          "context neighbors/ratio must match the encoder (shared pyramid)");
  }
  if (agg.k < 1) throw ConfigError("aggregator k must be >= 1");
  if (agg.hidden < 1) throw ConfigError("aggregator hidden width must be >= 1");
  if (class_count < 0 || class_count == 1)
    throw ConfigError("class_count must be 0 (no head) or >= 2");
  for (int h : udf_hidden)
    if (h < 1) throw ConfigError("udf_hidden entries must be >= 1");
  for (int h : seg_hidden)
    if (h < 1) throw ConfigError("seg_hidden entries must be >= 1");
}

std::string ModelConfig::to_json() const {
  json j;
  j["encoder"] = {{"channels", encoder.channels},
                  {"blocks", encoder.blocks},
                  {"neighbors", encoder.neighbors},
                  {"ratio", encoder.ratio},
                  {"out_dim", encoder.out_dim}};
  j["use_context"] = use_context;
  j["context"] = {{"variant", context.variant},
                  {"channels", context.channels},
                  {"blocks", context.blocks},
                  {"neighbors", context.neighbors},
                  {"ratio", context.ratio},
                  {"l", context.l},
                  {"mlp_hidden", context.mlp_hidden}};
  j["agg"] = {{"k", agg.k}, {"hidden", agg.hidden}};
  j["udf_hidden"] = udf_hidden;
  j["seg_hidden"] = seg_hidden;
  j["class_count"] = class_count;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  ModelConfig c;
  try {
    json j = json::parse(text);
    const json& e = j.at("encoder");
    c.encoder.channels = e.at("channels").get<std::vector<int>>();
    c.encoder.blocks = e.at("blocks").get<std::vector<int>>();
    c.encoder.neighbors = e.at("neighbors").get<int>();
    c.encoder.ratio = e.at("ratio").get<double>();
    c.encoder.out_dim = e.at("out_dim").get<int>();
    c.use_context = j.at("use_context").get<bool>();
    const json& x = j.at("context");
    c.context.variant = x.at("variant").get<std::string>();
    c.context.channels = x.at("channels").get<std::vector<int>>();
    c.context.blocks = x.at("blocks").get<std::vector<int>>();
    c.context.neighbors = x.at("neighbors").get<int>();
    c.context.ratio = x.at("ratio").get<double>();
    c.context.l = x.at("l").get<int>();
    c.context.mlp_hidden = x.at("mlp_hidden").get<std::vector<int>>();
    c.agg.k = j.at("agg").at("k").get<int>();
    c.agg.hidden = j.at("agg").at("hidden").get<int>();
    c.udf_hidden = j.at("udf_hidden").get<std::vector<int>>();
    c.seg_hidden = j.at("seg_hidden").get<std::vector<int>>();
    c.class_count = j.at("class_count").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad model config json: ") + e.what());
  }
  return c;
}

std::string ModelConfig::hash() const {
  const std::string s = to_json();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Model Model::create(const ModelConfig& cfg, uint64_t seed, bool with_log_vars) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  m.encoder = Encoder::create(m.params, "enc", cfg.encoder, seed);
  const int d = cfg.encoder.out_dim;
  int feat = d;
  if (cfg.use_context) {
    m.ctx = Contextualizer::create(m.params, "ctx", cfg.context, d, seed);
    feat = d + cfg.context.l;
  }
  m.udf = UdfHead::create(m.params, "udf", d, cfg.agg, cfg.udf_hidden, seed);
  if (cfg.class_count > 0)
    m.seg = SegHead::create(m.params, "seg", feat, cfg.class_count, cfg.agg,
                            cfg.seg_hidden, seed);
  if (with_log_vars)
    m.log_vars = m.params.add_value("loss/log_vars", Mat::Zero(1, 2));
  return m;
}

void RegimeConfig::validate() const {
  if (lr <= 0.0) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (encoder_points < 1) throw ConfigError("encoder_points must be >= 1");
  if (query_points < 1) throw ConfigError("query_points must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  loss.validate();
  if (!context_preset.empty() && regime != Regime::frozen_ctx_seg)
    throw ConfigError("context_preset only applies to frozen_ctx_seg");
  if (loss.weighting == "uncertainty" && regime != Regime::joint)
    throw ConfigError("uncertainty weighting only applies to the joint regime");
}

void EvalConfig::validate() const {
  metrics.validate();
  if (resolution < 8) throw ConfigError("eval resolution must be >= 8");
  if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
  if (encoder_points < 1) throw ConfigError("encoder_points must be >= 1");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  Archive a;
  json meta;
  meta["version"] = 1;
  meta["model"] = json::parse(ckpt.model.to_json());
  meta["epoch"] = ckpt.epoch;
  meta["seed"] = std::to_string(ckpt.seed);
  meta["adam_t"] = ckpt.adam_t;
  meta["regime"] = ckpt.regime;
  meta["config_hash"] = ckpt.config_hash;
  a.put_str("meta", meta.dump());
  for (int i = 0; i < ckpt.params.count(); ++i) {
    const nn::Param& p = ckpt.params.at(i);
    a.put_f64("param/" + p.name, p.value);
    if (p.m.size() > 0) {
      a.put_f64("adam_m/" + p.name, p.m);
      a.put_f64("adam_v/" + p.name, p.v);
    }
  }
  a.save(path, "IRCK1");
}

Checkpoint load_checkpoint(const std::string& path) {
  Archive a = Archive::load(path, "IRCK1");
  Checkpoint c;
  try {
    json meta = json::parse(a.get_str("meta"));
    if (meta.at("version").get<int>() != 1)
      throw ArchiveError(ArchiveStatus::version_mismatch,
                         "unsupported checkpoint metadata version");
    c.model = ModelConfig::from_json(meta.at("model").dump());
    c.epoch = meta.at("epoch").get<int>();
    c.seed = std::stoull(meta.at("seed").get<std::string>());
    c.adam_t = meta.at("adam_t").get<int64_t>();
    c.regime = meta.at("regime").get<std::string>();
    c.config_hash = meta.at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw DataError(std::string("bad checkpoint metadata: ") + e.what());
  }
  for (const std::string& name : a.names()) {
    if (name.rfind("param/", 0) != 0) continue;
    const std::string pname = name.substr(6);
    const int i = c.params.add_value(pname, a.get_f64(name));
    if (a.has("adam_m/" + pname)) {
      c.params.at(i).m = a.get_f64("adam_m/" + pname);
      c.params.at(i).v = a.get_f64("adam_v/" + pname);
    }
  }
  return c;
}

void write_train_log(const TrainLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write train log: " + path);
  for (const auto& rec : log.epochs) {
    json j(rec);
    out << j.dump() << "\n";
  }
}

SceneRuntime SceneRuntime::build(SceneSample scene, const ModelConfig& cfg,
                                 int encoder_points) {
  SceneRuntime rt;
  rt.scene = std::move(scene);
  const int n = rt.scene.surface.size();
  if (n < 1) throw DataError("scene has no surface points: " + rt.scene.scene_id);
  const int take = std::min(encoder_points, n);
  rt.enc_pts = rt.scene.surface.points.topRows(take);
  int scales = static_cast<int>(cfg.encoder.channels.size());
  if (cfg.use_context) scales = std::max(scales, cfg.context.scale_count());
  rt.pyramid = nn::PointPyramid::build(rt.enc_pts, scales, cfg.encoder.ratio,
                                       cfg.encoder.neighbors);
  return rt;
}

Mat compute_encoding(Model& m, const SceneRuntime& rt) {
  nn::Pass pass(m.params);
  const int eg = m.encoder.forward(pass, rt.pyramid);
  return pass.val(eg);
}

Mat compute_context(Model& m, const SceneRuntime& rt, const Mat& eg) {
  if (!m.ctx) throw ConfigError("model has no contextualizer");
  nn::Pass pass(m.params);
  const int ec = m.ctx->forward(pass, pass.leaf(eg), rt.pyramid);
  return pass.val(ec);
}

Mat compute_features(Model& m, const SceneRuntime& rt, const Mat& eg) {
  if (!m.ctx) return eg;
  return fuse(eg, compute_context(m, rt, eg));
}

UdfFn make_udf_fn(Model& m, const SceneRuntime& rt, Mat eg) {
  auto eg_ptr = std::make_shared<Mat>(std::move(eg));
  Model* mp = &m;
  const SceneRuntime* rp = &rt;
  return [mp, rp, eg_ptr](const Points& q, Eigen::VectorXd& values,
                          Points* gradients) {
    nn::Pass pass(mp->params);
    const int qn = pass.leaf(q);
    const auto nb = nn::knn_pairs(q, rp->enc_pts, mp->cfg.agg.k);
    const int feats = pass.leaf(*eg_ptr);
    const int pred = mp->udf.forward(pass, feats, qn, nb);
    values = pass.val(pred).col(0);
    if (gradients) {
      const int s = ad::sum_all(pass.tape, pred);
      pass.tape.backward(s);
      *gradients = pass.tape.grad(qn);
    }
  };
}

Mat seg_logits_at(Model& m, const SceneRuntime& rt, const Mat& feats,
                  const Points& pts, int chunk_size) {
  if (!m.seg) throw ConfigError("model has no segmentation head");
  if (chunk_size < 1) throw ArgumentError("seg_logits_at: chunk_size must be >= 1");
  Mat out(pts.rows(), m.cfg.class_count);
  for (int start = 0; start < pts.rows(); start += chunk_size) {
    const int n = std::min<int>(chunk_size, static_cast<int>(pts.rows()) - start);
    const Points chunk = pts.middleRows(start, n);
    nn::Pass pass(m.params);
    const auto nb = nn::knn_pairs(chunk, rt.enc_pts, m.cfg.agg.k);
    const int logits =
        m.seg->forward(pass, pass.leaf(feats), pass.leaf(chunk), nb);
    out.middleRows(start, n) = pass.val(logits);
  }
  return out;
}

std::vector<int> argmax_rows(const Mat& logits) {
  std::vector<int> out(logits.rows());
  for (int r = 0; r < logits.rows(); ++r) {
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c)
      if (logits(r, c) > logits(r, best)) best = c;
    out[r] = best;
  }
  return out;
}

namespace {

void adam_step(nn::ParamStore& ps, std::vector<Mat>& grads, int64_t t, double lr) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (int i = 0; i < ps.count(); ++i) {
    nn::Param& p = ps.at(i);
    if (!p.trainable) continue;
    const Mat g = grads[i].size() > 0
                      ? std::move(grads[i])
                      : Mat(Mat::Zero(p.value.rows(), p.value.cols()));
    if (p.m.size() == 0) {
      p.m = Mat::Zero(p.value.rows(), p.value.cols());
      p.v = Mat::Zero(p.value.rows(), p.value.cols());
    }
    p.m = b1 * p.m + (1.0 - b1) * g;
    p.v = b2 * p.v + (1.0 - b2) * g.cwiseProduct(g);
    p.value.array() -= lr * (p.m.array() / c1) / ((p.v.array() / c2).sqrt() + eps);
  }
}

// Copies all parameters under prefix; the name sets must match exactly.
void copy_component(const nn::ParamStore& src, nn::ParamStore& dst,
                    const std::string& prefix, bool with_moments) {
  auto src_names = src.names(prefix);
  auto dst_names = dst.names(prefix);
  std::sort(src_names.begin(), src_names.end());
  std::sort(dst_names.begin(), dst_names.end());
  if (src_names != dst_names)
    throw ConfigError("init checkpoint component '" + prefix +
                      "' does not match the configured model (config-hash/shape "
                      "mismatch)");
  for (const auto& name : src_names) {
    const nn::Param& s = src.at(src.index(name));
    nn::Param& d = dst.at(dst.index(name));
    if (s.value.rows() != d.value.rows() || s.value.cols() != d.value.cols())
      throw ConfigError("init checkpoint shape mismatch for parameter " + name);
    d.value = s.value;
    if (with_moments) {
      d.m = s.m;
      d.v = s.v;
    }
  }
}

struct SceneStats {
  bool contributed = false;
  bool has_udf = false, has_seg = false;
  double total = 0.0, udf = 0.0, seg = 0.0, acc = 0.0;
};

}  // namespace

Model build_model(const Checkpoint& ckpt) {
  Model m = Model::create(ckpt.model, ckpt.seed, ckpt.params.has("loss/log_vars"));
  copy_component(ckpt.params, m.params, "", true);
  return m;
}

TrainResult run_regime(const RegimeConfig& cfg, const ModelConfig& model_cfg,
                       const DatasetManifest& data, const Checkpoint* init) {
  cfg.validate();
  const std::string rname = regime_name(cfg.regime);
  const auto train_entries = data.split_entries("train");
  if (train_entries.empty()) throw DataError("manifest has no train scenes");

  // The regime decides the component set.
  ModelConfig mc = model_cfg;
  mc.use_context = cfg.regime == Regime::frozen_ctx_seg;
  if (cfg.regime == Regime::frozen_ctx_seg && !cfg.context_preset.empty())
    mc.context = context_preset(cfg.context_preset);
  if (cfg.regime == Regime::geometry_only) {
    mc.class_count = 0;
  } else {
    mc.class_count = data.class_count();
    if (mc.class_count < 2)
      throw ConfigError("segmentation regimes need >= 2 classes in the manifest");
  }
  mc.validate();
  const bool frozen = cfg.regime == Regime::frozen_seg ||
                      cfg.regime == Regime::frozen_ctx_seg;
  const bool uncertainty =
      cfg.regime == Regime::joint && cfg.loss.weighting == "uncertainty";

  Model model = Model::create(mc, cfg.seed, uncertainty);
  int start_epoch = 0;
  int64_t adam_t = 0;

  const bool resuming = init != nullptr && init->regime == rname;
  if (resuming) {
    if (init->config_hash != mc.hash())
      throw ConfigError("resume checkpoint config hash does not match");
    if (init->seed != cfg.seed)
      throw ConfigError("resume checkpoint was trained with a different seed");
    if (init->epoch > cfg.epochs)
      throw ConfigError("resume checkpoint is already past the requested epochs");
    copy_component(init->params, model.params, "", true);
    start_epoch = init->epoch;
    adam_t = init->adam_t;
  } else if (frozen) {
    if (!init)
      throw ConfigError(rname +
                        " requires an init checkpoint from a geometry_only run "
                        "(--init)");
    if (init->regime != "geometry_only")
      throw ConfigError(rname + " takes a geometry_only init checkpoint, got '" +
                        init->regime + "'");
    copy_component(init->params, model.params, "enc", false);
    copy_component(init->params, model.params, "udf", false);
  } else if (init) {
    throw ConfigError("init checkpoint regime '" + init->regime +
                      "' cannot seed a " + rname + " run");
  }
  if (frozen) {
    model.params.set_trainable("enc", false);
    model.params.set_trainable("udf", false);
  }

  std::vector<SceneRuntime> scenes;
  scenes.reserve(train_entries.size());
  for (const auto& entry : train_entries)
    scenes.push_back(
        SceneRuntime::build(load_archive(entry.path), mc, cfg.encoder_points));
  std::vector<Mat> cached_eg;
  if (frozen) {
    cached_eg.reserve(scenes.size());
    for (auto& rt : scenes) cached_eg.push_back(compute_encoding(model, rt));
  }

  const bool want_udf =
      cfg.regime == Regime::joint || cfg.regime == Regime::geometry_only;
  const bool want_seg = cfg.regime != Regime::geometry_only;

  TrainLog log;
  bool first_recorded = false;
  const int n_scenes = static_cast<int>(scenes.size());

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto order = stream(cfg.seed, "scene_order", epoch).permutation(n_scenes);
    double ep_total = 0, ep_udf = 0, ep_seg = 0, ep_acc = 0;
    int ep_n = 0, ep_udf_n = 0, ep_seg_n = 0;

    for (int bstart = 0; bstart < n_scenes; bstart += cfg.batch_size) {
      const int bcount = std::min(cfg.batch_size, n_scenes - bstart);
      std::vector<Mat> accum(model.params.count());
      double b_total = 0, b_seg = 0;
      int b_n = 0, b_seg_n = 0;

      for (int b = 0; b < bcount; ++b) {
        SceneRuntime& rt = scenes[order[bstart + b]];
        const Mat* eg_cache = frozen ? &cached_eg[order[bstart + b]] : nullptr;
        SceneStats st;

        const QuerySet& bank = rt.scene.queries;
        const int bank_n = bank.size();
        if (bank_n < 1) throw DataError("scene has no queries: " + rt.scene.scene_id);
        const auto perm =
            stream(cfg.seed, "queries/" + rt.scene.scene_id, epoch).permutation(bank_n);
        const int Q = std::min(cfg.query_points, bank_n);
        Points qp(Q, 3);
        Eigen::VectorXd gt(Q);
        const bool has_labels = !bank.gt_label.empty();
        std::vector<int> lab(has_labels ? Q : 0);
        for (int r = 0; r < Q; ++r) {
          const int s = perm[r];
          qp.row(r) = bank.points.row(s);
          gt[r] = bank.gt_distance[s];
          if (has_labels) lab[r] = bank.gt_label[s];
        }

        nn::Pass pass(model.params);
        int eg = eg_cache ? pass.leaf(*eg_cache)
                          : model.encoder.forward(pass, rt.pyramid);
        int feats = eg;
        if (cfg.regime == Regime::frozen_ctx_seg)
          feats = fuse(pass, eg, model.ctx->forward(pass, eg, rt.pyramid));

        const int qn = pass.leaf(qp);
        const auto nb = nn::knn_pairs(qp, rt.enc_pts, mc.agg.k);

        int l_udf = -1, l_seg = -1;
        if (want_udf) {
          const int pred = model.udf.forward(pass, eg, qn, nb);
          l_udf = clamped_l1(pass.tape, pred, gt, cfg.loss.clamp);
          st.has_udf = true;
          st.udf = pass.val(l_udf)(0, 0);
        }
        if (want_seg) {
          if (!has_labels)
            throw DataError("scene lacks query labels: " + rt.scene.scene_id);
          std::vector<int> rows;
          rows.reserve(Q);
          for (int r = 0; r < Q; ++r)
            if (!cfg.loss.near_surface_seg || gt[r] < cfg.loss.clamp)
              rows.push_back(r);
          if (!rows.empty()) {
            const int logits = model.seg->forward(pass, feats, qn, nb);
            auto rows_ptr = std::make_shared<const std::vector<int>>(rows);
            const int sel = ad::gather_rows(pass.tape, logits, rows_ptr);
            auto lab_sel = std::make_shared<std::vector<int>>();
            lab_sel->reserve(rows.size());
            for (int r : rows) lab_sel->push_back(lab[r]);
            l_seg = cross_entropy(pass.tape, sel, lab_sel);
            st.has_seg = true;
            st.seg = pass.val(l_seg)(0, 0);
            const Mat& lm = pass.val(sel);
            int correct = 0;
            for (int r = 0; r < lm.rows(); ++r) {
              int best = 0;
              for (int c = 1; c < lm.cols(); ++c)
                if (lm(r, c) > lm(r, best)) best = c;
              if (best == (*lab_sel)[r]) ++correct;
            }
            st.acc = static_cast<double>(correct) / static_cast<double>(rows.size());
          }
        }

        int total = -1;
        if (cfg.regime == Regime::geometry_only) {
          total = l_udf;
        } else if (cfg.regime == Regime::joint) {
          std::vector<int> parts;
          if (l_udf >= 0) parts.push_back(l_udf);
          if (l_seg >= 0) parts.push_back(l_seg);
          if (parts.empty()) {
            total = -1;
          } else if (uncertainty) {
            total = uncertainty_combine(pass.tape, parts, pass.p(model.log_vars));
          } else {
            total = parts[0];
            for (size_t pi = 1; pi < parts.size(); ++pi)
              total = ad::add(pass.tape, total, parts[pi]);
          }
        } else {
          total = l_seg;
        }
        if (total < 0) continue;
        st.contributed = true;
        st.total = pass.val(total)(0, 0);

        const int scaled = ad::scale(pass.tape, total, 1.0 / bcount);
        pass.tape.backward(scaled);
        for (int i = 0; i < model.params.count(); ++i) {
          if (!model.params.at(i).trainable || pass.node_of[i] < 0) continue;
          const Mat& gm = pass.tape.grad(pass.node_of[i]);
          if (accum[i].size() == 0)
            accum[i] = gm;
          else
            accum[i] += gm;
        }

        b_total += st.total;
        ++b_n;
        if (st.has_seg) {
          b_seg += st.seg;
          ++b_seg_n;
        }
        ep_total += st.total;
        ++ep_n;
        if (st.has_udf) {
          ep_udf += st.udf;
          ++ep_udf_n;
        }
        if (st.has_seg) {
          ep_seg += st.seg;
          ep_acc += st.acc;
          ++ep_seg_n;
        }
      }

      if (!first_recorded && b_n > 0) {
        log.first_step_loss = b_total / b_n;
        if (b_seg_n > 0) log.first_step_seg_loss = b_seg / b_seg_n;
        first_recorded = true;
      }
      adam_step(model.params, accum, ++adam_t, cfg.lr);
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::map<std::string, double> rec;
    rec["epoch"] = epoch;
    rec["seconds"] = seconds;
    if (ep_n > 0) rec["loss"] = ep_total / ep_n;
    if (ep_udf_n > 0) rec["loss_udf"] = ep_udf / ep_udf_n;
    if (ep_seg_n > 0) {
      rec["loss_seg"] = ep_seg / ep_seg_n;
      rec["seg_acc"] = ep_acc / ep_seg_n;
    }
    if (uncertainty) {
      const Mat& lv = model.params.at(model.log_vars).value;
      rec["log_var_udf"] = lv(0, 0);
      rec["log_var_seg"] = lv(0, 1);
    }
    log.epochs.push_back(std::move(rec));
  }

  Checkpoint out;
  out.model = mc;
  out.params = model.params;
  out.adam_t = adam_t;
  out.epoch = cfg.epochs;
  out.seed = cfg.seed;
  out.regime = rname;
  out.config_hash = mc.hash();
  return {std::move(out), std::move(log)};
}

EvalResult evaluate_checkpoint(const Checkpoint& ckpt, const DatasetManifest& data,
                               const std::string& split, const EvalConfig& cfg) {
  cfg.validate();
  const auto entries = data.split_entries(split);
  if (entries.empty()) throw DataError("manifest has no '" + split + "' scenes");
  Model model = build_model(ckpt);

  EvalResult result;
  for (const auto& entry : entries) {
    SceneRuntime rt =
        SceneRuntime::build(load_archive(entry.path), model.cfg, cfg.encoder_points);
    const Mat eg = compute_encoding(model, rt);
    const auto fn = make_udf_fn(model, rt, eg);
    GridConfig gc;
    gc.resolution = cfg.resolution;
    gc.chunk_size = cfg.chunk_size;
    const ScalarGrid grid = eval_udf_grid(fn, gc);
    const TriMesh mesh = pseudo_sign_marching_cubes(grid);

    MetricReport r;
    const PointCloud gt_samples =
        sample_surface(rt.scene.mesh, cfg.metrics.mesh_samples, cfg.seed);
    PointCloud pred_samples;
    if (mesh.faces.rows() > 0)
      pred_samples = sample_surface(mesh, cfg.metrics.mesh_samples, cfg.seed);
    std::tie(r.cd_l1, r.cd_l2) = chamfer(pred_samples.points, gt_samples.points);
    r.f1_delta = fscore(pred_samples.points, gt_samples.points, cfg.metrics.delta);
    r.f1_2delta =
        fscore(pred_samples.points, gt_samples.points, 2.0 * cfg.metrics.delta);

    if (model.seg) {
      const Mat feats = compute_features(model, rt, eg);
      if (gt_samples.has_labels()) {
        std::vector<int> pred_labels;
        if (pred_samples.size() > 0)
          pred_labels = argmax_rows(
              seg_logits_at(model, rt, feats, pred_samples.points, cfg.chunk_size));
        r.mf1_delta =
            semantic_fscore(pred_samples.points, pred_labels, gt_samples.points,
                            gt_samples.labels, cfg.metrics.delta,
                            model.cfg.class_count)
                .first;
        r.mf1_2delta =
            semantic_fscore(pred_samples.points, pred_labels, gt_samples.points,
                            gt_samples.labels, 2.0 * cfg.metrics.delta,
                            model.cfg.class_count)
                .first;
      }
      if (rt.scene.surface.has_labels()) {
        const auto pred = argmax_rows(seg_logits_at(
            model, rt, feats, rt.scene.surface.points, cfg.chunk_size));
        std::tie(r.miou, r.per_class_iou) =
            miou(pred, rt.scene.surface.labels, model.cfg.class_count);
      }
    }
    result.scene_ids.push_back(entry.scene_id);
    result.per_scene.push_back(std::move(r));
  }
  result.aggregate = aggregate_reports(result.per_scene);
  return result;
}

}  // namespace ircx
