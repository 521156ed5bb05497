#include "ircx/cli.h"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <string>
#include <vector>

#include "ircx/analysis.h"
#include "ircx/archive.h"
#include "ircx/config.h"
#include "ircx/errors.h"
#include "ircx/mesh_io.h"
#include "ircx/rng.h"
#include "ircx/synth.h"
#include "ircx/training.h"

namespace ircx {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string part;
  std::stringstream ss(s);
  while (std::getline(ss, part, ','))
    if (!trim(part).empty()) out.push_back(trim(part));
  return out;
}

// Every subcommand takes --config/--set plus flags that map onto config
// keys; flags win over --set, --set wins over the file.
struct SubCommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  std::list<std::tuple<std::string, std::string, std::string>> bound;

  void init(CLI::App* a) {
    app = a;
    app->add_option("--config", config_path, "config file (key = value lines)");
    app->add_option("--set", sets, "override, KEY=VALUE (repeatable)");
  }

  void opt(const std::string& flag, const std::string& key,
           const std::string& desc) {
    bound.emplace_back(flag, key, std::string());
    app->add_option(flag, std::get<2>(bound.back()), desc);
  }

  RunConfig resolve() const {
    RunConfig cfg =
        config_path.empty() ? RunConfig() : RunConfig::parse_file(config_path);
    for (const std::string& s : sets) {
      const size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
      cfg.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    for (const auto& [flag, key, value] : bound)
      if (app->count(flag) > 0) cfg.set(key, value);
    return cfg;
  }
};

void write_echo(const RunConfig& cfg, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config echo: " + path.string());
  out << cfg.echo();
}

void ensure_parent_dir(const fs::path& p) {
  const fs::path dir = p.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

std::string canonical_regime(std::string r) {
  if (r == "geom") return "geometry_only";
  if (r == "frozen-seg") return "frozen_seg";
  if (r == "frozen-ctx") return "frozen_ctx_seg";
  return r;
}

DatasetManifest load_data(const std::string& spec) {
  if (spec.empty())
    throw ConfigError("no dataset given (--data or data.manifest)");
  const std::vector<std::string> paths = split_list(spec);
  std::vector<DatasetManifest> manifests;
  for (const std::string& p : paths)
    manifests.push_back(DatasetManifest::load(p));
  if (manifests.size() == 1) return manifests.front();
  return merge_datasets(manifests);
}

RoomSpec style_spec(const std::string& style) {
  RoomSpec spec;
  if (style == "a") {  // table/clutter heavy offices
    spec.width = {4.0, 6.5};
    spec.depth = {3.5, 6.0};
    spec.tables = {2, 4};
    spec.chairs = {1, 2};
    spec.columns = {0, 1};
    spec.clutter = {4, 8};
    spec.ceiling_probability = 0.6;
  } else if (style == "b") {  // chair/column heavy halls
    spec.width = {3.0, 5.0};
    spec.height = {2.6, 3.6};
    spec.tables = {0, 2};
    spec.chairs = {3, 6};
    spec.columns = {1, 3};
    spec.clutter = {1, 4};
    spec.ceiling_probability = 0.4;
  }
  return spec;
}

int run_synth(const RunConfig& cfg) {
  cfg.validate();
  const std::string name = cfg.get("data.synth_name");
  const fs::path out_dir = fs::path(cfg.get("data.out")) / name;
  fs::create_directories(out_dir);
  const int n_train = cfg.get_int("data.synth_train");
  const int n_test = cfg.get_int("data.synth_test");
  const int classes = cfg.get_int("data.synth_classes");
  const uint64_t seed = cfg.get_u64("data.seed");
  const RoomSpec spec = style_spec(cfg.get("data.synth_style"));

  DatasetManifest man;
  man.name = name;
  for (int c = 0; c < classes; ++c) man.class_names.push_back(synth_class_name(c));
  for (int i = 0; i < n_train + n_test; ++i) {
    const bool is_train = i < n_train;
    char id[64];
    std::snprintf(id, sizeof(id), "%s_%s%03d", name.c_str(),
                  is_train ? "tr" : "te", is_train ? i : i - n_train);
    const std::string scene_id = id;
    const TriMesh mesh = generate_synthetic_scene(
        spec, classes, hash_str(seed, "synth/" + scene_id));
    const SceneSample sample = prepare_scene(
        mesh, scene_id, cfg.get_int("data.surface_points"),
        cfg.get_int("data.query_points"), hash_str(seed, "prepare/" + scene_id),
        classes);
    const std::string rel = scene_id + ".ircx";
    write_archive(sample, (out_dir / rel).string());
    man.entries.push_back({scene_id, is_train ? "train" : "test", rel, ""});
    std::cout << "wrote " << (out_dir / rel).string() << "\n";
  }
  man.save((out_dir / "manifest.tsv").string());
  write_echo(cfg, out_dir / "config.txt");
  std::cout << "manifest: " << (out_dir / "manifest.tsv").string() << " ("
            << n_train << " train, " << n_test << " test)\n";
  return 0;
}

int run_prepare(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> mesh_paths = split_list(cfg.get("data.mesh"));
  if (mesh_paths.empty()) throw ConfigError("prepare needs --mesh");
  const std::string name = cfg.get("data.name");
  const fs::path out_dir = fs::path(cfg.get("data.out")) / name;
  fs::create_directories(out_dir);
  const uint64_t seed = cfg.get_u64("data.seed");

  std::vector<TriMesh> meshes;
  int max_label = -1;
  for (const std::string& p : mesh_paths) {
    meshes.push_back(read_mesh(p));
    for (int l : meshes.back().face_labels) max_label = std::max(max_label, l);
  }
  int class_count = cfg.get_int("data.class_count");
  if (class_count == 0) class_count = max_label + 1;
  if (class_count < 1) class_count = 1;

  std::vector<std::string> class_names;
  const std::string classes_file = cfg.get("data.classes_file");
  if (!classes_file.empty()) {
    std::ifstream in(classes_file);
    if (!in) throw DataError("cannot read classes file: " + classes_file);
    std::string line;
    while (std::getline(in, line))
      if (!trim(line).empty()) class_names.push_back(trim(line));
    if (static_cast<int>(class_names.size()) < class_count)
      throw ConfigError("classes file lists " +
                        std::to_string(class_names.size()) +
                        " names but labels need " + std::to_string(class_count));
  } else {
    for (int c = 0; c < class_count; ++c)
      class_names.push_back("class" + std::to_string(c));
  }

  const fs::path manifest_path = out_dir / "manifest.tsv";
  DatasetManifest man;
  if (fs::exists(manifest_path)) {
    man = DatasetManifest::load(manifest_path.string());
    if (man.class_names != class_names)
      throw ConfigError("existing manifest at " + manifest_path.string() +
                        " has different class names");
  } else {
    man.name = name;
    man.class_names = class_names;
  }

  const std::string split = cfg.get("data.split");
  for (size_t i = 0; i < meshes.size(); ++i) {
    const std::string scene_id = fs::path(mesh_paths[i]).stem().string();
    const SceneSample sample = prepare_scene(
        meshes[i], scene_id, cfg.get_int("data.surface_points"),
        cfg.get_int("data.query_points"), hash_str(seed, "prepare/" + scene_id),
        static_cast<int>(man.class_names.size()));
    const std::string rel = scene_id + ".ircx";
    write_archive(sample, (out_dir / rel).string());
    man.entries.push_back({scene_id, split, rel, ""});
    std::cout << "wrote " << (out_dir / rel).string() << "\n";
  }
  man.validate();
  man.save(manifest_path.string());
  write_echo(cfg, out_dir / "config.txt");
  std::cout << "manifest: " << manifest_path.string() << "\n";
  return 0;
}

int run_train(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest data = load_data(cfg.get("data.manifest"));
  const ModelConfig mc = cfg.model();
  const RegimeConfig rc = cfg.regime();
  std::optional<Checkpoint> init;
  if (!cfg.get("training.init").empty())
    init = load_checkpoint(cfg.get("training.init"));

  const fs::path out_dir = cfg.get("training.out");
  fs::create_directories(out_dir);
  write_echo(cfg, out_dir / "config.txt");

  const TrainResult res = run_regime(rc, mc, data, init ? &*init : nullptr);
  save_checkpoint(res.checkpoint, (out_dir / "checkpoint.irck").string());
  write_train_log(res.log, (out_dir / "train_log.jsonl").string());
  if (!res.log.epochs.empty()) {
    const auto& last = res.log.epochs.back();
    std::cout << "epoch " << res.checkpoint.epoch;
    for (const auto& [k, v] : last)
      if (k != "epoch") std::cout << "  " << k << "=" << v;
    std::cout << "\n";
  }
  std::cout << "checkpoint: " << (out_dir / "checkpoint.irck").string() << "\n";
  return 0;
}

int run_extract(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.get("metrics.checkpoint").empty())
    throw ConfigError("extract needs --ckpt");
  if (cfg.get("metrics.scene").empty()) throw ConfigError("extract needs --scene");
  const Checkpoint ckpt = load_checkpoint(cfg.get("metrics.checkpoint"));
  Model model = build_model(ckpt);
  const SceneRuntime rt =
      SceneRuntime::build(load_archive(cfg.get("metrics.scene")), model.cfg,
                          cfg.get_int("training.encoder_points"));
  const nn::Mat eg = compute_encoding(model, rt);
  const UdfFn fn = make_udf_fn(model, rt, eg);

  GridConfig grid_cfg;
  grid_cfg.resolution = cfg.get_int("metrics.resolution");
  grid_cfg.chunk_size = cfg.get_int("metrics.chunk_size");
  const ScalarGrid grid = eval_udf_grid(fn, grid_cfg);
  const TriMesh mesh = pseudo_sign_marching_cubes(grid, {});

  const std::string out = cfg.get("metrics.mesh_out");
  ensure_parent_dir(out);
  write_mesh(mesh, out);
  write_echo(cfg, out + ".config.txt");
  std::cout << "mesh: " << out << " (" << mesh.vertices.rows() << " vertices, "
            << mesh.faces.rows() << " faces)\n";
  return 0;
}

int run_eval(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.get("metrics.checkpoint").empty()) throw ConfigError("eval needs --ckpt");
  const Checkpoint ckpt = load_checkpoint(cfg.get("metrics.checkpoint"));
  const DatasetManifest data = load_data(cfg.get("data.manifest"));
  const EvalResult res =
      evaluate_checkpoint(ckpt, data, cfg.get("metrics.split"), cfg.eval());

  const std::string report = cfg.get("metrics.report");
  ensure_parent_dir(report);
  std::ofstream out(report);
  if (!out) throw DataError("cannot write report: " + report);
  out << report_csv_header() << "\n";
  for (size_t i = 0; i < res.per_scene.size(); ++i)
    out << report_csv_row(res.scene_ids[i], res.per_scene[i]) << "\n";
  out << report_csv_row("mean", res.aggregate) << "\n";
  write_echo(cfg, report + ".config.txt");
  std::cout << report_kv(res.aggregate);
  std::cout << "report: " << report << "\n";
  return 0;
}

int run_probe(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.get("metrics.checkpoint").empty()) throw ConfigError("probe needs --ckpt");
  if (cfg.get("metrics.scene").empty()) throw ConfigError("probe needs --scene");
  const Checkpoint ckpt = load_checkpoint(cfg.get("metrics.checkpoint"));
  const SceneSample scene = load_archive(cfg.get("metrics.scene"));
  const FeatureDump dump =
      compute_feature_dump(ckpt, scene, cfg.get("metrics.features"),
                           cfg.get_int("training.encoder_points"));
  const std::string out = cfg.get("metrics.features_out");
  ensure_parent_dir(out);
  save_feature_dump(dump, out);
  write_echo(cfg, out + ".config.txt");
  std::cout << "features: " << out << " (" << dump.features.rows() << " x "
            << dump.features.cols() << ", " << dump.which << ")\n";

  if (!dump.labels.empty()) {
    ProbeReport rep =
        knn_probe(dump.features, dump.labels, cfg.get_int("metrics.probe_k"),
                  cfg.get_int("metrics.probe_folds"), cfg.get_u64("metrics.seed"));
    rep.feature_tag = dump.which;
    std::cout << "probe_accuracy=" << rep.accuracy << "\n";
    std::cout << "silhouette=" << rep.silhouette << "\n";
    for (size_t c = 0; c < rep.per_class_accuracy.size(); ++c)
      if (!std::isnan(rep.per_class_accuracy[c]))
        std::cout << "class" << c << "_accuracy=" << rep.per_class_accuracy[c]
                  << "\n";
  } else {
    std::cout << "no labels; probe skipped\n";
  }
  return 0;
}

int run_ablate(RunConfig cfg) {
  cfg.set("training.regime", "frozen_ctx_seg");
  cfg.validate();
  if (cfg.get("training.init").empty())
    throw ConfigError("ablate needs --init (geometry_only checkpoint)");
  const Checkpoint init = load_checkpoint(cfg.get("training.init"));
  const DatasetManifest data = load_data(cfg.get("data.manifest"));
  const ModelConfig base = cfg.model();
  const RegimeConfig rc = cfg.regime();
  const fs::path out_dir = cfg.get("training.out");
  fs::create_directories(out_dir);
  write_echo(cfg, out_dir / "config.txt");

  // Table rows: architecture sweep at full depth, then the context-width
  // sweep on the unet5 row (l = base.context.l).
  const std::vector<std::string> rows = {"mlp", "unet3", "unet5", "l1", "l2"};
  std::ofstream csv(out_dir / "ablation.csv");
  if (!csv) throw DataError("cannot write ablation.csv");
  csv << "row," << report_csv_header() << "\n";
  for (const std::string& row : rows) {
    ModelConfig mc = base;
    if (row == "mlp") {
      mc.context.variant = "mlp";
    } else if (row == "unet3") {
      mc.context.variant = "unet3";
      mc.context.channels.resize(3);
      mc.context.blocks.resize(3);
    } else if (row == "l1") {
      mc.context.l = 1;
    } else if (row == "l2") {
      mc.context.l = 2;
    }
    const TrainResult res = run_regime(rc, mc, data, &init);
    const fs::path ckpt_path = out_dir / ("checkpoint_" + row + ".irck");
    save_checkpoint(res.checkpoint, ckpt_path.string());
    const EvalResult ev =
        evaluate_checkpoint(res.checkpoint, data, "test", cfg.eval());
    csv << row << "," << report_csv_row("mean", ev.aggregate) << "\n";
    std::cout << row << ": miou=" << ev.aggregate.miou
              << " mf1_delta=" << ev.aggregate.mf1_delta << "\n";
  }
  std::cout << "ablation: " << (out_dir / "ablation.csv").string() << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"unsigned-distance scene reconstruction with context features"};
  app.require_subcommand(1);

  SubCommand synth, prepare, train, extract, eval_, probe, ablate;

  synth.init(app.add_subcommand("synth", "generate a synthetic room dataset"));
  synth.opt("--out", "data.out", "output root directory");
  synth.opt("--name", "data.synth_name", "dataset name");
  synth.opt("--train", "data.synth_train", "train scene count");
  synth.opt("--test", "data.synth_test", "test scene count");
  synth.opt("--classes", "data.synth_classes", "semantic class count (2-8)");
  synth.opt("--style", "data.synth_style", "room statistics: default|a|b");
  synth.opt("--surface-points", "data.surface_points", "surface samples per scene");
  synth.opt("--query-points", "data.query_points", "query samples per scene");
  synth.opt("--seed", "data.seed", "generation seed");

  prepare.init(app.add_subcommand("prepare", "sample meshes into scene archives"));
  prepare.opt("--mesh", "data.mesh", "mesh file(s), comma separated (.ply/.obj)");
  prepare.opt("--out", "data.out", "output root directory");
  prepare.opt("--name", "data.name", "dataset name");
  prepare.opt("--split", "data.split", "split for these scenes: train|test");
  prepare.opt("--class-count", "data.class_count", "label count (0 = deduce)");
  prepare.opt("--classes-file", "data.classes_file", "class names, one per line");
  prepare.opt("--surface-points", "data.surface_points", "surface samples per scene");
  prepare.opt("--query-points", "data.query_points", "query samples per scene");
  prepare.opt("--seed", "data.seed", "sampling seed");

  train.init(app.add_subcommand("train", "train one regime"));
  train.opt("--regime", "training.regime",
            "joint|geom|frozen-seg|frozen-ctx (or full names)");
  train.opt("--data", "data.manifest", "manifest path(s), comma separated");
  train.opt("--init", "training.init", "checkpoint to initialize/resume from");
  train.opt("--out", "training.out", "output directory");
  train.opt("--epochs", "training.epochs", "epochs to train to");
  train.opt("--lr", "training.lr", "Adam learning rate");
  train.opt("--batch-size", "training.batch_size", "scenes per optimizer step");
  train.opt("--seed", "training.seed", "training seed");

  extract.init(app.add_subcommand("extract", "mesh a checkpoint on one scene"));
  extract.opt("--ckpt", "metrics.checkpoint", "checkpoint path");
  extract.opt("--scene", "metrics.scene", "scene archive path");
  extract.opt("--out", "metrics.mesh_out", "output mesh path (.ply/.obj)");
  extract.opt("--resolution", "metrics.resolution", "grid resolution");

  eval_.init(app.add_subcommand("eval", "evaluate a checkpoint over a split"));
  eval_.opt("--ckpt", "metrics.checkpoint", "checkpoint path");
  eval_.opt("--data", "data.manifest", "manifest path(s), comma separated");
  eval_.opt("--split", "metrics.split", "split to evaluate: train|test");
  eval_.opt("--report", "metrics.report", "output CSV path");
  eval_.opt("--delta", "metrics.delta", "F1 distance threshold");
  eval_.opt("--resolution", "metrics.resolution", "grid resolution");

  probe.init(app.add_subcommand("probe", "dump features and run a kNN probe"));
  probe.opt("--ckpt", "metrics.checkpoint", "checkpoint path");
  probe.opt("--scene", "metrics.scene", "scene archive path");
  probe.opt("--features", "metrics.features", "which features: eg|ec|es");
  probe.opt("--out", "metrics.features_out", "feature dump path");
  probe.opt("--k", "metrics.probe_k", "kNN neighbor count");
  probe.opt("--folds", "metrics.probe_folds", "cross-validation folds");

  ablate.init(app.add_subcommand("ablate", "context architecture/width sweep"));
  ablate.opt("--data", "data.manifest", "manifest path(s), comma separated");
  ablate.opt("--init", "training.init", "geometry_only checkpoint");
  ablate.opt("--out", "training.out", "output directory");
  ablate.opt("--epochs", "training.epochs", "epochs per row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train.app->parsed()) {
      // Accept the short regime aliases before the config layer sees them.
      for (auto& [flag, key, value] : train.bound)
        if (key == "training.regime") value = canonical_regime(value);
    }
    if (synth.app->parsed()) return run_synth(synth.resolve());
    if (prepare.app->parsed()) return run_prepare(prepare.resolve());
    if (train.app->parsed()) return run_train(train.resolve());
    if (extract.app->parsed()) return run_extract(extract.resolve());
    if (eval_.app->parsed()) return run_eval(eval_.resolve());
    if (probe.app->parsed()) return run_probe(probe.resolve());
    if (ablate.app->parsed()) return run_ablate(ablate.resolve());
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const ArchiveError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}

}  // namespace ircx
