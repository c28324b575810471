// SPDX-License-Identifier: Apache-2.0
//
// zeal: single entrypoint for the skill-assessment pipeline.
//   masks   populate the tool-mask cache for a dataset
//   train   train one cross-validation fold
//   eval    run the full 4-fold evaluation and write reports
//   synth   generate a synthetic benchmark dataset
//   report  re-emit CSV tables from an existing report.json

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "zeal/data/synthetic.hpp"
#include "zeal/eval/cross_validation.hpp"
#include "zeal/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string manifest;
  std::string cache_dir;
  std::string out;
  std::string config_file;
  int workers = 1;
  bool compute_missing = false;
};

fs::path resolve_cache_dir(const CommonArgs& args) {
  if (!args.cache_dir.empty()) return args.cache_dir;
  if (const char* env = std::getenv("ZEAL_CACHE_DIR"); env && *env)
    return fs::path(env);
  if (!args.out.empty()) return fs::path(args.out) / "cache";
  throw zeal::ArgumentError(
      "no cache directory: pass --cache-dir or set ZEAL_CACHE_DIR");
}

void echo_config(const fs::path& out_dir, const json& effective) {
  fs::create_directories(out_dir);
  std::ofstream f(out_dir / "effective_config.json", std::ios::trunc);
  if (!f)
    throw zeal::DataError("cannot write " +
                          (out_dir / "effective_config.json").string());
  f << effective.dump(2) << '\n';
  std::cout << effective.dump() << '\n';
}

zeal::TrainConfig config_from_args(const CLI::App* cmd, const CommonArgs& args,
                                   const std::string& prompt,
                                   const std::string& backend,
                                   const std::string& preset,
                                   const std::string& variant, int epochs,
                                   std::uint64_t seed, bool freeze) {
  zeal::TrainConfig cfg;
  if (!args.config_file.empty()) {
    std::ifstream f(args.config_file);
    if (!f)
      throw zeal::ArgumentError("cannot read config file " + args.config_file);
    json doc = json::parse(f, nullptr, true, true);
    cfg = doc.get<zeal::TrainConfig>();
  }
  // Flags win over the config file.
  if (cmd->count("--prompt")) cfg.mask.text_prompt = prompt;
  if (cmd->count("--backend")) cfg.backend = backend;
  if (cmd->count("--preset")) cfg.preset = preset;
  if (cmd->count("--variant")) cfg.variant = variant;
  if (cmd->count("--epochs")) cfg.epochs = epochs;
  if (cmd->count("--seed")) cfg.seed = seed;
  if (cmd->count("--freeze-extractor")) cfg.freeze_extractor = freeze;
  cfg.validate();
  return cfg;
}

zeal::FoldSpec folds_for(const fs::path& manifest_path,
                         const std::vector<zeal::VideoSample>& dataset) {
  std::set<std::string> ids;
  for (const auto& v : dataset) ids.insert(v.id);
  const zeal::DatasetManifest manifest = zeal::read_manifest(manifest_path);
  if (!manifest.fold_file.empty())
    return zeal::load_fold_spec(manifest.fold_file, ids);
  return zeal::make_rotation_folds({ids.begin(), ids.end()});
}

// Mask-cache precondition shared by train/eval: every video either has a
// valid cache entry or --compute-missing was passed.
void check_mask_cache(const std::vector<zeal::VideoSample>& dataset,
                      const fs::path& cache_dir, const zeal::TrainConfig& cfg,
                      zeal::SegmenterBackend& backend, bool compute_missing) {
  if (compute_missing) return;
  const zeal::MaskCacheKey key{cfg.mask.text_prompt, cfg.mask.box_threshold,
                               cfg.mask.iou_dedup, backend.identifier()};
  std::vector<std::string> missing;
  for (const auto& v : dataset) {
    if (!zeal::load_video_mask_cache(cache_dir / "masks", v.id, key,
                                     static_cast<int>(v.frames.size())))
      missing.push_back(v.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw zeal::DataError(
        "mask cache missing for " + std::to_string(missing.size()) +
        " video(s): " + list + " (run `zeal masks` or pass --compute-missing)");
  }
}

int cmd_masks(const CommonArgs& args, const std::string& prompt,
              const std::string& backend_name) {
  const fs::path cache_dir = resolve_cache_dir(args);
  const auto dataset = zeal::load_dataset(args.manifest);
  auto backend = zeal::make_backend(backend_name);
  zeal::MaskConfig mcfg;
  mcfg.text_prompt = prompt;

  int computed_count = 0;
  for (const auto& video : dataset) {
    bool computed = false;
    const auto masks =
        zeal::ensure_video_masks(cache_dir / "masks", video, mcfg, *backend,
                                 &computed);
    computed_count += computed ? 1 : 0;
    std::cout << video.id << ": frames=" << masks.size()
              << " mean_foreground=" << zeal::mean_foreground_ratio(masks)
              << (computed ? " (computed)" : " (cached)") << '\n';
  }
  std::cout << "masks: " << computed_count << " computed, "
            << dataset.size() - computed_count << " cached\n";

  const json effective{{"subcommand", "masks"},
                       {"manifest", args.manifest},
                       {"cache_dir", cache_dir.string()},
                       {"prompt", prompt},
                       {"backend", backend->identifier()},
                       {"workers", args.workers}};
  echo_config(args.out.empty() ? cache_dir : fs::path(args.out), effective);
  return 0;
}

int cmd_train(const CLI::App* cmd, const CommonArgs& args, int fold_index,
              const zeal::TrainConfig& cfg) {
  if (fold_index < 0 || fold_index >= zeal::kFoldCount)
    throw zeal::ArgumentError("fold index " + std::to_string(fold_index) +
                              " outside [0, " +
                              std::to_string(zeal::kFoldCount - 1) + "]");
  (void)cmd;
  const fs::path cache_dir = resolve_cache_dir(args);
  const auto dataset = zeal::load_dataset(args.manifest);
  const zeal::FoldSpec spec = folds_for(args.manifest, dataset);
  auto backend = zeal::make_backend(cfg.backend);
  check_mask_cache(dataset, cache_dir, cfg, *backend, args.compute_missing);

  const json effective{{"subcommand", "train"},
                       {"manifest", args.manifest},
                       {"cache_dir", cache_dir.string()},
                       {"out", args.out},
                       {"fold", fold_index},
                       {"compute_missing", args.compute_missing},
                       {"workers", args.workers},
                       {"config", json(cfg)},
                       {"config_hash", zeal::hex64(zeal::config_hash(cfg))}};
  echo_config(args.out, effective);

  zeal::TrainPaths paths{cache_dir, args.out};
  const zeal::TrainResult result = zeal::train_fold(
      dataset, spec.folds[static_cast<std::size_t>(fold_index)], cfg, paths,
      *backend);
  std::cout << "train: fold " << fold_index << " best_epoch "
            << result.best_epoch << " val_loss " << result.best_val_loss
            << " -> " << result.checkpoint_path.string() << '\n';
  return 0;
}

int cmd_eval(const CLI::App* cmd, const CommonArgs& args,
             const zeal::TrainConfig& cfg, bool oracle_head) {
  (void)cmd;
  const fs::path cache_dir = resolve_cache_dir(args);
  const auto dataset = zeal::load_dataset(args.manifest);
  const zeal::FoldSpec spec = folds_for(args.manifest, dataset);
  auto backend = zeal::make_backend(cfg.backend);
  if (!oracle_head)
    check_mask_cache(dataset, cache_dir, cfg, *backend, args.compute_missing);

  zeal::EvalOptions opts;
  opts.oracle_head = oracle_head;
  if (cfg.variant != "bilstm") opts.method_label = "ZEAL (" + cfg.variant + ")";

  const json effective{{"subcommand", "eval"},
                       {"manifest", args.manifest},
                       {"cache_dir", cache_dir.string()},
                       {"out", args.out},
                       {"oracle_head", oracle_head},
                       {"compute_missing", args.compute_missing},
                       {"workers", args.workers},
                       {"config", json(cfg)},
                       {"config_hash", zeal::hex64(zeal::config_hash(cfg))}};
  echo_config(args.out, effective);

  zeal::TrainPaths paths{cache_dir, args.out};
  const zeal::MetricsReport report =
      zeal::run_cross_validation(dataset, spec, cfg, paths, *backend, opts);
  zeal::write_report_files(args.out, report, opts.method_label);
  std::cout << "eval: average rho " << report.average_rho
            << " average r_l2_x100 " << report.average_r_l2_x100 << '\n';
  return 0;
}

int cmd_synth(std::uint64_t seed, int n, int frames, int size,
              const std::string& out_dir) {
  zeal::SyntheticSpec spec;
  spec.seed = seed;
  spec.n_videos = n;
  spec.frames_per_video = frames;
  spec.image_size = size;
  const fs::path manifest = zeal::write_synthetic_dataset(spec, out_dir);
  const json effective{{"subcommand", "synth"},
                       {"seed", seed},
                       {"n_videos", n},
                       {"frames_per_video", frames},
                       {"image_size", size},
                       {"out", out_dir}};
  echo_config(out_dir, effective);
  std::cout << "synth: wrote " << manifest.string() << '\n';
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& out_dir) {
  std::ifstream f(report_path);
  if (!f) throw zeal::DataError("cannot read report " + report_path);
  const json doc = json::parse(f);
  const zeal::MetricsReport report = zeal::report_from_json(doc);
  const std::string method = report.protocol.value("method", "ZEAL");
  zeal::write_report_files(out_dir, report, method);
  for (const auto& tm : report.tasks)
    std::cout << zeal::task_name(tm.task) << ": rho " << tm.mean_rho
              << " r_l2_x100 " << tm.mean_r_l2_x100 << '\n';
  std::cout << "average: rho " << report.average_rho << " r_l2_x100 "
            << report.average_r_l2_x100 << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeal: video-based surgical skill assessment"};
  app.require_subcommand(1);

  CommonArgs margs, targs, eargs;
  std::string prompt = "metallic tool";
  std::string mask_backend = "stub";

  CLI::App* masks = app.add_subcommand("masks", "Populate the tool-mask cache");
  masks->add_option("--manifest", margs.manifest, "Dataset manifest JSON")
      ->required();
  masks->add_option("--cache-dir", margs.cache_dir,
                    "Cache directory (default: $ZEAL_CACHE_DIR)");
  masks->add_option("--out", margs.out,
                    "Directory for the effective-config echo (default: cache dir)");
  masks->add_option("--prompt", prompt, "Detector text prompt")
      ->capture_default_str();
  masks->add_option("--backend", mask_backend, "Segmenter backend {stub,external}")
      ->capture_default_str();
  masks->add_option("--workers", margs.workers,
                    "Upper bound on parallel per-video work")
      ->check(CLI::PositiveNumber);

  std::string t_prompt = "metallic tool", t_backend = "stub";
  std::string t_preset = "nano", t_variant = "bilstm";
  int t_fold = 0, t_epochs = 200;
  std::uint64_t t_seed = 0;
  bool t_freeze = false;

  auto add_train_flags = [&](CLI::App* cmd, CommonArgs* args) {
    cmd->add_option("--manifest", args->manifest, "Dataset manifest JSON")
        ->required();
    cmd->add_option("--cache-dir", args->cache_dir,
                    "Cache directory (default: $ZEAL_CACHE_DIR)");
    cmd->add_option("--out", args->out, "Output directory")->required();
    cmd->add_option("--config", args->config_file, "JSON config file");
    cmd->add_option("--prompt", t_prompt, "Detector text prompt");
    cmd->add_option("--backend", t_backend, "Segmenter backend {stub,external}");
    cmd->add_option("--preset", t_preset, "Extractor preset {micro,nano}");
    cmd->add_option("--variant", t_variant,
                    "Temporal head {bilstm,temporal_pool_mlp}");
    cmd->add_option("--epochs", t_epochs, "Training epochs");
    cmd->add_option("--seed", t_seed, "Run seed");
    cmd->add_flag("--freeze-extractor", t_freeze,
                  "Train the head on fixed extractor features");
    cmd->add_flag("--compute-missing", args->compute_missing,
                  "Generate missing cache entries instead of failing");
    cmd->add_option("--workers", args->workers,
                    "Upper bound on parallel per-video work")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* train = app.add_subcommand("train", "Train one fold");
  add_train_flags(train, &targs);
  train->add_option("--fold", t_fold, "Fold index to train")
      ->capture_default_str();

  bool oracle_head = false;
  CLI::App* eval = app.add_subcommand("eval", "Run 4-fold cross-validation");
  add_train_flags(eval, &eargs);
  eval->add_flag("--oracle-head", oracle_head,
                 "Score test videos with ground truth (harness check)");

  std::uint64_t s_seed = 1;
  int s_n = 8, s_frames = 16, s_size = 64;
  std::string s_out;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--seed", s_seed, "Generator seed")->capture_default_str();
  synth->add_option("--n", s_n, "Video count (divisible by 4)")
      ->capture_default_str();
  synth->add_option("--frames", s_frames, "Frames per video")
      ->capture_default_str();
  synth->add_option("--size", s_size, "Frame side in pixels")
      ->capture_default_str();
  synth->add_option("--out", s_out, "Output directory")->required();

  std::string r_report, r_out;
  CLI::App* rep = app.add_subcommand("report", "Re-emit tables from report.json");
  rep->add_option("--report", r_report, "Path to report.json")->required();
  rep->add_option("--out", r_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(masks)) return cmd_masks(margs, prompt, mask_backend);
    if (app.got_subcommand(train)) {
      const zeal::TrainConfig cfg =
          config_from_args(train, targs, t_prompt, t_backend, t_preset,
                           t_variant, t_epochs, t_seed, t_freeze);
      return cmd_train(train, targs, t_fold, cfg);
    }
    if (app.got_subcommand(eval)) {
      const zeal::TrainConfig cfg =
          config_from_args(eval, eargs, t_prompt, t_backend, t_preset,
                           t_variant, t_epochs, t_seed, t_freeze);
      return cmd_eval(eval, eargs, cfg, oracle_head);
    }
    if (app.got_subcommand(synth))
      return cmd_synth(s_seed, s_n, s_frames, s_size, s_out);
    if (app.got_subcommand(rep)) return cmd_report(r_report, r_out);
  } catch (const zeal::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const zeal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
