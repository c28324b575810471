// SPDX-License-Identifier: Apache-2.0
#include "zeal/eval/cross_validation.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace zeal {

using nlohmann::json;

FoldAssignment filter_fold_for_task(const FoldAssignment& fold,
                                    const std::vector<VideoSample>& dataset,
                                    Task task) {
  std::set<std::string> keep;
  for (const VideoSample& v : dataset)
    if (v.task == task) keep.insert(v.id);
  auto filter = [&](const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids)
      if (keep.count(id)) out.push_back(id);
    return out;
  };
  FoldAssignment out;
  out.train = filter(fold.train);
  out.val = filter(fold.val);
  out.test = filter(fold.test);
  return out;
}

namespace {

constexpr std::array<Task, 4> kTaskOrder{Task::SU, Task::NP, Task::KT,
                                         Task::SYNTH};

std::vector<Task> present_tasks(const std::vector<VideoSample>& dataset) {
  std::set<Task> seen;
  for (const VideoSample& v : dataset) seen.insert(v.task);
  std::vector<Task> out;
  for (Task t : kTaskOrder)
    if (seen.count(t)) out.push_back(t);
  return out;
}

// Clean-pass predictions (GRS points) for a list of video ids.
std::vector<ScorePair> predict_set(const std::vector<std::string>& ids,
                                   const std::vector<VideoSample>& dataset,
                                   Model& model, const TrainConfig& cfg,
                                   const TrainPaths& paths,
                                   SegmenterBackend& backend) {
  std::unordered_map<std::string, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;

  FeatureCacheKey key;
  if (cfg.freeze_extractor) {
    key.preset = cfg.preset;
    key.weights_hash = model.net.weights_hash();
    key.mask_key = MaskCacheKey{cfg.mask.text_prompt, cfg.mask.box_threshold,
                                cfg.mask.iou_dedup, backend.identifier()};
    key.image_size = cfg.image_size;
    key.sample_count = cfg.sample_count;
    key.patch = cfg.patch;
    key.use_null_embedding = cfg.use_null_embedding;
  }

  std::vector<ScorePair> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError("predict_set: unknown video '" + id + "'");
    const VideoSample& video = *it->second;

    FeatureSequence feats;
    const auto feat_root = paths.cache_dir / "features";
    bool have = false;
    if (cfg.freeze_extractor) {
      if (auto cached = load_feature_cache(feat_root, id, key)) {
        feats = std::move(*cached);
        have = true;
      }
    }
    if (!have) {
      const auto masks = ensure_video_masks(paths.cache_dir / "masks", video,
                                            cfg.mask, backend);
      const PreparedVideo prep = prepare_video(video, masks, cfg);
      feats = extract_features(prep, model.net, cfg.patch);
      if (cfg.freeze_extractor) write_feature_cache(feat_root, feats, key);
    }
    const SkillScore score = model.head.score(feats, nullptr);
    out.push_back({id, static_cast<double>(video.grs), score.raw});
  }
  return out;
}

void append_fold_json(json& per_fold, const FoldMetrics& m) {
  json entry{{"fold", m.fold},
             {"rho", m.rho},
             {"r_l2_x100", m.r_l2_x100},
             {"best_epoch", m.best_epoch},
             {"val_loss", m.val_loss}};
  if (std::isfinite(m.train_rho))
    entry["train_rho"] = m.train_rho;
  else
    entry["train_rho"] = nullptr;
  per_fold.push_back(entry);
}

std::string format_metric(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

MetricsReport run_cross_validation(const std::vector<VideoSample>& dataset,
                                   const FoldSpec& spec, const TrainConfig& cfg,
                                   const TrainPaths& paths,
                                   SegmenterBackend& backend,
                                   const EvalOptions& opts) {
  cfg.validate();
  if (dataset.empty()) throw DataError("run_cross_validation: empty dataset");
  std::set<std::string> ids;
  for (const VideoSample& v : dataset) ids.insert(v.id);
  validate_fold_spec(spec, ids);

  std::unordered_map<std::string, const VideoSample*> by_id;
  for (const VideoSample& v : dataset) by_id[v.id] = &v;

  MetricsReport report;
  double rho_sum = 0.0, rl2_sum = 0.0;
  const std::vector<Task> tasks = present_tasks(dataset);

  for (Task task : tasks) {
    TaskMetrics tm;
    tm.task = task;
    double task_rho = 0.0, task_rl2 = 0.0;
    for (int f = 0; f < kFoldCount; ++f) {
      try {
        const FoldAssignment fold =
            filter_fold_for_task(spec.folds[static_cast<std::size_t>(f)],
                                 dataset, task);
        if (fold.test.empty())
          throw DataError("no test videos after task filtering");

        FoldMetrics fm;
        fm.fold = f;
        ScorePairSet test_set;
        test_set.task = task_name(task);
        test_set.fold = f;

        const auto fold_dir =
            paths.out_dir / task_name(task) / ("fold" + std::to_string(f));
        if (opts.oracle_head) {
          for (const auto& id : fold.test) {
            const double grs = static_cast<double>(by_id.at(id)->grs);
            test_set.pairs.push_back({id, grs, grs});
          }
          fm.train_rho = 1.0;
        } else {
          TrainPaths fold_paths{paths.cache_dir, fold_dir};
          const TrainResult tr =
              train_fold(dataset, fold, cfg, fold_paths, backend);
          LoadedCheckpoint best = load_checkpoint(tr.checkpoint_path);
          fm.best_epoch = best.epoch;
          fm.val_loss = best.val_loss;

          test_set.pairs = predict_set(fold.test, dataset, best.model, cfg,
                                       paths, backend);
          // Learnability diagnostic: training-set rank fit of the
          // end-of-schedule model.
          ScorePairSet train_set;
          train_set.task = test_set.task;
          train_set.fold = f;
          for (const auto& [id, pred] : tr.final_train_predictions)
            train_set.pairs.push_back({id, static_cast<double>(by_id.at(id)->grs),
                                       denormalize_score(pred)});
          try {
            fm.train_rho = spearman(train_set);
          } catch (const DataError&) {
            fm.train_rho = std::numeric_limits<double>::quiet_NaN();
          }
        }

        std::filesystem::create_directories(fold_dir);
        write_predictions_csv(fold_dir / "predictions.csv", test_set);
        fm.rho = spearman(test_set);
        fm.r_l2_x100 = 100.0 * r_l2(test_set);
        task_rho += fm.rho;
        task_rl2 += fm.r_l2_x100;
        tm.folds.push_back(fm);
      } catch (const Error& e) {
        throw PipelineError("cross-validation failed at task " +
                            task_name(task) + " fold " + std::to_string(f) +
                            ": " + e.what());
      }
    }
    tm.mean_rho = task_rho / kFoldCount;
    tm.mean_r_l2_x100 = task_rl2 / kFoldCount;
    rho_sum += tm.mean_rho;
    rl2_sum += tm.mean_r_l2_x100;
    report.tasks.push_back(tm);
  }

  report.average_rho = rho_sum / static_cast<double>(report.tasks.size());
  report.average_r_l2_x100 = rl2_sum / static_cast<double>(report.tasks.size());

  json task_counts = json::object();
  for (Task t : tasks) {
    int n = 0;
    for (const VideoSample& v : dataset)
      if (v.task == t) ++n;
    task_counts[task_name(t)] = n;
  }
  json fold_sizes = json::array();
  for (const FoldAssignment& fa : spec.folds)
    fold_sizes.push_back(json{{"train", fa.train.size()},
                              {"val", fa.val.size()},
                              {"test", fa.test.size()}});
  report.protocol = json{{"config", json(cfg)},
                         {"config_hash", hex64(config_hash(cfg))},
                         {"backend_id", backend.identifier()},
                         {"oracle_head", opts.oracle_head},
                         {"method", opts.method_label},
                         {"fold_count", kFoldCount},
                         {"task_counts", task_counts},
                         {"fold_sizes", fold_sizes}};
  return report;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  json per_task = json::object();
  for (const TaskMetrics& tm : report.tasks) {
    json per_fold = json::array();
    for (const FoldMetrics& fm : tm.folds) append_fold_json(per_fold, fm);
    per_task[task_name(tm.task)] =
        json{{"per_fold", per_fold},
             {"mean", json{{"rho", tm.mean_rho},
                           {"r_l2_x100", tm.mean_r_l2_x100}}}};
  }
  return json{{"protocol", report.protocol},
              {"per_task", per_task},
              {"average", json{{"rho", report.average_rho},
                               {"r_l2_x100", report.average_r_l2_x100}}}};
}

MetricsReport report_from_json(const nlohmann::json& doc) {
  MetricsReport report;
  if (!doc.contains("per_task") || !doc.contains("average"))
    throw DataError("report_from_json: missing per_task/average sections");
  report.protocol = doc.value("protocol", json::object());
  // Restore canonical task order; JSON objects iterate alphabetically.
  for (Task t : kTaskOrder) {
    const std::string name = task_name(t);
    if (!doc["per_task"].contains(name)) continue;
    const json& entry = doc["per_task"][name];
    TaskMetrics tm;
    tm.task = t;
    for (const json& f : entry.at("per_fold")) {
      FoldMetrics fm;
      fm.fold = f.at("fold").get<int>();
      fm.rho = f.at("rho").get<double>();
      fm.r_l2_x100 = f.at("r_l2_x100").get<double>();
      fm.best_epoch = f.value("best_epoch", -1);
      fm.val_loss = f.value("val_loss", 0.0);
      fm.train_rho = f.contains("train_rho") && f["train_rho"].is_number()
                         ? f["train_rho"].get<double>()
                         : std::numeric_limits<double>::quiet_NaN();
      tm.folds.push_back(fm);
    }
    tm.mean_rho = entry.at("mean").at("rho").get<double>();
    tm.mean_r_l2_x100 = entry.at("mean").at("r_l2_x100").get<double>();
    report.tasks.push_back(tm);
  }
  report.average_rho = doc.at("average").at("rho").get<double>();
  report.average_r_l2_x100 = doc.at("average").at("r_l2_x100").get<double>();
  return report;
}

void write_report_files(const std::filesystem::path& out_dir,
                        const MetricsReport& report,
                        const std::string& method_label) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json", std::ios::trunc);
    if (!out)
      throw DataError("write_report_files: cannot write " +
                      (out_dir / "report.json").string());
    out << report_to_json(report).dump(2) << '\n';
  }
  auto write_csv = [&](const std::filesystem::path& path, auto value_of,
                       double average) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("write_report_files: cannot write " + path.string());
    out << "Method";
    for (const TaskMetrics& tm : report.tasks) out << ',' << task_name(tm.task);
    out << ",Average\n" << method_label;
    for (const TaskMetrics& tm : report.tasks) out << ',' << format_metric(value_of(tm));
    out << ',' << format_metric(average) << '\n';
  };
  write_csv(out_dir / "metrics_rho.csv",
            [](const TaskMetrics& tm) { return tm.mean_rho; },
            report.average_rho);
  write_csv(out_dir / "metrics_rl2.csv",
            [](const TaskMetrics& tm) { return tm.mean_r_l2_x100; },
            report.average_r_l2_x100);
}

void write_predictions_csv(const std::filesystem::path& path,
                           const ScorePairSet& set) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("write_predictions_csv: cannot write " + path.string());
  out << "video_id,grs,prediction\n";
  out << std::setprecision(10);
  for (const ScorePair& p : set.pairs)
    out << p.video_id << ',' << p.grs << ',' << p.prediction << '\n';
}

}  // namespace zeal
