// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeal/eval/metrics.hpp"
#include "zeal/train/trainer.hpp"

namespace zeal {

struct FoldMetrics {
  int fold = -1;
  double rho = 0.0;
  double r_l2_x100 = 0.0;
  // Diagnostics from the trained fold; train_rho is NaN when undefined.
  double train_rho = 0.0;
  int best_epoch = -1;
  double val_loss = 0.0;
};

struct TaskMetrics {
  Task task = Task::SYNTH;
  std::vector<FoldMetrics> folds;
  double mean_rho = 0.0;
  double mean_r_l2_x100 = 0.0;
};

// Cross-validation outcome: per-fold metrics averaged per task, then across
// tasks. `protocol` echoes everything needed to reproduce the run (config,
// fold layout, backend) and nothing environment-specific.
struct MetricsReport {
  std::vector<TaskMetrics> tasks;
  double average_rho = 0.0;
  double average_r_l2_x100 = 0.0;
  nlohmann::json protocol;
};

struct EvalOptions {
  // Bypass training and score each test video with its ground-truth GRS;
  // exercises the full harness with known-perfect metrics.
  bool oracle_head = false;
  std::string method_label = "ZEAL";
};

// Restrict a fold assignment to one task's videos.
FoldAssignment filter_fold_for_task(const FoldAssignment& fold,
                                    const std::vector<VideoSample>& dataset,
                                    Task task);

// Leave-one-fold-out evaluation per task: trains kFoldCount models per task
// (unless oracle_head), dumps per-fold predictions under paths.out_dir, and
// aggregates Spearman rho and 100 * R-l2.
MetricsReport run_cross_validation(const std::vector<VideoSample>& dataset,
                                   const FoldSpec& spec, const TrainConfig& cfg,
                                   const TrainPaths& paths,
                                   SegmenterBackend& backend,
                                   const EvalOptions& opts);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);

// report.json plus metrics_rho.csv / metrics_rl2.csv (rows: method label,
// one column per present task in SU, NP, KT, SYNTH order, then Average).
void write_report_files(const std::filesystem::path& out_dir,
                        const MetricsReport& report,
                        const std::string& method_label);

void write_predictions_csv(const std::filesystem::path& path,
                           const ScorePairSet& set);

}  // namespace zeal
