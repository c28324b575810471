// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace zeal {

// Squared error between a normalized prediction and a GRS target mapped to
// [0,1]; the single-sample form of the training objective.
double loss(double predicted_normalized, int target_grs);

struct LossResult {
  double value = 0.0;
  std::vector<double> dpred;  // d(value)/d(pred[i])
};

// Mean squared error over a batch of normalized predictions/targets.
LossResult mse_loss(const std::vector<double>& pred,
                    const std::vector<double>& target);

// Differentiable Spearman surrogate: soft ranks via pairwise sigmoids at
// temperature tau, loss = 1 - Pearson(soft_rank(pred), rank(target)).
// Falls back to MSE when the batch has fewer than two elements or either
// rank vector is constant (correlation undefined there).
LossResult soft_spearman_loss(const std::vector<double>& pred,
                              const std::vector<double>& target, double tau);

// Dispatch on the configured loss name ("mse" | "soft_spearman").
LossResult compute_loss(const std::string& kind,
                        const std::vector<double>& pred,
                        const std::vector<double>& target, double tau);

}  // namespace zeal
