// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "zeal/data/dataset.hpp"

namespace zeal {

struct ScorePair {
  std::string video_id;
  double grs = 0.0;        // ground truth, GRS points
  double prediction = 0.0; // model output, GRS points
};

// Predictions for one evaluation split, with the score range used to
// normalize the R-l2 distance.
struct ScorePairSet {
  std::string task;
  int fold = -1;
  std::vector<ScorePair> pairs;
  double s_max = kGrsMax;
  double s_min = kGrsMin;
};

// Fractional (1-based) ranks; tied values share the average of the positions
// they span.
std::vector<double> fractional_ranks(const std::vector<double>& values);

// Pearson correlation. Throws DataError on mismatched/short input or when
// either vector is constant (the correlation is undefined there).
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Spearman rank correlation: Pearson over fractional ranks.
double spearman(const std::vector<double>& a, const std::vector<double>& b);
double spearman(const ScorePairSet& set);

// Mean squared range-normalized error: (1/K) * sum(((s - s_hat)/(s_max -
// s_min))^2). Reported scaled by 100 elsewhere; this returns the raw mean.
double r_l2(const ScorePairSet& set);

}  // namespace zeal
