// SPDX-License-Identifier: Apache-2.0
#include "zeal/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zeal/common.hpp"

namespace zeal {

std::vector<double> fractional_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of 1-based ranks i+1..j+1.
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DataError("pearson: size mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  const std::size_t n = a.size();
  if (n < 2) throw DataError("pearson: needs at least two pairs");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    num += da * db;
    na2 += da * da;
    nb2 += db * db;
  }
  if (na2 == 0.0 || nb2 == 0.0)
    throw DataError("pearson: undefined correlation for constant input");
  return num / std::sqrt(na2 * nb2);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DataError("spearman: size mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) throw DataError("spearman: needs at least two pairs");
  return pearson(fractional_ranks(a), fractional_ranks(b));
}

double spearman(const ScorePairSet& set) {
  std::vector<double> truth, pred;
  truth.reserve(set.pairs.size());
  pred.reserve(set.pairs.size());
  for (const ScorePair& p : set.pairs) {
    truth.push_back(p.grs);
    pred.push_back(p.prediction);
  }
  return spearman(truth, pred);
}

double r_l2(const ScorePairSet& set) {
  if (set.s_max <= set.s_min)
    throw ArgumentError("r_l2: s_max must exceed s_min");
  if (set.pairs.empty()) throw DataError("r_l2: empty pair set");
  const double range = set.s_max - set.s_min;
  double sum = 0.0;
  for (const ScorePair& p : set.pairs) {
    const double e = std::abs(p.grs - p.prediction) / range;
    sum += e * e;
  }
  return sum / static_cast<double>(set.pairs.size());
}

}  // namespace zeal
