// SPDX-License-Identifier: Apache-2.0
#include "zeal/train/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zeal/common.hpp"
#include "zeal/data/dataset.hpp"
#include "zeal/nn/head.hpp"

namespace zeal {

double loss(double predicted_normalized, int target_grs) {
  if (target_grs < kGrsMin || target_grs > kGrsMax) {
    throw ArgumentError("target GRS out of range [6, 30]");
  }
  const double d = predicted_normalized - normalize_grs(target_grs);
  return d * d;
}

LossResult mse_loss(const std::vector<double>& pred,
                    const std::vector<double>& target) {
  if (pred.empty() || pred.size() != target.size()) {
    throw ArgumentError("mse_loss: batch shape mismatch");
  }
  const double n = static_cast<double>(pred.size());
  LossResult r;
  r.dpred.assign(pred.size(), 0.0);
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.value += d * d / n;
    r.dpred[i] = 2.0 * d / n;
  }
  return r;
}

namespace {

std::vector<double> fractional_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    // 1-based positions i+1 .. j+1 share the average rank.
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LossResult soft_spearman_loss(const std::vector<double>& pred,
                              const std::vector<double>& target, double tau) {
  if (pred.empty() || pred.size() != target.size()) {
    throw ArgumentError("soft_spearman_loss: batch shape mismatch");
  }
  if (tau <= 0.0) throw ArgumentError("soft_spearman_loss: tau must be > 0");
  const size_t n = pred.size();
  if (n < 2) return mse_loss(pred, target);

  std::vector<double> b = fractional_ranks(target);

  // Soft ranks a_i = 1 + sum_{j != i} sigmoid((p_i - p_j) / tau).
  std::vector<double> a(n, 1.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      a[i] += sigmoid((pred[i] - pred[j]) / tau);
    }
  }

  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double u = 0.0, na2 = 0.0, nb2 = 0.0;
  std::vector<double> ac(n), bc(n);
  for (size_t i = 0; i < n; ++i) {
    ac[i] = a[i] - mean_a;
    bc[i] = b[i] - mean_b;
    u += ac[i] * bc[i];
    na2 += ac[i] * ac[i];
    nb2 += bc[i] * bc[i];
  }
  if (na2 <= 0.0 || nb2 <= 0.0) return mse_loss(pred, target);

  const double den = std::sqrt(na2 * nb2);
  const double r = u / den;

  // dr/da through the centering projection.
  std::vector<double> g(n);
  double mean_g = 0.0;
  for (size_t i = 0; i < n; ++i) {
    g[i] = (bc[i] - (u / na2) * ac[i]) / den;
    mean_g += g[i];
  }
  mean_g /= n;
  std::vector<double> dl_da(n);
  for (size_t i = 0; i < n; ++i) dl_da[i] = -(g[i] - mean_g);

  LossResult out;
  out.value = 1.0 - r;
  out.dpred.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s = sigmoid((pred[i] - pred[j]) / tau);
      const double ds = s * (1.0 - s) / tau;
      out.dpred[i] += dl_da[i] * ds;
      out.dpred[j] -= dl_da[i] * ds;
    }
  }
  return out;
}

LossResult compute_loss(const std::string& kind,
                        const std::vector<double>& pred,
                        const std::vector<double>& target, double tau) {
  if (kind == "mse") return mse_loss(pred, target);
  if (kind == "soft_spearman") return soft_spearman_loss(pred, target, tau);
  throw ArgumentError("unknown loss '" + kind + "'");
}

}  // namespace zeal
