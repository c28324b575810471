// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: eleven release criteria, each printing one [PASS] line.
// Any failed check prints [FAIL] with its location and exits nonzero. The
// end-to-end criteria drive the real `zeal` binary (ZEAL_BIN) the same way a
// user would.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeal/data/synthetic.hpp"
#include "zeal/eval/cross_validation.hpp"
#include "zeal/mask/pipeline.hpp"
#include "zeal/nn/convnet.hpp"
#include "zeal/nn/head.hpp"
#include "zeal/nn/optim.hpp"
#include "zeal/rng.hpp"
#include "zeal/train/schedule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using zeal::Tensor;

namespace {

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                     \
  do {                                                                         \
    if (!(cond)) {                                                             \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg      \
                << "\n";                                                       \
      std::exit(1);                                                            \
    }                                                                          \
  } while (0)

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

bool bits_equal(double a, double b) {
  std::uint64_t ua, ub;
  std::memcpy(&ua, &a, 8);
  std::memcpy(&ub, &b, 8);
  return ua == ub;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("zeal_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- criterion 1+2 helpers: independent metric oracles ---------------------

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) less += 1.0;
      if (v[j] == v[i]) equal += 1.0;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double oracle_spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
  const std::vector<double> ra = oracle_ranks(a);
  const std::vector<double> rb = oracle_ranks(b);
  const double n = static_cast<double>(ra.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - ma;
    const double db = rb[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  return num / std::sqrt(va * vb);
}

void criterion_1_metric_oracles() {
  const double t0 = now_seconds();

  // All permutations of lengths 2-6 against two bases, exact agreement.
  for (int n = 2; n <= 6; ++n) {
    std::vector<double> identity(static_cast<std::size_t>(n));
    std::iota(identity.begin(), identity.end(), 1.0);
    std::vector<double> base{3.0, 1.0, 4.0, 2.0, 6.0, 5.0};
    base.resize(static_cast<std::size_t>(n));
    std::vector<double> perm = identity;
    do {
      REQUIRE(zeal::spearman(identity, perm) == oracle_spearman(identity, perm),
              "spearman vs oracle, permutation length " << n);
      REQUIRE(zeal::spearman(perm, base) == oracle_spearman(perm, base),
              "spearman vs oracle (shuffled base), length " << n);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  // 1,000 random real vectors of length <= 8, |delta| <= 1e-12.
  std::mt19937_64 gen(20260815);
  std::uniform_int_distribution<int> len(2, 8);
  std::uniform_real_distribution<double> real(-10.0, 10.0);
  std::uniform_int_distribution<int> coarse(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(len(gen));
    const bool ties = trial % 2 == 0;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ties ? static_cast<double>(coarse(gen)) : real(gen);
      b[i] = ties ? static_cast<double>(coarse(gen)) : real(gen);
    }
    if (std::count(a.begin(), a.end(), a[0]) == static_cast<long>(n)) a[0] += 1.0;
    if (std::count(b.begin(), b.end(), b[0]) == static_cast<long>(n)) b[0] += 1.0;
    REQUIRE(std::abs(zeal::spearman(a, b) - oracle_spearman(a, b)) <= 1e-12,
            "spearman vs oracle on random vectors, trial " << trial);
  }

  // r_l2 against direct long-double evaluation on 1,000 random sets.
  std::uniform_int_distribution<int> klen(1, 12);
  std::uniform_real_distribution<double> grs(6.0, 30.0);
  std::uniform_real_distribution<double> noise(-8.0, 8.0);
  for (int trial = 0; trial < 1000; ++trial) {
    zeal::ScorePairSet set;
    const int k = klen(gen);
    for (int i = 0; i < k; ++i) {
      const double g = grs(gen);
      set.pairs.push_back({"v" + std::to_string(i), g, g + noise(gen)});
    }
    const long double range =
        static_cast<long double>(set.s_max) - set.s_min;
    long double sum = 0.0L;
    for (const auto& p : set.pairs) {
      const long double e =
          std::abs(static_cast<long double>(p.grs) - p.prediction) / range;
      sum += e * e;
    }
    const double expected =
        static_cast<double>(sum / static_cast<long double>(set.pairs.size()));
    REQUIRE(std::abs(zeal::r_l2(set) - expected) <= 1e-12,
            "r_l2 vs direct formula, trial " << trial);
  }

  const double elapsed = now_seconds() - t0;
  REQUIRE(elapsed < 10.0, "metric oracle runtime " << elapsed << "s >= 10s");
  std::cout << "[PASS] criterion 1: metric oracle equivalence ("
            << elapsed << "s)\n";
}

void criterion_2_metric_spot_values() {
  REQUIRE(zeal::spearman({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 4.0, 3.0}) == 0.8,
          "spearman spot value is not exactly 0.8");

  zeal::ScorePairSet set;
  set.pairs = {{"a", 6.0, 12.0}, {"b", 30.0, 30.0}};
  REQUIRE(100.0 * zeal::r_l2(set) == 3.125,
          "r_l2 x100 spot value is not exactly 3.125");
  std::cout << "[PASS] criterion 2: metric spot values\n";
}

void criterion_3_patchify_exactness() {
  using zeal::BinaryMask;

  BinaryMask zero(64, 64);
  const zeal::PatchGrid g0 = zeal::patchify(zero, 32);
  REQUIRE(g0.rows == 2 && g0.cols == 2, "patchify grid shape");
  for (double v : g0.values) REQUIRE(v == 0.0, "all-zero mask ratio");

  BinaryMask one(64, 64);
  std::fill(one.grid.begin(), one.grid.end(), 1);
  for (double v : zeal::patchify(one, 32).values)
    REQUIRE(v == 1.0, "all-one mask ratio");

  BinaryMask single(32, 32);
  single.at(7, 12) = 1;
  const zeal::PatchGrid gs = zeal::patchify(single, 32);
  REQUIRE(gs.values.size() == 1, "single-patch grid size");
  REQUIRE(gs.values[0] == 1.0 / 1024.0, "single-pixel ratio 1/1024");
  REQUIRE(zeal::invert(gs).values[0] == 1023.0 / 1024.0,
          "inverted single-pixel ratio 1023/1024");

  BinaryMask checker(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) checker.at(y, x) = (x + y) % 2 == 0 ? 1 : 0;
  for (double v : zeal::patchify(checker, 32).values)
    REQUIRE(v == 0.5, "checkerboard ratio 0.5");

  // 1,000 random masks: grid + inverted grid = 1 elementwise, and the grid
  // mean preserves the global foreground ratio, both exactly.
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> coin(0, 99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int side = trial % 2 == 0 ? 64 : 96;
    BinaryMask m(side, side);
    const int density = 1 + coin(gen);
    long fg = 0;
    for (auto& px : m.grid) {
      px = coin(gen) < density ? 1 : 0;
      fg += px;
    }
    const zeal::PatchGrid g = zeal::patchify(m, 32);
    const zeal::PatchGrid inv = zeal::invert(g);
    for (std::size_t i = 0; i < g.values.size(); ++i)
      REQUIRE(g.values[i] + inv.values[i] == 1.0,
              "grid + inverted grid != 1 at cell " << i);
    const double mean = zeal::nn::exact_mean(g.values.data(), g.values.size());
    const double global =
        static_cast<double>(fg) / (static_cast<double>(side) * side);
    REQUIRE(bits_equal(mean, global),
            "grid mean " << mean << " != global ratio " << global);
  }
  std::cout << "[PASS] criterion 3: patchify exactness\n";
}

void criterion_4_mask_merge() {
  using zeal::Box;
  using zeal::BoxSet;

  // Identity on the first frame.
  BoxSet empty_prev;  // designated empty set, frame_index -1
  BoxSet first;
  first.frame_index = 0;
  first.boxes.push_back({2, 2, 8, 8, 0.9});
  const BoxSet m1 = zeal::merge_boxes(empty_prev, first, 0.5);
  REQUIRE(m1.size() == 1 && m1.boxes[0] == first.boxes[0],
          "merge(empty, {B}) != {B}");

  // Detector dropout bridged by the previous frame.
  BoxSet gap;
  gap.frame_index = 1;
  const BoxSet m2 = zeal::merge_boxes(m1, gap, 0.5);
  REQUIRE(m2.size() == 1 && m2.boxes[0] == first.boxes[0],
          "merge({B}, empty) != {B}");
  REQUIRE(m2.frame_index == 1, "merged frame index");

  // High-IoU previous box is replaced by the current one.
  BoxSet prev;
  prev.frame_index = 0;
  prev.boxes.push_back({0, 0, 10, 10, 0.7});
  BoxSet curr;
  curr.frame_index = 1;
  curr.boxes.push_back({1, 0, 10, 10, 0.9});  // IoU = 90/100 = 0.9
  REQUIRE(zeal::box_iou(prev.boxes[0], curr.boxes[0]) == 0.9,
          "fixture IoU is not 0.9");
  const BoxSet m3 = zeal::merge_boxes(prev, curr, 0.5);
  REQUIRE(m3.size() == 1 && m3.boxes[0] == curr.boxes[0],
          "merge with IoU 0.9 kept the previous box");

  // Scripted dropout: detections on frames {0,2,4} only; the carried merge
  // must keep the segmentation prompt nonempty on every frame.
  zeal::VideoSample video;
  video.id = "dropout";
  video.task = zeal::Task::SYNTH;
  video.grs = 12;
  for (int t = 0; t < 6; ++t) video.frames.emplace_back(24, 24, 3);
  std::map<int, std::vector<Box>> schedule;
  schedule[0] = {{2, 2, 10, 10, 0.9}};
  schedule[2] = {{4, 4, 12, 12, 0.9}};
  schedule[4] = {{6, 6, 14, 14, 0.9}};
  zeal::StubBackend backend = zeal::StubBackend::scripted(schedule);
  const auto masks = zeal::generate_video_masks(video, zeal::MaskConfig{},
                                                backend);
  REQUIRE(masks.size() == 6, "mask count");
  for (std::size_t t = 0; t < masks.size(); ++t) {
    long sum = 0;
    for (auto px : masks[t].grid) sum += px;
    REQUIRE(sum > 0, "frame " << t << " mask is empty despite carried boxes");
  }
  std::cout << "[PASS] criterion 4: mask merge behavior\n";
}

void criterion_5_masked_extractor_insensitivity() {
  const double t0 = now_seconds();
  zeal::MaskedConvNet net(zeal::ConvNetConfig::micro(), 9);

  zeal::ImageF img(64, 64, 3);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> pix(0.0, 1.0);
  for (auto& v : img.data) v = pix(gen);

  // Hard binary grid: live cells (0,0) and (1,1).
  zeal::PatchGrid grid(2, 2, 32, 64, 64);
  grid.at(0, 0) = 1.0;
  grid.at(1, 1) = 1.0;

  const Tensor base = zeal::extract(zeal::frame_to_tensor(img), grid, net,
                                    nullptr);

  // Scramble every pixel under the zero patches; the foreground vector must
  // be bitwise unchanged.
  zeal::ImageF tampered = img;
  std::uniform_real_distribution<double> repl(-10.0, 10.0);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const bool live = (y < 32 && x < 32) || (y >= 32 && x >= 32);
      if (live) continue;
      for (int c = 0; c < 3; ++c) tampered.at(y, x, c) = repl(gen);
    }
  }
  const Tensor scrambled = zeal::extract(zeal::frame_to_tensor(tampered), grid,
                                         net, nullptr);
  REQUIRE(base.shape == scrambled.shape, "feature shape changed");
  for (std::size_t i = 0; i < base.data.size(); ++i)
    REQUIRE(bits_equal(base.data[i], scrambled.data[i]),
            "zero-patch pixels leaked into feature slot " << i);

  // Control: touching one live-cell pixel must change the features.
  zeal::ImageF touched = img;
  touched.at(5, 5, 0) += 0.25;
  const Tensor moved = zeal::extract(zeal::frame_to_tensor(touched), grid, net,
                                     nullptr);
  bool differs = false;
  for (std::size_t i = 0; i < base.data.size(); ++i)
    differs = differs || !bits_equal(base.data[i], moved.data[i]);
  REQUIRE(differs, "live-cell perturbation had no effect (vacuous test)");

  const double elapsed = now_seconds() - t0;
  REQUIRE(elapsed < 30.0, "insensitivity runtime " << elapsed << "s >= 30s");
  std::cout << "[PASS] criterion 5: masked-extractor insensitivity ("
            << elapsed << "s)\n";
}

double central_diff(double* x, const std::function<double()>& f) {
  const double h = 1e-5;
  const double orig = *x;
  *x = orig + h;
  const double up = f();
  *x = orig - h;
  const double down = f();
  *x = orig;
  return (up - down) / (2.0 * h);
}

double rel_err(double analytic, double numeric) {
  const double denom = std::max({1e-8, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

void criterion_6_gradient_checks() {
  // Extractor: micro preset, random frame, mixed grid.
  {
    zeal::MaskedConvNet net(zeal::ConvNetConfig::micro(), 6);
    zeal::ImageF img(64, 64, 3);
    zeal::Rng rng(23);
    for (auto& v : img.data) v = rng.uniform(0.0, 1.0);
    const Tensor frame = zeal::frame_to_tensor(img);
    zeal::PatchGrid grid(2, 2, 32, 64, 64);
    grid.at(0, 0) = 1.0;
    grid.at(0, 1) = 0.5;
    grid.at(1, 0) = 0.25;
    grid.at(1, 1) = 0.75;

    Tensor probe({net.feature_dim()});
    zeal::Rng pr(14);
    for (auto& v : probe.data) v = pr.uniform(-1.0, 1.0);

    const std::function<double()> loss = [&]() {
      const Tensor f = zeal::extract(frame, grid, net, nullptr);
      double l = 0.0;
      for (std::size_t i = 0; i < f.data.size(); ++i)
        l += probe.data[i] * f.data[i];
      return l;
    };

    zeal::NetCache cache;
    zeal::extract(frame, grid, net, &cache);
    zeal::nn::ParamRefs params;
    net.params(params);
    zeal::nn::zero_grads(params);
    zeal::extract_backward(net, cache, probe);

    std::vector<std::pair<zeal::nn::Parameter*, std::size_t>> slots;
    for (zeal::nn::Parameter* p : params)
      for (std::size_t i = 0; i < p->value.data.size(); ++i)
        slots.push_back({p, i});
    zeal::Rng pick(101);
    for (int k = 0; k < 100; ++k) {
      auto [p, i] = slots[static_cast<std::size_t>(
          pick.uniform_int(0, static_cast<int>(slots.size()) - 1))];
      const double num = central_diff(&p->value.data[i], loss);
      const double ana = p->grad.data[i];
      if (std::abs(num) < 1e-10 && std::abs(ana) < 1e-10) continue;
      REQUIRE(rel_err(ana, num) <= 1e-4,
              "extractor grad slot " << k << ": analytic " << ana
                                     << " vs numeric " << num);
    }
  }

  // Head: h = 4, both streams random.
  {
    zeal::HeadConfig cfg;
    cfg.variant = zeal::HeadVariant::Bilstm;
    cfg.input_dim = 5;
    cfg.hidden = 4;
    zeal::TemporalHead head(cfg, 71);
    zeal::nn::ParamRefs params;
    head.params(params);
    zeal::Rng rng(72);
    for (zeal::nn::Parameter* p : params)
      for (auto& v : p->value.data) v = rng.uniform(-0.3, 0.3);

    zeal::FeatureSequence seq;
    seq.foreground = Tensor({6, 5});
    seq.background = Tensor({6, 5});
    for (auto& v : seq.foreground.data) v = rng.uniform(-1.0, 1.0);
    for (auto& v : seq.background.data) v = rng.uniform(-1.0, 1.0);

    const std::function<double()> loss = [&]() {
      return head.score(seq, nullptr).normalized;
    };

    zeal::HeadCache cache;
    head.score(seq, &cache);
    zeal::nn::zero_grads(params);
    head.backward(cache, 1.0, nullptr, nullptr);

    std::vector<std::pair<zeal::nn::Parameter*, std::size_t>> slots;
    for (zeal::nn::Parameter* p : params)
      for (std::size_t i = 0; i < p->value.data.size(); ++i)
        slots.push_back({p, i});
    zeal::Rng pick(73);
    for (int k = 0; k < 100; ++k) {
      auto [p, i] = slots[static_cast<std::size_t>(
          pick.uniform_int(0, static_cast<int>(slots.size()) - 1))];
      const double num = central_diff(&p->value.data[i], loss);
      const double ana = p->grad.data[i];
      if (std::abs(num) < 1e-10 && std::abs(ana) < 1e-10) continue;
      REQUIRE(rel_err(ana, num) <= 1e-4,
              "head grad slot " << k << ": analytic " << ana << " vs numeric "
                                << num);
    }
  }
  std::cout << "[PASS] criterion 6: gradient checks\n";
}

void criterion_7_schedule() {
  zeal::TrainConfig cfg;  // paper settings: 200 epochs, 20 warmup, 3e-5 peak
  const int spe = 2000;
  const std::int64_t boundary = static_cast<std::int64_t>(cfg.warmup_epochs) * spe;
  const std::int64_t total = static_cast<std::int64_t>(cfg.epochs) * spe;

  REQUIRE(zeal::lr_at(0, spe, cfg) == 0.0, "lr_at(0) != 0");
  REQUIRE(zeal::lr_at(boundary, spe, cfg) == 3e-5,
          "lr at the epoch-20 boundary != 3e-5");
  REQUIRE(zeal::lr_at(total, spe, cfg) <= 1e-12, "final lr > 1e-12");
  REQUIRE(std::abs(zeal::lr_at(boundary - 1, spe, cfg) - 3e-5) <= 1e-9,
          "warmup side of the boundary deviates by more than 1e-9");
  REQUIRE(std::abs(zeal::lr_at(boundary + 1, spe, cfg) - 3e-5) <= 1e-9,
          "cosine side of the boundary deviates by more than 1e-9");
  for (std::int64_t s = 0; s <= total; s += 997)
    REQUIRE(zeal::lr_at(s, spe, cfg) >= 0.0, "negative lr at step " << s);
  std::cout << "[PASS] criterion 7: learning-rate schedule\n";
}

void criterion_8_ablation_contract() {
  zeal::FeatureSequence seq;
  seq.foreground = Tensor({8, 6});
  seq.background = Tensor({8, 6});
  zeal::Rng rng(5);
  for (auto& v : seq.foreground.data) v = rng.uniform(-1.0, 1.0);
  for (auto& v : seq.background.data) v = rng.uniform(-1.0, 1.0);

  auto permute = [&](const zeal::FeatureSequence& s,
                     const std::vector<int>& order) {
    zeal::FeatureSequence out = s;
    for (std::size_t t = 0; t < order.size(); ++t)
      for (int j = 0; j < 6; ++j) {
        out.foreground.at2(static_cast<int>(t), j) = s.foreground.at2(order[t], j);
        out.background.at2(static_cast<int>(t), j) = s.background.at2(order[t], j);
      }
    return out;
  };

  zeal::HeadConfig mlp_cfg;
  mlp_cfg.variant = zeal::HeadVariant::TemporalPoolMlp;
  mlp_cfg.input_dim = 6;
  mlp_cfg.mlp_hidden = {8, 6};
  zeal::TemporalHead mlp(mlp_cfg, 3);
  const double mlp_base = mlp.score(seq, nullptr).normalized;

  zeal::HeadConfig lstm_cfg;
  lstm_cfg.variant = zeal::HeadVariant::Bilstm;
  lstm_cfg.input_dim = 6;
  lstm_cfg.hidden = 4;
  zeal::TemporalHead bilstm(lstm_cfg, 3);
  zeal::nn::ParamRefs lstm_params;
  bilstm.params(lstm_params);
  zeal::Rng wr(4);
  for (zeal::nn::Parameter* p : lstm_params)
    for (auto& v : p->value.data) v = wr.uniform(-0.5, 0.5);
  const double lstm_base = bilstm.score(seq, nullptr).normalized;

  std::vector<int> order(8);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffler(11);
  bool lstm_differs = false;
  for (int k = 0; k < 100; ++k) {
    std::shuffle(order.begin(), order.end(), shuffler);
    const zeal::FeatureSequence p = permute(seq, order);
    REQUIRE(bits_equal(mlp.score(p, nullptr).normalized, mlp_base),
            "temporal_pool_mlp score changed under permutation " << k);
    if (!bits_equal(bilstm.score(p, nullptr).normalized, lstm_base) &&
        order != std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7})
      lstm_differs = true;
  }
  REQUIRE(lstm_differs, "bilstm score ignored frame order on all permutations");
  std::cout << "[PASS] criterion 8: ablation contract\n";
}

// Shared by criteria 9-11: one full desk-scale pipeline (synth + eval).
struct DeskRun {
  fs::path dir;
  json report;
  double seconds = 0.0;
};

DeskRun desk_pipeline(const std::string& tag) {
  DeskRun run;
  run.dir = fresh_dir(tag);
  const fs::path data = run.dir / "data";
  const fs::path out = run.dir / "out";
  const fs::path cache = run.dir / "cache";

  const json desk_cfg{{"epochs", 30},
                      {"warmup_epochs", 0},
                      {"max_lr", 0.02},
                      {"batch_size", 1},
                      {"seed", 0},
                      {"sample_count", 16},
                      {"image_size", 64},
                      {"patch", 32},
                      {"preset", "micro"},
                      {"variant", "bilstm"},
                      {"hidden", 32},
                      {"freeze_extractor", true},
                      {"loss", "mse"}};
  const fs::path cfg_path = run.dir / "desk_config.json";
  {
    std::ofstream f(cfg_path);
    f << desk_cfg.dump(2) << '\n';
  }

  const double t0 = now_seconds();
  REQUIRE(run_command(std::string(ZEAL_BIN) +
                      " synth --seed 1 --n 8 --frames 16 --size 64 --out " +
                      data.string() + " >/dev/null") == 0,
          "zeal synth failed");
  REQUIRE(run_command(std::string(ZEAL_BIN) + " masks --manifest " +
                      (data / "manifest.json").string() + " --cache-dir " +
                      cache.string() + " >/dev/null") == 0,
          "zeal masks failed");
  REQUIRE(run_command(std::string(ZEAL_BIN) + " eval --manifest " +
                      (data / "manifest.json").string() + " --cache-dir " +
                      cache.string() + " --out " + out.string() + " --config " +
                      cfg_path.string() + " >/dev/null") == 0,
          "zeal eval failed");
  run.seconds = now_seconds() - t0;

  run.report = json::parse(slurp(out / "report.json"));
  return run;
}

void criterion_9_and_10_and_11() {
  // Criterion 9: end-to-end desk run (synthetic data, stub backend, micro
  // preset, frozen extractor, 30 epochs, full 4-fold eval).
  const DeskRun first = desk_pipeline("desk_a");
  REQUIRE(first.seconds < 600.0,
          "desk run took " << first.seconds << "s >= 600s");

  const json& folds = first.report.at("per_task").at("SYNTH").at("per_fold");
  REQUIRE(folds.size() == 4, "desk report fold count");
  int learnable = 0;
  for (const json& f : folds) {
    REQUIRE(f.at("train_rho").is_number(), "train_rho missing from report");
    if (f.at("train_rho").get<double>() >= 0.9) ++learnable;
  }
  REQUIRE(learnable >= 3, "training-set rho >= 0.9 on only "
                              << learnable << "/4 folds");
  std::cout << "[PASS] criterion 9: end-to-end desk run (" << first.seconds
            << "s, " << learnable << "/4 folds at train rho >= 0.9)\n";

  // Criterion 10: fold protocol and report arithmetic.
  {
    std::vector<std::string> ids;
    for (int i = 0; i < 8; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "synth_%03d", i);
      ids.push_back(buf);
    }
    const zeal::FoldSpec spec = zeal::make_rotation_folds(ids);
    std::map<std::string, int> tested;
    for (int f = 0; f < zeal::kFoldCount; ++f) {
      const zeal::FoldAssignment& fold = spec.folds[static_cast<std::size_t>(f)];
      REQUIRE(fold.train.size() == 4 && fold.val.size() == 2 &&
                  fold.test.size() == 2,
              "fold " << f << " is not a 2:1:1 split");
      std::set<std::string> all(fold.train.begin(), fold.train.end());
      all.insert(fold.val.begin(), fold.val.end());
      all.insert(fold.test.begin(), fold.test.end());
      REQUIRE(all.size() == 8, "fold " << f << " is not a partition");
      for (const std::string& id : fold.test) tested[id] += 1;
    }
    for (const std::string& id : ids)
      REQUIRE(tested[id] == 1, "id " << id << " tested " << tested[id]
                                     << " times");

    const json& mean = first.report.at("per_task").at("SYNTH").at("mean");
    double rho_sum = 0.0, rl2_sum = 0.0;
    for (const json& f : folds) {
      rho_sum += f.at("rho").get<double>();
      rl2_sum += f.at("r_l2_x100").get<double>();
    }
    REQUIRE(std::abs(mean.at("rho").get<double>() - rho_sum / 4.0) <= 1e-12,
            "per-task mean rho differs from the fold average");
    REQUIRE(std::abs(mean.at("r_l2_x100").get<double>() - rl2_sum / 4.0) <=
                1e-12,
            "per-task mean r_l2 differs from the fold average");
    REQUIRE(std::abs(first.report.at("average").at("rho").get<double>() -
                     mean.at("rho").get<double>()) <= 1e-12,
            "overall average rho differs from the task mean");
    std::cout << "[PASS] criterion 10: fold protocol and report arithmetic\n";
  }

  // Criterion 11: a second identical-seed pipeline reproduces the report
  // byte for byte.
  const DeskRun second = desk_pipeline("desk_b");
  REQUIRE(slurp(first.dir / "out" / "report.json") ==
              slurp(second.dir / "out" / "report.json"),
          "identical-seed desk runs produced different reports");
  REQUIRE(slurp(first.dir / "out" / "metrics_rho.csv") ==
              slurp(second.dir / "out" / "metrics_rho.csv"),
          "identical-seed desk runs produced different CSV tables");
  std::cout << "[PASS] criterion 11: reproducibility\n";
}

}  // namespace

int main() {
  now_seconds();  // anchor the clock
  criterion_1_metric_oracles();
  criterion_2_metric_spot_values();
  criterion_3_patchify_exactness();
  criterion_4_mask_merge();
  criterion_5_masked_extractor_insensitivity();
  criterion_6_gradient_checks();
  criterion_7_schedule();
  criterion_8_ablation_contract();
  criterion_9_and_10_and_11();
  std::cout << "acceptance: 11/11 criteria passed\n";
  return 0;
}
