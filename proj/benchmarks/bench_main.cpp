/*
 * Copyright 2025 The boxtask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "boxtask/box.hpp"
#include "boxtask/data.hpp"
#include "boxtask/objective.hpp"
#include "boxtask/rng.hpp"
#include "boxtask/trainer.hpp"

namespace {

using namespace boxtask;

std::vector<Box> random_boxes(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Box> boxes;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd m(k), s(k);
    for (int d = 0; d < k; ++d) {
      m[d] = rng.uniform(-2, 2);
      s[d] = rng.uniform(0.2, 2.0);
    }
    boxes.emplace_back(std::move(m), std::move(s));
  }
  return boxes;
}

void BM_HardOverlap(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto boxes = random_boxes(64, k, 1);
  Temperatures temps;
  std::size_t i = 0;
  for (auto _ : state) {
    const Box& a = boxes[i % boxes.size()];
    const Box& b = boxes[(i * 31 + 7) % boxes.size()];
    benchmark::DoNotOptimize(overlap_fraction(a, b, temps, OverlapMode::kHard));
    ++i;
  }
}
BENCHMARK(BM_HardOverlap)->Arg(2)->Arg(5);

void BM_SmoothOverlapWithGrad(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto boxes = random_boxes(64, k, 2);
  Temperatures temps;
  OverlapGrad grad;
  std::size_t i = 0;
  for (auto _ : state) {
    const Box& a = boxes[i % boxes.size()];
    const Box& b = boxes[(i * 31 + 7) % boxes.size()];
    benchmark::DoNotOptimize(smooth_overlap_fraction(a, b, temps, &grad));
    ++i;
  }
}
BENCHMARK(BM_SmoothOverlapWithGrad)->Arg(2)->Arg(5);

struct LossFixture {
  MapperParams params;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<PairExample> pairs;
  LossWeights weights;
  Temperatures temps;
};

LossFixture make_loss_fixture(int n_tasks, int n_pairs) {
  Rng rng(3);
  MapperConfig cfg;
  cfg.input_dim = 16;
  cfg.hidden = 64;
  cfg.box_dim = 2;
  LossFixture f{init_params(cfg, 3), {}, {}, {}, {}};
  for (int t = 0; t < n_tasks; ++t) {
    Eigen::VectorXd x(16);
    for (int d = 0; d < 16; ++d) x[d] = rng.uniform(-1, 1);
    f.inputs.push_back(std::move(x));
  }
  for (int p = 0; p < n_pairs; ++p) {
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_tasks)));
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_tasks)));
    if (i == j) j = (j + 1) % n_tasks;
    f.pairs.push_back(PairExample{i, j, rng.uniform() < 0.1 ? 1.0 : 0.0});
  }
  return f;
}

void BM_TotalLossWithGrad(benchmark::State& state) {
  LossFixture f = make_loss_fixture(40, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        total_loss(f.params, f.inputs, f.pairs, f.weights, f.temps));
  }
}
BENCHMARK(BM_TotalLossWithGrad)->Arg(64)->Arg(256)->Arg(1024);

void BM_TrainEpoch(benchmark::State& state) {
  TaxonomyParams params;
  params.dim = 16;
  params.noise = 0.1;
  const SyntheticTaxonomy fixture = generate_synthetic_taxonomy(params);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.patience = 1;
  cfg.hidden = 32;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(fixture.tasks, fixture.relations, cfg));
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
