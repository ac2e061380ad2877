// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "swt/bench.hpp"
#include "swt/engine.hpp"
#include "swt/loss.hpp"
#include "swt/rng.hpp"

namespace {

using namespace swt;

BenchConfig desk_config(std::int64_t batch) {
  BenchConfig cfg;
  cfg.batch_size = batch;
  cfg.max_frames = 64;
  cfg.max_labels = 16;
  cfg.joint_dim = 128;
  cfg.acoustic_dim = 128;
  cfg.label_dim = 128;
  cfg.vocab = 256;
  cfg.seed = 1;
  return cfg;
}

void BM_JointForward(benchmark::State& state) {
  BenchInputs<float> in = synth_inputs<float>(desk_config(1));
  const SampleEncodings<float> enc{sample_matrix(in.batch.acoustic, 0),
                                   sample_matrix(in.batch.label, 0)};
  for (auto _ : state) {
    Tensor<float> joint = joint_forward(enc, in.jp);
    benchmark::DoNotOptimize(joint.data());
  }
}
BENCHMARK(BM_JointForward);

void BM_OutputForward(benchmark::State& state) {
  BenchInputs<float> in = synth_inputs<float>(desk_config(1));
  const SampleEncodings<float> enc{sample_matrix(in.batch.acoustic, 0),
                                   sample_matrix(in.batch.label, 0)};
  Tensor<float> joint = joint_forward(enc, in.jp);
  for (auto _ : state) {
    Tensor<float> scores = output_forward(joint, in.op);
    benchmark::DoNotOptimize(scores.data());
  }
}
BENCHMARK(BM_OutputForward);

void BM_TransducerLoss(benchmark::State& state) {
  BenchInputs<float> in = synth_inputs<float>(desk_config(1));
  const SampleEncodings<float> enc{sample_matrix(in.batch.acoustic, 0),
                                   sample_matrix(in.batch.label, 0)};
  Tensor<float> joint = joint_forward(enc, in.jp);
  Tensor<float> scores = output_forward(joint, in.op);
  std::vector<std::int32_t> y(in.batch.sample_labels(0).begin(),
                              in.batch.sample_labels(0).end());
  const LabelSequence labels(y);
  for (auto _ : state) {
    LossResult<float> result = transducer_loss_sample(scores, labels);
    benchmark::DoNotOptimize(result.dscores.data());
  }
}
BENCHMARK(BM_TransducerLoss);

void BM_EngineStep(benchmark::State& state) {
  const auto mode = EngineMode(state.range(0));
  BenchInputs<float> in = synth_inputs<float>(desk_config(state.range(1)));
  EngineConfig cfg;
  cfg.mode = mode;
  cfg.worker_count = mode == EngineMode::sample_wise_pr_dp ? 4 : 1;
  for (auto _ : state) {
    StepResult<float> r = run_step(in.batch, in.jp, in.op, cfg);
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetLabel(mode_name(mode));
}
BENCHMARK(BM_EngineStep)
    ->ArgsProduct({{int(EngineMode::batched), int(EngineMode::sample_wise),
                    int(EngineMode::sample_wise_pr),
                    int(EngineMode::sample_wise_pr_dp)},
                   {1, 8}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
