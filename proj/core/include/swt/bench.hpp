// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swt/engine.hpp"

namespace swt {

enum class ReportFormat { csv, json };

ReportFormat parse_format(std::string_view name);

struct BenchConfig {
  std::int64_t batch_size = 8;
  std::int64_t max_frames = 64;   // T
  std::int64_t max_labels = 16;   // U
  std::int64_t joint_dim = 128;   // H
  std::int64_t acoustic_dim = 128;
  std::int64_t label_dim = 128;
  std::int64_t vocab = 256;
  EngineMode mode = EngineMode::batched;
  int warmup_steps = 3;
  int bench_steps = 100;
  std::uint64_t seed = 1;
  Precision precision = Precision::f32;
  std::int64_t mem_budget_bytes = 1'000'000'000;
  std::int64_t alloc_ceiling_bytes = 0;  // 0 disables the OOM simulation
  int max_parallel = 16;
  int worker_count = 1;
  bool literal_pi_extents = false;
  ReportFormat output_format = ReportFormat::csv;

  EngineConfig engine_config() const {
    return EngineConfig{mode, mem_budget_bytes, max_parallel, worker_count,
                        literal_pi_extents};
  }
};

/// Raises InvalidInputError on out-of-range fields (CLI maps that to a
/// usage error).
void validate(const BenchConfig& cfg);

struct BenchResult {
  BenchConfig config;  // echo of the requested point
  double median_step_seconds = 0;
  std::vector<double> per_step_seconds;
  std::int64_t peak_bytes = 0;
  std::int64_t live_bytes_after = 0;
  std::string status = "ok";  // "ok" | "oom"
  double loss_checksum = 0;   // step loss L (identical across steps)
  std::int64_t oom_bytes = 0;       // failing allocation size on oom
  std::string oom_tensor;           // failing allocation name on oom
};

/// True acoustic/label lengths under the benchmark padding ramps: sample 1
/// is unpadded; padding grows linearly to 9.3% (acoustic) and 45.8%
/// (labels) at the last sample. Rounding is half away from zero with a
/// floor of 1.
struct SampleLengths {
  std::vector<std::int64_t> t_len;
  std::vector<std::int64_t> u_len;
};
SampleLengths padded_lengths(std::int64_t batch_size, std::int64_t max_frames,
                             std::int64_t max_labels);

template <typename T>
struct BenchInputs {
  Batch<T> batch;
  JointParams<T> jp;
  OutputParams<T> op;
};

/// Seeded synthesis of encodings, parameters (uniform [-0.1, 0.1]) and
/// labels (uniform in [1, vocab)). Padded regions are zero. Identical
/// configs yield bitwise-identical tensors.
template <typename T>
BenchInputs<T> synth_inputs(const BenchConfig& cfg);

/// Builds inputs once, runs warmup then timed steps, reports the median
/// step time and the max per-step tracker peak. A ceiling hit anywhere in
/// the run yields status "oom" with the failing allocation recorded.
BenchResult run_benchmark(const BenchConfig& cfg);

enum class SweepAxis { batch_size, lengths };

SweepAxis parse_axis(std::string_view name);

/// One requested sweep point. For the batch-size axis only `batch` is set;
/// for the lengths axis `frames`/`labels` hold the resolved T and U.
struct SweepPoint {
  std::int64_t batch = 0;
  std::int64_t frames = 0;
  std::int64_t labels = 0;
};

/// Parses a comma list of sweep values. Batch-size values are integers.
/// Lengths values are either explicit "TxU" pairs or bare T values whose U
/// is scaled proportionally from the base config. Values must ascend.
std::vector<SweepPoint> parse_sweep_values(const BenchConfig& base,
                                           SweepAxis axis,
                                           const std::string& values);

std::vector<BenchResult> sweep(const BenchConfig& base, SweepAxis axis,
                               const std::vector<SweepPoint>& points);

/// Serializes results (CSV columns:
/// mode,B,T,U,H,H_A,H_L,V,precision,median_step_seconds,peak_bytes,status,seed;
/// JSON mirrors the field names and appends loss_checksum).
std::string emit_report(const std::vector<BenchResult>& results,
                        ReportFormat format);

/// Inverse of emit_report for JSON (round-trip checks, downstream tooling).
std::vector<BenchResult> parse_report_json(const std::string& text);

void write_report_file(const std::vector<BenchResult>& results,
                       ReportFormat format, const std::string& path);

}  // namespace swt
