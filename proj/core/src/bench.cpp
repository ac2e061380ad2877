// SPDX-License-Identifier: Apache-2.0

#include "swt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "swt/rng.hpp"

namespace swt {

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw InvalidInputError("unknown report format '" + std::string(name) + "'");
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "batch-size" || name == "batch_size") return SweepAxis::batch_size;
  if (name == "lengths") return SweepAxis::lengths;
  throw InvalidInputError("unknown sweep axis '" + std::string(name) + "'");
}

void validate(const BenchConfig& cfg) {
  if (cfg.batch_size < 1 || cfg.max_frames < 1 || cfg.max_labels < 1 ||
      cfg.joint_dim < 1 || cfg.acoustic_dim < 1 || cfg.label_dim < 1) {
    throw InvalidInputError("all benchmark dimensions must be >= 1");
  }
  if (cfg.vocab < 2) {
    throw InvalidInputError("vocabulary must hold blank plus one label");
  }
  if (cfg.warmup_steps < 0 || cfg.bench_steps < 1) {
    throw InvalidInputError("need warmup >= 0 and steps >= 1");
  }
  if (cfg.mem_budget_bytes <= 0 || cfg.alloc_ceiling_bytes < 0) {
    throw InvalidInputError("memory budget/ceiling out of range");
  }
  if (cfg.worker_count < 1) {
    throw InvalidInputError("worker count must be >= 1");
  }
}

SampleLengths padded_lengths(std::int64_t batch_size, std::int64_t max_frames,
                             std::int64_t max_labels) {
  SampleLengths out;
  out.t_len.resize(size_t(batch_size));
  out.u_len.resize(size_t(batch_size));
  for (std::int64_t b = 0; b < batch_size; ++b) {
    const double ramp =
        batch_size == 1 ? 0.0 : double(b) / double(batch_size - 1);
    const double frac_acoustic = 0.093 * ramp;
    const double frac_label = 0.458 * ramp;
    out.t_len[size_t(b)] = std::max<std::int64_t>(
        1, std::llround(double(max_frames) * (1.0 - frac_acoustic)));
    out.u_len[size_t(b)] = std::max<std::int64_t>(
        1, std::llround(double(max_labels) * (1.0 - frac_label)));
  }
  return out;
}

template <typename T>
BenchInputs<T> synth_inputs(const BenchConfig& cfg) {
  validate(cfg);
  const std::int64_t n = cfg.batch_size, frames = cfg.max_frames;
  const std::int64_t rows = cfg.max_labels + 1;
  SampleLengths lengths = padded_lengths(n, frames, cfg.max_labels);

  Rng rng(cfg.seed);
  BenchInputs<T> in;
  in.batch.t_len = std::move(lengths.t_len);
  in.batch.u_len = std::move(lengths.u_len);

  in.batch.acoustic =
      Tensor<T>::zeros({n, frames, cfg.acoustic_dim}, "h_acoustic");
  rng.fill_uniform(in.batch.acoustic, -0.1, 0.1);
  for (std::int64_t b = 0; b < n; ++b) {
    T* base = in.batch.acoustic.data() + b * frames * cfg.acoustic_dim;
    std::fill(base + in.batch.t_len[size_t(b)] * cfg.acoustic_dim,
              base + frames * cfg.acoustic_dim, T(0));
  }

  in.batch.label = Tensor<T>::zeros({n, rows, cfg.label_dim}, "h_label");
  rng.fill_uniform(in.batch.label, -0.1, 0.1);
  for (std::int64_t b = 0; b < n; ++b) {
    T* base = in.batch.label.data() + b * rows * cfg.label_dim;
    std::fill(base + (in.batch.u_len[size_t(b)] + 1) * cfg.label_dim,
              base + rows * cfg.label_dim, T(0));
  }

  in.jp.w_acoustic =
      Tensor<T>::zeros({cfg.joint_dim, cfg.acoustic_dim}, "w_acoustic");
  rng.fill_uniform(in.jp.w_acoustic, -0.1, 0.1);
  in.jp.w_label = Tensor<T>::zeros({cfg.joint_dim, cfg.label_dim}, "w_label");
  rng.fill_uniform(in.jp.w_label, -0.1, 0.1);
  in.jp.bias = Tensor<T>::zeros({cfg.joint_dim}, "bias_joint");
  rng.fill_uniform(in.jp.bias, -0.1, 0.1);
  in.op.w_out = Tensor<T>::zeros({cfg.vocab, cfg.joint_dim}, "w_out");
  rng.fill_uniform(in.op.w_out, -0.1, 0.1);
  in.op.bias_out = Tensor<T>::zeros({cfg.vocab}, "bias_out");
  rng.fill_uniform(in.op.bias_out, -0.1, 0.1);

  in.batch.labels.assign(size_t(n * cfg.max_labels), 0);
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t i = 0; i < in.batch.u_len[size_t(b)]; ++i) {
      in.batch.labels[size_t(b * cfg.max_labels + i)] =
          std::int32_t(rng.uniform_int(1, cfg.vocab));
    }
  }
  return in;
}

template BenchInputs<float> synth_inputs<float>(const BenchConfig&);
template BenchInputs<double> synth_inputs<double>(const BenchConfig&);

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <typename T>
BenchResult run_benchmark_typed(const BenchConfig& cfg) {
  BenchResult result;
  result.config = cfg;
  auto& tracker = AllocationTracker::instance();
  CeilingGuard ceiling(cfg.alloc_ceiling_bytes);
  try {
    BenchInputs<T> in = synth_inputs<T>(cfg);
    const EngineConfig engine_cfg = cfg.engine_config();
    for (int i = 0; i < cfg.warmup_steps; ++i) {
      run_step(in.batch, in.jp, in.op, engine_cfg);
    }
    for (int i = 0; i < cfg.bench_steps; ++i) {
      tracker.reset_peak();
      const auto start = std::chrono::steady_clock::now();
      StepResult<T> step = run_step(in.batch, in.jp, in.op, engine_cfg);
      const auto stop = std::chrono::steady_clock::now();
      result.per_step_seconds.push_back(
          std::chrono::duration<double>(stop - start).count());
      result.peak_bytes = std::max(result.peak_bytes, tracker.peak_bytes());
      if (i == 0) result.loss_checksum = double(step.loss);
    }
    result.median_step_seconds = median(result.per_step_seconds);
    result.live_bytes_after = tracker.live_bytes();
  } catch (const OutOfMemoryError& oom) {
    result.status = "oom";
    result.oom_bytes = oom.request_bytes();
    result.oom_tensor = oom.tensor();
    result.peak_bytes = tracker.peak_bytes();
    result.live_bytes_after = tracker.live_bytes();
    result.median_step_seconds = 0.0;
  }
  return result;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg) {
  return cfg.precision == Precision::f32 ? run_benchmark_typed<float>(cfg)
                                         : run_benchmark_typed<double>(cfg);
}

std::vector<SweepPoint> parse_sweep_values(const BenchConfig& base,
                                           SweepAxis axis,
                                           const std::string& values) {
  std::vector<SweepPoint> points;
  size_t pos = 0;
  while (pos <= values.size()) {
    size_t comma = values.find(',', pos);
    if (comma == std::string::npos) comma = values.size();
    const std::string item = values.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    SweepPoint p;
    try {
      if (axis == SweepAxis::batch_size) {
        p.batch = std::stoll(item);
        p.frames = base.max_frames;
        p.labels = base.max_labels;
      } else {
        p.batch = base.batch_size;
        const size_t x = item.find('x');
        if (x != std::string::npos) {
          p.frames = std::stoll(item.substr(0, x));
          p.labels = std::stoll(item.substr(x + 1));
        } else {
          // Bare T: scale U by the same factor as T.
          p.frames = std::stoll(item);
          p.labels = std::max<std::int64_t>(
              1, std::llround(double(base.max_labels) * double(p.frames) /
                              double(base.max_frames)));
        }
      }
    } catch (const std::exception&) {
      throw InvalidInputError("cannot parse sweep value '" + item + "'");
    }
    if (p.batch < 1 || p.frames < 1 || p.labels < 1) {
      throw InvalidInputError("sweep value '" + item + "' out of range");
    }
    points.push_back(p);
  }
  if (points.empty()) {
    throw InvalidInputError("sweep needs at least one value");
  }
  for (size_t i = 1; i < points.size(); ++i) {
    const bool ascending = axis == SweepAxis::batch_size
                               ? points[i].batch > points[i - 1].batch
                               : points[i].frames > points[i - 1].frames;
    if (!ascending) {
      throw InvalidInputError("sweep values must ascend");
    }
  }
  return points;
}

std::vector<BenchResult> sweep(const BenchConfig& base, SweepAxis axis,
                               const std::vector<SweepPoint>& points) {
  std::vector<BenchResult> results;
  results.reserve(points.size());
  for (const SweepPoint& p : points) {
    BenchConfig cfg = base;
    if (axis == SweepAxis::batch_size) {
      cfg.batch_size = p.batch;
    } else {
      cfg.max_frames = p.frames;
      cfg.max_labels = p.labels;
    }
    results.push_back(run_benchmark(cfg));
  }
  return results;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::ordered_json result_to_json(const BenchResult& r) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(r.config.mode);
  j["B"] = r.config.batch_size;
  j["T"] = r.config.max_frames;
  j["U"] = r.config.max_labels;
  j["H"] = r.config.joint_dim;
  j["H_A"] = r.config.acoustic_dim;
  j["H_L"] = r.config.label_dim;
  j["V"] = r.config.vocab;
  j["precision"] = precision_name(r.config.precision);
  j["median_step_seconds"] = r.median_step_seconds;
  j["peak_bytes"] = r.peak_bytes;
  j["status"] = r.status;
  j["seed"] = r.config.seed;
  j["loss_checksum"] = r.loss_checksum;
  return j;
}

}  // namespace

std::string emit_report(const std::vector<BenchResult>& results,
                        ReportFormat format) {
  if (results.empty()) {
    throw InvalidInputError("refusing to emit an empty report");
  }
  if (format == ReportFormat::csv) {
    std::string out =
        "mode,B,T,U,H,H_A,H_L,V,precision,median_step_seconds,peak_bytes,"
        "status,seed\n";
    for (const BenchResult& r : results) {
      const BenchConfig& c = r.config;
      out += std::string(mode_name(c.mode)) + "," +
             std::to_string(c.batch_size) + "," +
             std::to_string(c.max_frames) + "," +
             std::to_string(c.max_labels) + "," +
             std::to_string(c.joint_dim) + "," +
             std::to_string(c.acoustic_dim) + "," +
             std::to_string(c.label_dim) + "," + std::to_string(c.vocab) +
             "," + precision_name(c.precision) + "," +
             format_double(r.median_step_seconds) + "," +
             std::to_string(r.peak_bytes) + "," + r.status + "," +
             std::to_string(c.seed) + "\n";
    }
    return out;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BenchResult& r : results) arr.push_back(result_to_json(r));
  return arr.dump(2) + "\n";
}

std::vector<BenchResult> parse_report_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  std::vector<BenchResult> results;
  for (const auto& j : arr) {
    BenchResult r;
    r.config.mode = parse_mode(j.at("mode").get<std::string>());
    r.config.batch_size = j.at("B").get<std::int64_t>();
    r.config.max_frames = j.at("T").get<std::int64_t>();
    r.config.max_labels = j.at("U").get<std::int64_t>();
    r.config.joint_dim = j.at("H").get<std::int64_t>();
    r.config.acoustic_dim = j.at("H_A").get<std::int64_t>();
    r.config.label_dim = j.at("H_L").get<std::int64_t>();
    r.config.vocab = j.at("V").get<std::int64_t>();
    r.config.precision = j.at("precision").get<std::string>() == "f32"
                             ? Precision::f32
                             : Precision::f64;
    r.median_step_seconds = j.at("median_step_seconds").get<double>();
    r.peak_bytes = j.at("peak_bytes").get<std::int64_t>();
    r.status = j.at("status").get<std::string>();
    r.config.seed = j.at("seed").get<std::uint64_t>();
    r.loss_checksum = j.at("loss_checksum").get<double>();
    results.push_back(std::move(r));
  }
  return results;
}

void write_report_file(const std::vector<BenchResult>& results,
                       ReportFormat format, const std::string& path) {
  const std::string text = emit_report(results, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open report destination '" + path + "'");
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("failed writing report to '" + path + "'");
  }
}

}  // namespace swt
