// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "swt/compute.hpp"
#include "swt/loss.hpp"
#include "swt/tensor.hpp"

namespace swt {

enum class EngineMode {
  batched,
  sample_wise,
  sample_wise_pr,
  sample_wise_pr_dp,
};

const char* mode_name(EngineMode mode);
EngineMode parse_mode(std::string_view name);

/// A training batch of synthesized encodings. Padded regions (frames past
/// t_len[b], label rows past u_len[b] + 1) are zero.
template <typename T>
struct Batch {
  Tensor<T> acoustic;  // [B, T, H_A]
  Tensor<T> label;     // [B, U+1, H_L]
  std::vector<std::int32_t> labels;  // [B, U] flat, zero-padded past u_len[b]
  std::vector<std::int64_t> t_len;   // 1 <= t_len[b] <= T
  std::vector<std::int64_t> u_len;   // 0 <= u_len[b] <= U

  std::int64_t batch_size() const { return acoustic.extent(0); }
  std::int64_t max_frames() const { return acoustic.extent(1); }
  std::int64_t label_rows() const { return label.extent(1); }  // U + 1
  std::int64_t max_labels() const { return label_rows() - 1; }
  std::int64_t acoustic_dim() const { return acoustic.extent(2); }
  std::int64_t label_dim() const { return label.extent(2); }

  std::span<const std::int32_t> sample_labels(std::int64_t b) const {
    return {labels.data() + b * max_labels(), size_t(u_len[b])};
  }
};

/// Accumulated parameter gradients plus encoder-input gradients.
template <typename T>
struct GradientSet {
  Tensor<T> dw_acoustic;  // [H, H_A]
  Tensor<T> dw_label;     // [H, H_L]
  Tensor<T> dbias;        // [H]
  Tensor<T> dw_out;       // [V, H]
  Tensor<T> dbias_out;    // [V]
  Tensor<T> dacoustic;    // [B, T, H_A], zero in padded regions
  Tensor<T> dlabel;       // [B, U+1, H_L], zero in padded regions
};

/// One sample's gradient contribution, reduced into a GradientSet.
template <typename T>
struct SampleGradients {
  std::int64_t index = 0;
  T loss = 0;
  Tensor<T> dw_acoustic;
  Tensor<T> dw_label;
  Tensor<T> dbias;
  Tensor<T> dw_out;
  Tensor<T> dbias_out;
  Tensor<T> dacoustic;  // [frames_b, H_A] (cropped extents when PR is active)
  Tensor<T> dlabel;     // [rows_b, H_L]
};

struct EngineConfig {
  EngineMode mode = EngineMode::sample_wise;
  std::int64_t mem_budget_bytes = 1'000'000'000;
  int max_parallel = 16;  // power of two <= 16 for the DP mode
  int worker_count = 1;
  /// Feed the raw label count (not the allocated lattice rows) into the
  /// parallel-iterations formula.
  bool literal_pi_extents = false;
};

template <typename T>
struct StepResult {
  T loss = 0;  // plain sum of per-sample losses, ascending index
  std::vector<T> sample_losses;
  GradientSet<T> grads;
};

/// Parallel-iteration count from the f32 score-lattice footprint:
/// 2^clamp(floor(log2(budget / (4 * frames * labels * vocab))), 0, 4).
int compute_parallel_iterations(std::int64_t frames, std::int64_t labels,
                                std::int64_t vocab, std::int64_t budget_bytes);

/// Sums the parameter gradients (ascending-index calls keep the reduction
/// deterministic) and writes the encoder-input gradients into sample slot
/// `sg.index` of the batch-shaped outputs.
template <typename T>
void accumulate(GradientSet<T>& grads, const SampleGradients<T>& sg);

/// Reference engine: full padded-extent batched tensors, per-sample loss
/// masking through true lengths.
template <typename T>
StepResult<T> run_batched(const Batch<T>& batch, const JointParams<T>& jp,
                          const OutputParams<T>& op);

/// Sample-wise engine (optionally with padding removal and dynamic
/// parallelism, per cfg.mode). Produces results identical to run_batched.
template <typename T>
StepResult<T> run_sample_wise(const Batch<T>& batch, const JointParams<T>& jp,
                              const OutputParams<T>& op,
                              const EngineConfig& cfg);

/// Dispatches on cfg.mode.
template <typename T>
StepResult<T> run_step(const Batch<T>& batch, const JointParams<T>& jp,
                       const OutputParams<T>& op, const EngineConfig& cfg);

// --- analytic tensor sizes (used by tests, the OOM simulation, and the
// CLI dry run; never by the engines themselves) ------------------------------

struct LatticeDims {
  std::int64_t frames = 0;      // T
  std::int64_t label_rows = 0;  // U + 1
  std::int64_t joint_dim = 0;
  std::int64_t acoustic_dim = 0;
  std::int64_t label_dim = 0;
  std::int64_t vocab = 0;
};

/// Bytes of the three per-sample 4D-scale tensors (joint, scores, dscores).
std::int64_t lattice_trio_bytes(const LatticeDims& d, Precision p);

/// Upper bound on everything one sample's pipeline allocates at once
/// (activations, gradients, lattice variables, projections, crops,
/// per-sample contribution tensors).
std::int64_t sample_working_bytes(const LatticeDims& d, Precision p);

}  // namespace swt
