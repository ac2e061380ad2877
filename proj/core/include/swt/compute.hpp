// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "swt/tensor.hpp"

namespace swt {

/// Joint-network parameters: combines acoustic and label encodings into a
/// joint encoding of width `joint_dim`.
template <typename T>
struct JointParams {
  Tensor<T> w_acoustic;  // [joint_dim, acoustic_dim]
  Tensor<T> w_label;     // [joint_dim, label_dim]
  Tensor<T> bias;        // [joint_dim]

  std::int64_t joint_dim() const { return bias.extent(0); }
  std::int64_t acoustic_dim() const { return w_acoustic.extent(1); }
  std::int64_t label_dim() const { return w_label.extent(1); }
};

/// Output-layer parameters: projects joint encodings to vocabulary scores.
template <typename T>
struct OutputParams {
  Tensor<T> w_out;     // [vocab, joint_dim]
  Tensor<T> bias_out;  // [vocab]

  std::int64_t vocab() const { return bias_out.extent(0); }
  std::int64_t joint_dim() const { return w_out.extent(1); }
};

/// One sample's encodings: `acoustic` has the sample's frame rows,
/// `label` has label-prefix rows (>= 1, the leading blank row included).
template <typename T>
struct SampleEncodings {
  MatrixView<const T> acoustic;  // [frames, acoustic_dim]
  MatrixView<const T> label;     // [label_rows, label_dim]
};

template <typename T>
struct OutputBackwardResult {
  Tensor<T> djoint;    // [frames, label_rows, joint_dim]
  Tensor<T> dw_out;    // [vocab, joint_dim]
  Tensor<T> dbias_out; // [vocab]
};

template <typename T>
struct JointBackwardResult {
  Tensor<T> dacoustic;   // [frames, acoustic_dim]
  Tensor<T> dlabel;      // [label_rows, label_dim]
  Tensor<T> dw_acoustic; // [joint_dim, acoustic_dim]
  Tensor<T> dw_label;    // [joint_dim, label_dim]
  Tensor<T> dbias;       // [joint_dim]
};

// --- view-level kernels (no output allocation; engines drive these) --------

/// joint[t,u] = tanh(W_A a[t] + W_L l[u] + b). The two projections are
/// materialized once per frame row and once per label row.
template <typename T>
void joint_forward_kernel(MatrixView<const T> acoustic,
                          MatrixView<const T> label, const JointParams<T>& jp,
                          LatticeView<T> joint);

/// scores[t,u] = W_O joint[t,u] + b_O.
template <typename T>
void output_forward_kernel(LatticeView<const T> joint,
                           const OutputParams<T>& op, LatticeView<T> scores);

/// djoint[t,u] = W_O^T dscores[t,u]; accumulates dW_O and db_O in ascending
/// (t, u) cell order into the provided zeroed buffers.
template <typename T>
void output_backward_kernel(LatticeView<const T> dscores,
                            LatticeView<const T> joint,
                            const OutputParams<T>& op, LatticeView<T> djoint,
                            std::span<T> dw_out, std::span<T> dbias_out);

/// Backprop through the joint network. `joint` is the retained forward
/// activation (tanh gate 1 - joint^2). Writes encoder-input gradients and
/// accumulates parameter gradients into the provided zeroed buffers.
template <typename T>
void joint_backward_kernel(LatticeView<const T> djoint,
                           LatticeView<const T> joint,
                           MatrixView<const T> acoustic,
                           MatrixView<const T> label,
                           const JointParams<T>& jp, MatrixView<T> dacoustic,
                           MatrixView<T> dlabel, std::span<T> dw_acoustic,
                           std::span<T> dw_label, std::span<T> dbias);

// --- tensor-level ops -------------------------------------------------------

template <typename T>
Tensor<T> joint_forward(const SampleEncodings<T>& enc,
                        const JointParams<T>& jp);

template <typename T>
Tensor<T> output_forward(const Tensor<T>& joint, const OutputParams<T>& op);

template <typename T>
OutputBackwardResult<T> output_backward(const Tensor<T>& dscores,
                                        const Tensor<T>& joint,
                                        const OutputParams<T>& op);

template <typename T>
JointBackwardResult<T> joint_backward(const Tensor<T>& djoint,
                                      const Tensor<T>& joint,
                                      const SampleEncodings<T>& enc,
                                      const JointParams<T>& jp);

}  // namespace swt
