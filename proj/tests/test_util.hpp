// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>

#include "swt/bench.hpp"
#include "swt/engine.hpp"
#include "swt/rng.hpp"

namespace swt::test {

/// Random batch with fully ragged lengths (t_len in [1, T], u_len in [0, U]),
/// zeroed padding, and labels in [1, vocab).
template <typename T>
BenchInputs<T> random_ragged_inputs(std::uint64_t seed, std::int64_t max_batch,
                                    std::int64_t max_frames,
                                    std::int64_t max_labels,
                                    std::int64_t max_joint = 8,
                                    std::int64_t max_enc = 6,
                                    std::int64_t max_vocab = 6) {
  Rng dims(seed);
  BenchConfig cfg;
  cfg.batch_size = dims.uniform_int(1, max_batch + 1);
  cfg.max_frames = dims.uniform_int(1, max_frames + 1);
  cfg.max_labels = dims.uniform_int(1, max_labels + 1);
  cfg.joint_dim = dims.uniform_int(1, max_joint + 1);
  cfg.acoustic_dim = dims.uniform_int(1, max_enc + 1);
  cfg.label_dim = dims.uniform_int(1, max_enc + 1);
  cfg.vocab = dims.uniform_int(2, max_vocab + 1);
  cfg.seed = seed;
  BenchInputs<T> in = synth_inputs<T>(cfg);
  for (std::int64_t b = 0; b < cfg.batch_size; ++b) {
    in.batch.t_len[size_t(b)] = dims.uniform_int(1, cfg.max_frames + 1);
    in.batch.u_len[size_t(b)] = dims.uniform_int(0, cfg.max_labels + 1);
    T* a = in.batch.acoustic.data() + b * cfg.max_frames * cfg.acoustic_dim;
    std::fill(a + in.batch.t_len[size_t(b)] * cfg.acoustic_dim,
              a + cfg.max_frames * cfg.acoustic_dim, T(0));
    T* l = in.batch.label.data() + b * (cfg.max_labels + 1) * cfg.label_dim;
    std::fill(l + (in.batch.u_len[size_t(b)] + 1) * cfg.label_dim,
              l + (cfg.max_labels + 1) * cfg.label_dim, T(0));
    for (std::int64_t i = 0; i < cfg.max_labels; ++i) {
      in.batch.labels[size_t(b * cfg.max_labels + i)] =
          i < in.batch.u_len[size_t(b)]
              ? std::int32_t(dims.uniform_int(1, cfg.vocab))
              : 0;
    }
  }
  return in;
}

template <typename T>
double max_rel_diff(const Tensor<T>& a, const Tensor<T>& b) {
  double worst = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double x = double(a.data()[i]), y = double(b.data()[i]);
    if (x == y) continue;
    worst = std::max(worst,
                     std::abs(x - y) / std::max({std::abs(x), std::abs(y)}));
  }
  return worst;
}

template <typename T>
double step_max_rel_diff(const StepResult<T>& a, const StepResult<T>& b) {
  double worst = max_rel_diff(a.grads.dw_acoustic, b.grads.dw_acoustic);
  worst = std::max(worst, max_rel_diff(a.grads.dw_label, b.grads.dw_label));
  worst = std::max(worst, max_rel_diff(a.grads.dbias, b.grads.dbias));
  worst = std::max(worst, max_rel_diff(a.grads.dw_out, b.grads.dw_out));
  worst = std::max(worst, max_rel_diff(a.grads.dbias_out, b.grads.dbias_out));
  worst = std::max(worst, max_rel_diff(a.grads.dacoustic, b.grads.dacoustic));
  worst = std::max(worst, max_rel_diff(a.grads.dlabel, b.grads.dlabel));
  const double la = double(a.loss), lb = double(b.loss);
  if (la != lb) {
    worst = std::max(worst,
                     std::abs(la - lb) / std::max(std::abs(la), std::abs(lb)));
  }
  return worst;
}

template <typename T>
bool bitwise_equal(const Tensor<T>& a, const Tensor<T>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), size_t(a.bytes())) == 0;
}

template <typename T>
bool step_bitwise_equal(const StepResult<T>& a, const StepResult<T>& b) {
  return a.loss == b.loss &&
         bitwise_equal(a.grads.dw_acoustic, b.grads.dw_acoustic) &&
         bitwise_equal(a.grads.dw_label, b.grads.dw_label) &&
         bitwise_equal(a.grads.dbias, b.grads.dbias) &&
         bitwise_equal(a.grads.dw_out, b.grads.dw_out) &&
         bitwise_equal(a.grads.dbias_out, b.grads.dbias_out) &&
         bitwise_equal(a.grads.dacoustic, b.grads.dacoustic) &&
         bitwise_equal(a.grads.dlabel, b.grads.dlabel);
}

inline std::int64_t gradient_set_bytes(const GradientSet<float>& g) {
  return g.dw_acoustic.bytes() + g.dw_label.bytes() + g.dbias.bytes() +
         g.dw_out.bytes() + g.dbias_out.bytes() + g.dacoustic.bytes() +
         g.dlabel.bytes();
}
inline std::int64_t gradient_set_bytes(const GradientSet<double>& g) {
  return g.dw_acoustic.bytes() + g.dw_label.bytes() + g.dbias.bytes() +
         g.dw_out.bytes() + g.dbias_out.bytes() + g.dacoustic.bytes() +
         g.dlabel.bytes();
}

template <typename T>
std::int64_t input_bytes(const BenchInputs<T>& in) {
  return in.batch.acoustic.bytes() + in.batch.label.bytes() +
         in.jp.w_acoustic.bytes() + in.jp.w_label.bytes() + in.jp.bias.bytes() +
         in.op.w_out.bytes() + in.op.bias_out.bytes();
}

}  // namespace swt::test
