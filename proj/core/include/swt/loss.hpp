// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "swt/tensor.hpp"

namespace swt {

/// Blank token id. Labels must never collide with it.
inline constexpr std::int32_t kBlankId = 0;

/// A sample's target labels (token ids in [1, vocab)).
class LabelSequence {
 public:
  LabelSequence() = default;
  explicit LabelSequence(std::vector<std::int32_t> labels)
      : labels_(std::move(labels)) {
    for (std::int32_t l : labels_) {
      if (l == kBlankId) {
        throw InvalidInputError("label collides with blank id");
      }
    }
  }

  std::span<const std::int32_t> labels() const { return labels_; }
  std::int64_t size() const { return std::int64_t(labels_.size()); }

 private:
  std::vector<std::int32_t> labels_;
};

/// Per-sample lattice variables in log space. `log_den` carries the softmax
/// denominator; alpha/beta are the forward and backward variables. -inf is
/// legal here (missing recursion branches) and nowhere else in the library.
template <typename T>
struct LatticeVars {
  Tensor<T> log_den;  // [frames, labels+1]
  Tensor<T> alpha;    // [frames, labels+1]
  Tensor<T> beta;     // [frames, labels+1]
};

/// Loss and output-score gradient for one sample.
template <typename T>
struct LossResult {
  T value = 0;
  Tensor<T> dscores;  // [frames, labels+1, vocab]
};

/// log(exp(a) + exp(b)) with -inf treated as the additive identity.
template <typename T>
inline T log_add_exp(T a, T b) {
  constexpr T kNegInf = -std::numeric_limits<T>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const T hi = a > b ? a : b;
  const T lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// --- view-level kernels ------------------------------------------------------

/// log_den[t,u] = logsumexp_v scores[t,u,v]. No probability tensor of the
/// scores' full size is ever materialized.
template <typename T>
void log_denominator_kernel(LatticeView<const T> scores, GridView<T> log_den);

/// Fills the forward/backward lattices:
///   alpha[0,0] = 0
///   alpha[t,u] = logadd(alpha[t-1,u] + lp(blank|t-1,u),
///                       alpha[t,u-1] + lp(y_u|t,u-1))
///   beta[T-1,U] = lp(blank|T-1,U)
///   beta[t,u]  = logadd(lp(blank|t,u) + beta[t+1,u],
///                       lp(y_{u+1}|t,u) + beta[t,u+1])
/// where lp(k|t,u) = scores[t,u,k] - log_den[t,u] and missing branches are
/// -inf. The total log-probability is beta[0,0].
template <typename T>
void forward_backward_kernel(LatticeView<const T> scores,
                             GridView<const T> log_den,
                             std::span<const std::int32_t> labels,
                             GridView<T> alpha, GridView<T> beta);

/// Analytic d(loss)/d(scores). For each lattice node, the cell occupancy
/// exp(alpha + beta - logZ) scaled by the node softmax, minus the blank and
/// label edge terms. Probabilities come straight from scores and log_den.
template <typename T>
void loss_gradient_kernel(LatticeView<const T> scores,
                          GridView<const T> log_den,
                          GridView<const T> alpha, GridView<const T> beta,
                          std::span<const std::int32_t> labels,
                          LatticeView<T> dscores);

// --- tensor-level ops --------------------------------------------------------

template <typename T>
Tensor<T> log_denominator(const Tensor<T>& scores);

template <typename T>
std::pair<Tensor<T>, Tensor<T>> forward_backward(const Tensor<T>& scores,
                                                 const Tensor<T>& log_den,
                                                 const LabelSequence& y);

/// -beta[0,0]; raises NumericalDegeneracyError when no path has mass.
template <typename T>
T loss_value(const Tensor<T>& beta);

template <typename T>
Tensor<T> loss_gradient(const Tensor<T>& scores, const Tensor<T>& log_den,
                        const Tensor<T>& alpha, const Tensor<T>& beta,
                        const LabelSequence& y);

/// The full per-sample pipeline: denominator, forward-backward, loss value,
/// score gradients.
template <typename T>
LossResult<T> transducer_loss_sample(const Tensor<T>& scores,
                                     const LabelSequence& y);

}  // namespace swt
