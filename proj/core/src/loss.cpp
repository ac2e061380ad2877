// SPDX-License-Identifier: Apache-2.0

#include "swt/loss.hpp"

#include <cmath>

namespace swt {

namespace {

template <typename T>
constexpr T kNegInf = -std::numeric_limits<T>::infinity();

void check_labels(std::span<const std::int32_t> labels, std::int64_t u_extent,
                  std::int64_t vocab) {
  if (std::int64_t(labels.size()) != u_extent - 1) {
    throw InvalidInputError("label count " + std::to_string(labels.size()) +
                            " does not match lattice label rows " +
                            std::to_string(u_extent));
  }
  for (std::int32_t l : labels) {
    if (l <= kBlankId || l >= vocab) {
      throw InvalidInputError("label id " + std::to_string(l) +
                              " outside [1, " + std::to_string(vocab) + ")");
    }
  }
}

}  // namespace

template <typename T>
void log_denominator_kernel(LatticeView<const T> scores, GridView<T> log_den) {
  for (std::int64_t t = 0; t < scores.t_extent; ++t) {
    for (std::int64_t u = 0; u < scores.u_extent; ++u) {
      log_den.at(t, u) = logsumexp_span(
          std::span<const T>(scores.cell(t, u), size_t(scores.feat)));
    }
  }
}

template <typename T>
void forward_backward_kernel(LatticeView<const T> scores,
                             GridView<const T> log_den,
                             std::span<const std::int32_t> labels,
                             GridView<T> alpha, GridView<T> beta) {
  const std::int64_t frames = scores.t_extent;
  const std::int64_t rows = scores.u_extent;  // label rows = U_b + 1
  if (frames < 1) {
    throw InvalidInputError("lattice needs at least one frame");
  }
  check_labels(labels, rows, scores.feat);

  // lp(k | t, u) = scores[t,u,k] - log_den[t,u]
  auto lp = [&](std::int64_t t, std::int64_t u, std::int32_t k) -> T {
    return scores.cell(t, u)[k] - log_den.at(t, u);
  };

  alpha.at(0, 0) = 0;
  for (std::int64_t t = 0; t < frames; ++t) {
    for (std::int64_t u = 0; u < rows; ++u) {
      if (t == 0 && u == 0) continue;
      const T from_blank =
          t > 0 ? alpha.at(t - 1, u) + lp(t - 1, u, kBlankId) : kNegInf<T>;
      const T from_label =
          u > 0 ? alpha.at(t, u - 1) + lp(t, u - 1, labels[u - 1]) : kNegInf<T>;
      alpha.at(t, u) = log_add_exp(from_blank, from_label);
    }
  }

  beta.at(frames - 1, rows - 1) = lp(frames - 1, rows - 1, kBlankId);
  for (std::int64_t t = frames - 1; t >= 0; --t) {
    for (std::int64_t u = rows - 1; u >= 0; --u) {
      if (t == frames - 1 && u == rows - 1) continue;
      const T via_blank =
          t < frames - 1 ? lp(t, u, kBlankId) + beta.at(t + 1, u) : kNegInf<T>;
      const T via_label =
          u < rows - 1 ? lp(t, u, labels[u]) + beta.at(t, u + 1) : kNegInf<T>;
      beta.at(t, u) = log_add_exp(via_blank, via_label);
    }
  }
}

template <typename T>
void loss_gradient_kernel(LatticeView<const T> scores,
                          GridView<const T> log_den,
                          GridView<const T> alpha, GridView<const T> beta,
                          std::span<const std::int32_t> labels,
                          LatticeView<T> dscores) {
  const std::int64_t frames = scores.t_extent;
  const std::int64_t rows = scores.u_extent;
  const std::int64_t vocab = scores.feat;
  check_labels(labels, rows, vocab);

  const T log_z = beta.at(0, 0);
  if (!std::isfinite(log_z)) {
    throw NumericalDegeneracyError("total path log-probability is not finite");
  }

  bool finite = true;
  for (std::int64_t t = 0; t < frames; ++t) {
    const bool last_frame = t == frames - 1;
    for (std::int64_t u = 0; u < rows; ++u) {
      const std::int32_t next_label = u < rows - 1 ? labels[u] : -1;
      // Everything below is exp(score + shift + <a beta term>); shift folds
      // the node's alpha, softmax denominator, and the loss normalizer.
      const T shift = alpha.at(t, u) - log_den.at(t, u) - log_z;
      const T beta_here = beta.at(t, u);
      // Destination beta for the blank edge: next frame, 0 past the terminal
      // node, and -inf (dead end) for a blank in the last frame with labels
      // still pending.
      const T beta_blank_dest = !last_frame ? beta.at(t + 1, u)
                                : u == rows - 1 ? T(0)
                                                : kNegInf<T>;
      const T* cell = scores.cell(t, u);
      T* grad = dscores.cell(t, u);
      for (std::int64_t v = 0; v < vocab; ++v) {
        const T g = cell[v] + shift;
        T value = std::exp(g + beta_here);
        if (v == kBlankId) {
          value -= std::exp(g + beta_blank_dest);
        } else if (v == next_label) {
          value -= std::exp(g + beta.at(t, u + 1));
        }
        grad[v] = value;
        finite &= std::isfinite(value);
      }
    }
  }
  if (!finite) {
    throw NumericalDegeneracyError("non-finite output-score gradient");
  }
}

template <typename T>
Tensor<T> log_denominator(const Tensor<T>& scores) {
  Tensor<T> log_den =
      Tensor<T>::zeros({scores.extent(0), scores.extent(1)}, "log_den");
  log_denominator_kernel<T>(lattice_view(scores), grid_view(log_den));
  return log_den;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> forward_backward(const Tensor<T>& scores,
                                                 const Tensor<T>& log_den,
                                                 const LabelSequence& y) {
  Tensor<T> alpha =
      Tensor<T>::zeros({scores.extent(0), scores.extent(1)}, "alpha");
  Tensor<T> beta =
      Tensor<T>::zeros({scores.extent(0), scores.extent(1)}, "beta");
  forward_backward_kernel<T>(lattice_view(scores), grid_view(log_den),
                             y.labels(), grid_view(alpha), grid_view(beta));
  return {std::move(alpha), std::move(beta)};
}

template <typename T>
T loss_value(const Tensor<T>& beta) {
  const T log_z = beta.data()[0];
  if (!std::isfinite(log_z)) {
    throw NumericalDegeneracyError("no alignment path carries mass");
  }
  return -log_z;
}

template <typename T>
Tensor<T> loss_gradient(const Tensor<T>& scores, const Tensor<T>& log_den,
                        const Tensor<T>& alpha, const Tensor<T>& beta,
                        const LabelSequence& y) {
  Tensor<T> dscores = Tensor<T>::zeros(
      {scores.extent(0), scores.extent(1), scores.extent(2)}, "dscores");
  loss_gradient_kernel<T>(lattice_view(scores), grid_view(log_den),
                          grid_view(alpha), grid_view(beta), y.labels(),
                          lattice_view(dscores));
  return dscores;
}

template <typename T>
LossResult<T> transducer_loss_sample(const Tensor<T>& scores,
                                     const LabelSequence& y) {
  const Tensor<T> log_den = log_denominator(scores);
  auto [alpha, beta] = forward_backward(scores, log_den, y);
  LossResult<T> result;
  result.value = loss_value(beta);
  result.dscores = loss_gradient(scores, log_den, alpha, beta, y);
  return result;
}

#define SWT_INSTANTIATE_LOSS(T)                                               \
  template void log_denominator_kernel<T>(LatticeView<const T>, GridView<T>); \
  template void forward_backward_kernel<T>(                                   \
      LatticeView<const T>, GridView<const T>, std::span<const std::int32_t>, \
      GridView<T>, GridView<T>);                                              \
  template void loss_gradient_kernel<T>(                                      \
      LatticeView<const T>, GridView<const T>, GridView<const T>,             \
      GridView<const T>, std::span<const std::int32_t>, LatticeView<T>);      \
  template Tensor<T> log_denominator<T>(const Tensor<T>&);                    \
  template std::pair<Tensor<T>, Tensor<T>> forward_backward<T>(               \
      const Tensor<T>&, const Tensor<T>&, const LabelSequence&);              \
  template T loss_value<T>(const Tensor<T>&);                                 \
  template Tensor<T> loss_gradient<T>(const Tensor<T>&, const Tensor<T>&,     \
                                      const Tensor<T>&, const Tensor<T>&,     \
                                      const LabelSequence&);                  \
  template LossResult<T> transducer_loss_sample<T>(const Tensor<T>&,          \
                                                   const LabelSequence&);

SWT_INSTANTIATE_LOSS(float)
SWT_INSTANTIATE_LOSS(double)

}  // namespace swt
