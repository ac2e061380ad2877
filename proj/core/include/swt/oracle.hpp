// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

#include "swt/loss.hpp"
#include "swt/tensor.hpp"

namespace swt {
namespace oracle {

/// Number of monotone alignment paths through a (frames, labels) lattice:
/// C(frames + labels - 1, labels). The final step is always the terminal
/// blank, so only the first frames + labels - 1 steps permute.
std::int64_t count_paths(std::int64_t frames, std::int64_t labels);

/// Brute-force loss: enumerates every alignment path, accumulates each
/// path's log-probability, and reduces them pairwise in log space. Always
/// runs in f64. `visited` (optional) reports how many paths were walked.
/// Instances with more than `max_paths` paths are rejected.
double enumerate_paths_loss(const Tensor<double>& scores,
                            const Tensor<double>& log_den,
                            const LabelSequence& y,
                            std::int64_t* visited = nullptr,
                            std::int64_t max_paths = 1'000'000);

/// Pairwise log-space reduction of a list of log-probabilities.
double log_sum_pairwise(std::span<const double> log_terms);

/// Central finite differences of a scalar function, f64 only.
Tensor<double> finite_diff(
    const std::function<double(const Tensor<double>&)>& fn,
    const Tensor<double>& x, double eps = 1e-6);

/// Default per-element tolerance for comparing an analytic gradient `g`
/// against finite differences: max(1e-6 * |g|, 1e-8).
inline double grad_tolerance(double g) {
  const double rel = 1e-6 * std::abs(g);
  return rel > 1e-8 ? rel : 1e-8;
}

}  // namespace oracle
}  // namespace swt
