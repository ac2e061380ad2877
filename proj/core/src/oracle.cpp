// SPDX-License-Identifier: Apache-2.0

#include "swt/oracle.hpp"

#include <cmath>
#include <vector>

namespace swt {
namespace oracle {

std::int64_t count_paths(std::int64_t frames, std::int64_t labels) {
  if (frames < 1 || labels < 0) {
    throw InvalidInputError("path counting needs frames >= 1, labels >= 0");
  }
  // C(frames + labels - 1, labels), multiplied in small factors to stay exact.
  const std::int64_t n = frames + labels - 1;
  std::int64_t k = labels < n - labels ? labels : n - labels;
  std::int64_t c = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return c;
}

double log_sum_pairwise(std::span<const double> log_terms) {
  if (log_terms.empty()) return -std::numeric_limits<double>::infinity();
  if (log_terms.size() == 1) return log_terms[0];
  const size_t half = log_terms.size() / 2;
  return log_add_exp(log_sum_pairwise(log_terms.first(half)),
                     log_sum_pairwise(log_terms.subspan(half)));
}

namespace {

struct PathWalker {
  LatticeView<const double> scores;
  GridView<const double> log_den;
  std::span<const std::int32_t> labels;
  std::vector<double> path_logps;

  double lp(std::int64_t t, std::int64_t u, std::int32_t k) const {
    return scores.cell(t, u)[k] - log_den.at(t, u);
  }

  // Walk every monotone path from (t, u); `acc` is the log-probability of
  // the steps taken so far. The terminal blank at the last node closes a path.
  void walk(std::int64_t t, std::int64_t u, double acc) {
    const bool last_frame = t == scores.t_extent - 1;
    const bool all_labels = u == scores.u_extent - 1;
    if (last_frame && all_labels) {
      path_logps.push_back(acc + lp(t, u, kBlankId));
      return;
    }
    if (!last_frame) {
      walk(t + 1, u, acc + lp(t, u, kBlankId));
    }
    if (!all_labels) {
      walk(t, u + 1, acc + lp(t, u, labels[u]));
    }
  }
};

}  // namespace

double enumerate_paths_loss(const Tensor<double>& scores,
                            const Tensor<double>& log_den,
                            const LabelSequence& y, std::int64_t* visited,
                            std::int64_t max_paths) {
  const std::int64_t frames = scores.extent(0);
  const std::int64_t labels = scores.extent(1) - 1;
  const std::int64_t total = count_paths(frames, labels);
  if (total > max_paths) {
    throw InstanceTooLargeError("instance has " + std::to_string(total) +
                                " paths, guard is " +
                                std::to_string(max_paths));
  }

  PathWalker walker{lattice_view(scores), grid_view(log_den), y.labels(), {}};
  walker.path_logps.reserve(size_t(total));
  walker.walk(0, 0, 0.0);
  if (visited != nullptr) {
    *visited = std::int64_t(walker.path_logps.size());
  }
  return -log_sum_pairwise(walker.path_logps);
}

Tensor<double> finite_diff(
    const std::function<double(const Tensor<double>&)>& fn,
    const Tensor<double>& x, double eps) {
  Tensor<double> grad = Tensor<double>::zeros(x.shape(), "fd_grad");
  Tensor<double> probe = x.clone("fd_probe");
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    probe.data()[i] = v + eps;
    const double hi = fn(probe);
    probe.data()[i] = v - eps;
    const double lo = fn(probe);
    probe.data()[i] = v;
    grad.data()[i] = (hi - lo) / (2 * eps);
  }
  return grad;
}

}  // namespace oracle
}  // namespace swt
