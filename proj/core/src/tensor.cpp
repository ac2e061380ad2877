// SPDX-License-Identifier: Apache-2.0

#include "swt/tensor.hpp"

namespace swt {

AllocationTracker& AllocationTracker::instance() {
  static AllocationTracker tracker;
  return tracker;
}

void AllocationTracker::on_alloc(std::int64_t bytes, std::string_view tag) {
  if (!enabled_) return;
  const std::int64_t ceiling = ceiling_.load(std::memory_order_relaxed);
  const std::int64_t live = live_.load(std::memory_order_relaxed);
  if (ceiling > 0 && live + bytes > ceiling) {
    throw OutOfMemoryError(std::string(tag), bytes, live, ceiling);
  }
  const std::int64_t now = live_.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  std::int64_t peak = peak_.load(std::memory_order_relaxed);
  while (now > peak &&
         !peak_.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void AllocationTracker::on_release(std::int64_t bytes) noexcept {
  if (!enabled_) return;
  live_.fetch_sub(bytes, std::memory_order_relaxed);
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, std::string_view tag) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2) {
    throw InvalidShapeError("matmul expects rank-2 operands, got " +
                            a.shape().str() + " x " + b.shape().str());
  }
  const std::int64_t m = a.extent(0), k = a.extent(1);
  const std::int64_t k2 = b.extent(0), n = b.extent(1);
  if (k != k2) {
    throw InvalidShapeError("matmul inner extents differ: " + a.shape().str() +
                            " x " + b.shape().str());
  }
  Tensor<T> c = Tensor<T>::zeros({m, n}, tag);
  const T* pa = a.data();
  const T* pb = b.data();
  T* pc = c.data();
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t kk = 0; kk < k; ++kk) {
      const T aik = pa[i * k + kk];
      const T* brow = pb + kk * n;
      T* crow = pc + i * n;
      for (std::int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

template <typename T>
Tensor<T> logsumexp_last(const Tensor<T>& t, std::string_view tag) {
  const int rank = t.shape().rank();
  const std::int64_t v = t.extent(rank - 1);
  std::vector<std::int64_t> out_shape;
  for (int i = 0; i < rank - 1; ++i) out_shape.push_back(t.extent(i));
  if (out_shape.empty()) out_shape.push_back(1);

  Tensor<T> out = Tensor<T>::zeros(Shape(out_shape), tag);
  const std::int64_t cells = t.size() / v;
  const T* src = t.data();
  T* dst = out.data();
  for (std::int64_t c = 0; c < cells; ++c, src += v) {
    dst[c] = logsumexp_span(std::span<const T>(src, size_t(v)));
  }
  return out;
}

template <typename T>
Tensor<T> crop(const Tensor<T>& t, const std::vector<std::int64_t>& prefixes,
               std::string_view tag) {
  const int rank = t.shape().rank();
  if (static_cast<int>(prefixes.size()) != rank) {
    throw InvalidShapeError("crop expects one prefix per axis");
  }
  for (int i = 0; i < rank; ++i) {
    if (prefixes[i] < 1 || prefixes[i] > t.extent(i)) {
      throw InvalidShapeError("crop prefix " + std::to_string(prefixes[i]) +
                              " out of range for axis " + std::to_string(i) +
                              " of " + t.shape().str());
    }
  }

  Tensor<T> out = Tensor<T>::zeros(Shape(prefixes), tag);
  // Iterate the destination index space; axes beyond the rank act as size 1.
  std::array<std::int64_t, Shape::kMaxRank> n{1, 1, 1, 1};
  std::array<std::int64_t, Shape::kMaxRank> src_ext{1, 1, 1, 1};
  for (int i = 0; i < rank; ++i) {
    n[i] = prefixes[i];
    src_ext[i] = t.extent(i);
  }
  const T* src = t.data();
  T* dst = out.data();
  for (std::int64_t i = 0; i < n[0]; ++i) {
    for (std::int64_t j = 0; j < n[1]; ++j) {
      for (std::int64_t k = 0; k < n[2]; ++k) {
        const T* s =
            src + ((i * src_ext[1] + j) * src_ext[2] + k) * src_ext[3];
        for (std::int64_t l = 0; l < n[3]; ++l) *dst++ = s[l];
      }
    }
  }
  return out;
}

template Tensor<float> matmul(const Tensor<float>&, const Tensor<float>&,
                              std::string_view);
template Tensor<double> matmul(const Tensor<double>&, const Tensor<double>&,
                               std::string_view);
template Tensor<float> logsumexp_last(const Tensor<float>&, std::string_view);
template Tensor<double> logsumexp_last(const Tensor<double>&, std::string_view);
template Tensor<float> crop(const Tensor<float>&,
                            const std::vector<std::int64_t>&, std::string_view);
template Tensor<double> crop(const Tensor<double>&,
                             const std::vector<std::int64_t>&, std::string_view);

}  // namespace swt
