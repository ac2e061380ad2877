// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swt/errors.hpp"

namespace swt {

enum class Precision { f32, f64 };

inline constexpr std::int64_t bytes_per_element(Precision p) {
  return p == Precision::f32 ? 4 : 8;
}

inline constexpr const char* precision_name(Precision p) {
  return p == Precision::f32 ? "f32" : "f64";
}

/// Dense row-major extents, rank 1..4, every extent >= 1.
class Shape {
 public:
  static constexpr int kMaxRank = 4;

  Shape(std::initializer_list<std::int64_t> extents)
      : Shape(std::vector<std::int64_t>(extents)) {}

  explicit Shape(const std::vector<std::int64_t>& extents) {
    if (extents.empty() || extents.size() > kMaxRank) {
      throw InvalidShapeError("shape rank must be 1..4, got " +
                              std::to_string(extents.size()));
    }
    rank_ = static_cast<int>(extents.size());
    for (int i = 0; i < rank_; ++i) {
      if (extents.begin()[i] < 1) {
        throw InvalidShapeError("extent " + std::to_string(i) +
                                " must be >= 1, got " +
                                std::to_string(extents.begin()[i]));
      }
      ext_[i] = extents.begin()[i];
    }
  }

  int rank() const noexcept { return rank_; }

  std::int64_t operator[](int axis) const noexcept { return ext_[axis]; }

  std::int64_t elem_count() const noexcept {
    std::int64_t n = 1;
    for (int i = 0; i < rank_; ++i) n *= ext_[i];
    return n;
  }

  bool operator==(const Shape& o) const noexcept {
    if (rank_ != o.rank_) return false;
    for (int i = 0; i < rank_; ++i)
      if (ext_[i] != o.ext_[i]) return false;
    return true;
  }
  bool operator!=(const Shape& o) const noexcept { return !(*this == o); }

  std::string str() const {
    std::string s = "[";
    for (int i = 0; i < rank_; ++i) {
      if (i) s += ",";
      s += std::to_string(ext_[i]);
    }
    return s + "]";
  }

 private:
  std::array<std::int64_t, kMaxRank> ext_{1, 1, 1, 1};
  int rank_ = 0;
};

/// Payload bytes a tensor of this shape and precision would occupy.
inline std::int64_t shape_bytes(const Shape& s, Precision p) {
  return s.elem_count() * bytes_per_element(p);
}

/// Process-wide live/peak payload-byte counters. Tensor construction and
/// destruction report here; the optional ceiling simulates out-of-memory.
/// Counters are atomic; reads may trail an in-flight allocation.
class AllocationTracker {
 public:
  static AllocationTracker& instance();

  void on_alloc(std::int64_t bytes, std::string_view tag);
  void on_release(std::int64_t bytes) noexcept;

  std::int64_t live_bytes() const noexcept {
    return live_.load(std::memory_order_relaxed);
  }
  std::int64_t peak_bytes() const noexcept {
    return peak_.load(std::memory_order_relaxed);
  }

  /// Drops the high-water mark back to the currently held allocations.
  void reset_peak() noexcept {
    peak_.store(live_.load(std::memory_order_relaxed),
                std::memory_order_relaxed);
  }

  /// 0 disables the ceiling. Toggling while tensors are live is legal; the
  /// ceiling only gates future allocations.
  void set_ceiling(std::int64_t bytes) noexcept {
    ceiling_.store(bytes, std::memory_order_relaxed);
  }
  std::int64_t ceiling() const noexcept {
    return ceiling_.load(std::memory_order_relaxed);
  }

  /// Only toggle while no tracked tensors are live.
  void set_enabled(bool on) noexcept { enabled_ = on; }
  bool enabled() const noexcept { return enabled_; }

 private:
  std::atomic<std::int64_t> live_{0};
  std::atomic<std::int64_t> peak_{0};
  std::atomic<std::int64_t> ceiling_{0};
  bool enabled_ = true;
};

/// Scoped allocation ceiling (restores the previous value on exit).
class CeilingGuard {
 public:
  explicit CeilingGuard(std::int64_t bytes)
      : previous_(AllocationTracker::instance().ceiling()) {
    AllocationTracker::instance().set_ceiling(bytes);
  }
  ~CeilingGuard() { AllocationTracker::instance().set_ceiling(previous_); }
  CeilingGuard(const CeilingGuard&) = delete;
  CeilingGuard& operator=(const CeilingGuard&) = delete;

 private:
  std::int64_t previous_;
};

/// Dense row-major tensor, rank <= 4, allocation-tracked. Move-only: copies
/// are explicit (`clone`) so every allocation the tracker sees is deliberate.
template <typename T>
class Tensor {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);

 public:
  Tensor() = default;

  /// Zero-initialized tensor. `tag` names the tensor in OOM reports.
  static Tensor zeros(Shape shape, std::string_view tag = "tensor") {
    return Tensor(std::move(shape), tag);
  }

  /// Allocates and copies `values` (must match the element count).
  static Tensor from(Shape shape, std::span<const T> values,
                     std::string_view tag = "tensor") {
    Tensor t(std::move(shape), tag);
    if (static_cast<std::int64_t>(values.size()) != t.size()) {
      throw InvalidShapeError("value count " + std::to_string(values.size()) +
                              " does not match shape " + t.shape().str());
    }
    std::copy(values.begin(), values.end(), t.data_.get());
    return t;
  }

  Tensor(const Tensor&) = delete;
  Tensor& operator=(const Tensor&) = delete;

  Tensor(Tensor&& o) noexcept { swap(o); }
  Tensor& operator=(Tensor&& o) noexcept {
    if (this != &o) {
      release();
      swap(o);
    }
    return *this;
  }

  ~Tensor() { release(); }

  Tensor clone(std::string_view tag = "clone") const {
    if (empty()) return {};
    Tensor t(shape(), tag);
    std::copy(data_.get(), data_.get() + size(), t.data_.get());
    return t;
  }

  bool empty() const noexcept { return data_ == nullptr; }
  const Shape& shape() const { return *shape_; }
  std::int64_t extent(int axis) const { return (*shape_)[axis]; }
  std::int64_t size() const noexcept { return size_; }
  std::int64_t bytes() const noexcept {
    return size_ * static_cast<std::int64_t>(sizeof(T));
  }

  static constexpr Precision precision() {
    return std::is_same_v<T, float> ? Precision::f32 : Precision::f64;
  }

  T* data() noexcept { return data_.get(); }
  const T* data() const noexcept { return data_.get(); }
  std::span<T> span() noexcept { return {data_.get(), size_t(size_)}; }
  std::span<const T> span() const noexcept { return {data_.get(), size_t(size_)}; }

  T& operator()(std::int64_t i) { return data_[i]; }
  T operator()(std::int64_t i) const { return data_[i]; }
  T& operator()(std::int64_t i, std::int64_t j) {
    return data_[i * (*shape_)[1] + j];
  }
  T operator()(std::int64_t i, std::int64_t j) const {
    return data_[i * (*shape_)[1] + j];
  }
  T& operator()(std::int64_t i, std::int64_t j, std::int64_t k) {
    return data_[(i * (*shape_)[1] + j) * (*shape_)[2] + k];
  }
  T operator()(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return data_[(i * (*shape_)[1] + j) * (*shape_)[2] + k];
  }
  T& operator()(std::int64_t i, std::int64_t j, std::int64_t k,
                std::int64_t l) {
    return data_[((i * (*shape_)[1] + j) * (*shape_)[2] + k) * (*shape_)[3] + l];
  }
  T operator()(std::int64_t i, std::int64_t j, std::int64_t k,
               std::int64_t l) const {
    return data_[((i * (*shape_)[1] + j) * (*shape_)[2] + k) * (*shape_)[3] + l];
  }

 private:
  Tensor(Shape shape, std::string_view tag)
      : shape_(std::make_unique<Shape>(std::move(shape))),
        size_(shape_->elem_count()) {
    AllocationTracker::instance().on_alloc(bytes(), tag);
    data_ = std::make_unique<T[]>(static_cast<std::size_t>(size_));
  }

  void release() noexcept {
    if (data_) {
      AllocationTracker::instance().on_release(bytes());
      data_.reset();
      shape_.reset();
      size_ = 0;
    }
  }

  void swap(Tensor& o) noexcept {
    std::swap(shape_, o.shape_);
    std::swap(data_, o.data_);
    std::swap(size_, o.size_);
  }

  std::unique_ptr<Shape> shape_;
  std::unique_ptr<T[]> data_;
  std::int64_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Lightweight non-owning views. `T` may be const-qualified for read access.

/// 2D view: `rows` rows of `cols` elements, consecutive rows `row_stride`
/// elements apart (row_stride == cols for a contiguous matrix).
template <typename T>
struct MatrixView {
  T* data = nullptr;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::int64_t row_stride = 0;

  T* row(std::int64_t r) const { return data + r * row_stride; }
  T& at(std::int64_t r, std::int64_t c) const { return data[r * row_stride + c]; }

  operator MatrixView<const T>() const {
    return {data, rows, cols, row_stride};
  }
};

/// 3D lattice view: a T x U grid of contiguous `feat`-element cells.
template <typename T>
struct LatticeView {
  T* data = nullptr;
  std::int64_t t_extent = 0;
  std::int64_t u_extent = 0;
  std::int64_t feat = 0;
  std::int64_t t_stride = 0;  // elements between consecutive t rows
  std::int64_t u_stride = 0;  // elements between consecutive u cells

  T* cell(std::int64_t t, std::int64_t u) const {
    return data + t * t_stride + u * u_stride;
  }

  /// Leading sub-lattice with the same strides.
  LatticeView sub(std::int64_t t, std::int64_t u) const {
    return {data, t, u, feat, t_stride, u_stride};
  }

  operator LatticeView<const T>() const {
    return {data, t_extent, u_extent, feat, t_stride, u_stride};
  }
};

/// 2D lattice grid (one scalar per (t, u) node), u axis contiguous.
template <typename T>
struct GridView {
  T* data = nullptr;
  std::int64_t t_extent = 0;
  std::int64_t u_extent = 0;
  std::int64_t t_stride = 0;

  T& at(std::int64_t t, std::int64_t u) const { return data[t * t_stride + u]; }

  GridView sub(std::int64_t t, std::int64_t u) const {
    return {data, t, u, t_stride};
  }

  operator GridView<const T>() const {
    return {data, t_extent, u_extent, t_stride};
  }
};

template <typename T>
MatrixView<T> matrix_view(Tensor<T>& t) {
  return {t.data(), t.extent(0), t.extent(1), t.extent(1)};
}
template <typename T>
MatrixView<const T> matrix_view(const Tensor<T>& t) {
  return {t.data(), t.extent(0), t.extent(1), t.extent(1)};
}

/// Row block `b` of a rank-3 tensor [B, R, C].
template <typename T>
MatrixView<T> sample_matrix(Tensor<T>& t, std::int64_t b) {
  const std::int64_t r = t.extent(1), c = t.extent(2);
  return {t.data() + b * r * c, r, c, c};
}
template <typename T>
MatrixView<const T> sample_matrix(const Tensor<T>& t, std::int64_t b) {
  const std::int64_t r = t.extent(1), c = t.extent(2);
  return {t.data() + b * r * c, r, c, c};
}

template <typename T>
LatticeView<T> lattice_view(Tensor<T>& t) {
  const std::int64_t f = t.extent(2), u = t.extent(1);
  return {t.data(), t.extent(0), u, f, u * f, f};
}
template <typename T>
LatticeView<const T> lattice_view(const Tensor<T>& t) {
  const std::int64_t f = t.extent(2), u = t.extent(1);
  return {t.data(), t.extent(0), u, f, u * f, f};
}

/// Sample `b` of a rank-4 tensor [B, T, U, F].
template <typename T>
LatticeView<T> sample_lattice(Tensor<T>& t, std::int64_t b) {
  const std::int64_t tt = t.extent(1), u = t.extent(2), f = t.extent(3);
  return {t.data() + b * tt * u * f, tt, u, f, u * f, f};
}
template <typename T>
LatticeView<const T> sample_lattice(const Tensor<T>& t, std::int64_t b) {
  const std::int64_t tt = t.extent(1), u = t.extent(2), f = t.extent(3);
  return {t.data() + b * tt * u * f, tt, u, f, u * f, f};
}

template <typename T>
GridView<T> grid_view(Tensor<T>& t) {
  return {t.data(), t.extent(0), t.extent(1), t.extent(1)};
}
template <typename T>
GridView<const T> grid_view(const Tensor<T>& t) {
  return {t.data(), t.extent(0), t.extent(1), t.extent(1)};
}

/// Sample `b` of a rank-3 tensor [B, T, U].
template <typename T>
GridView<T> sample_grid(Tensor<T>& t, std::int64_t b) {
  const std::int64_t tt = t.extent(1), u = t.extent(2);
  return {t.data() + b * tt * u, tt, u, u};
}
template <typename T>
GridView<const T> sample_grid(const Tensor<T>& t, std::int64_t b) {
  const std::int64_t tt = t.extent(1), u = t.extent(2);
  return {t.data() + b * tt * u, tt, u, u};
}

// ---------------------------------------------------------------------------
// Ops

/// Max-shifted log(sum(exp(x))) over a span. -inf inputs are absorbed.
template <typename T>
T logsumexp_span(std::span<const T> x) {
  T m = -std::numeric_limits<T>::infinity();
  for (T v : x) m = std::max(m, v);
  if (m == -std::numeric_limits<T>::infinity()) return m;
  T s = 0;
  for (T v : x) s += std::exp(v - m);
  return m + std::log(s);
}

/// Standard matrix product of [m,k] x [k,n] -> [m,n]. Per-cell summation
/// runs in ascending k.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b,
                 std::string_view tag = "matmul");

/// Reduces the last axis with logsumexp. Rank-1 input yields shape [1].
template <typename T>
Tensor<T> logsumexp_last(const Tensor<T>& t, std::string_view tag = "lse");

/// Copies the leading hyper-rectangle `prefixes` out of `t`.
template <typename T>
Tensor<T> crop(const Tensor<T>& t, const std::vector<std::int64_t>& prefixes,
               std::string_view tag = "crop");

}  // namespace swt
