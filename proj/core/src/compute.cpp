// SPDX-License-Identifier: Apache-2.0

#include "swt/compute.hpp"

#include <cmath>

namespace swt {

namespace {

template <typename T>
void check_joint_shapes(MatrixView<const T> acoustic, MatrixView<const T> label,
                        const JointParams<T>& jp) {
  if (acoustic.cols != jp.acoustic_dim() || label.cols != jp.label_dim() ||
      jp.w_acoustic.extent(0) != jp.joint_dim() ||
      jp.w_label.extent(0) != jp.joint_dim()) {
    throw InvalidShapeError("joint network operand extents are inconsistent");
  }
  if (acoustic.rows < 1 || label.rows < 1) {
    throw InvalidShapeError("encodings need at least one row per axis");
  }
}

/// proj[i] = W rows[i] for every row: [n, in] x [out, in]^T -> [n, out].
template <typename T>
Tensor<T> project(MatrixView<const T> rows, const Tensor<T>& w,
                  std::string_view tag) {
  const std::int64_t n = rows.rows, in = rows.cols, out = w.extent(0);
  Tensor<T> proj = Tensor<T>::zeros({n, out}, tag);
  T* dst = proj.data();
  for (std::int64_t i = 0; i < n; ++i) {
    const T* r = rows.row(i);
    for (std::int64_t o = 0; o < out; ++o) {
      const T* wrow = w.data() + o * in;
      T acc = 0;
      for (std::int64_t k = 0; k < in; ++k) acc += wrow[k] * r[k];
      dst[i * out + o] = acc;
    }
  }
  return proj;
}

}  // namespace

template <typename T>
void joint_forward_kernel(MatrixView<const T> acoustic,
                          MatrixView<const T> label, const JointParams<T>& jp,
                          LatticeView<T> joint) {
  check_joint_shapes(acoustic, label, jp);
  const std::int64_t frames = joint.t_extent, label_rows = joint.u_extent;
  const std::int64_t h = jp.joint_dim();
  Tensor<T> proj_a = project<T>(acoustic, jp.w_acoustic, "proj_acoustic");
  Tensor<T> proj_l = project<T>(label, jp.w_label, "proj_label");
  const T* pa = proj_a.data();
  const T* pl = proj_l.data();
  const T* bias = jp.bias.data();
  for (std::int64_t t = 0; t < frames; ++t) {
    const T* at = pa + t * h;
    for (std::int64_t u = 0; u < label_rows; ++u) {
      const T* lu = pl + u * h;
      T* cell = joint.cell(t, u);
      for (std::int64_t k = 0; k < h; ++k) {
        cell[k] = std::tanh(at[k] + lu[k] + bias[k]);
      }
    }
  }
}

template <typename T>
void output_forward_kernel(LatticeView<const T> joint,
                           const OutputParams<T>& op, LatticeView<T> scores) {
  if (joint.feat != op.joint_dim() || scores.feat != op.vocab()) {
    throw InvalidShapeError("output layer operand extents are inconsistent");
  }
  const std::int64_t h = op.joint_dim(), v = op.vocab();
  const T* w = op.w_out.data();
  const T* bias = op.bias_out.data();
  for (std::int64_t t = 0; t < scores.t_extent; ++t) {
    for (std::int64_t u = 0; u < scores.u_extent; ++u) {
      const T* z = joint.cell(t, u);
      T* out = scores.cell(t, u);
      for (std::int64_t k = 0; k < v; ++k) {
        const T* wrow = w + k * h;
        T acc = bias[k];
        for (std::int64_t j = 0; j < h; ++j) acc += wrow[j] * z[j];
        out[k] = acc;
      }
    }
  }
}

template <typename T>
void output_backward_kernel(LatticeView<const T> dscores,
                            LatticeView<const T> joint,
                            const OutputParams<T>& op, LatticeView<T> djoint,
                            std::span<T> dw_out, std::span<T> dbias_out) {
  const std::int64_t h = op.joint_dim(), v = op.vocab();
  if (dscores.feat != v || joint.feat != h || djoint.feat != h ||
      std::int64_t(dw_out.size()) != v * h ||
      std::int64_t(dbias_out.size()) != v) {
    throw InvalidShapeError("output backward operand extents are inconsistent");
  }
  const T* w = op.w_out.data();
  for (std::int64_t t = 0; t < dscores.t_extent; ++t) {
    for (std::int64_t u = 0; u < dscores.u_extent; ++u) {
      const T* dh = dscores.cell(t, u);
      const T* z = joint.cell(t, u);
      T* dz = djoint.cell(t, u);
      for (std::int64_t j = 0; j < h; ++j) dz[j] = 0;
      for (std::int64_t k = 0; k < v; ++k) {
        const T g = dh[k];
        dbias_out[k] += g;
        T* dwrow = dw_out.data() + k * h;
        const T* wrow = w + k * h;
        for (std::int64_t j = 0; j < h; ++j) {
          dwrow[j] += g * z[j];
          dz[j] += g * wrow[j];
        }
      }
    }
  }
}

template <typename T>
void joint_backward_kernel(LatticeView<const T> djoint,
                           LatticeView<const T> joint,
                           MatrixView<const T> acoustic,
                           MatrixView<const T> label,
                           const JointParams<T>& jp, MatrixView<T> dacoustic,
                           MatrixView<T> dlabel, std::span<T> dw_acoustic,
                           std::span<T> dw_label, std::span<T> dbias) {
  check_joint_shapes(acoustic, label, jp);
  const std::int64_t frames = djoint.t_extent, label_rows = djoint.u_extent;
  const std::int64_t h = jp.joint_dim();
  const std::int64_t ha = jp.acoustic_dim(), hl = jp.label_dim();
  if (djoint.feat != h || joint.feat != h || dacoustic.cols != ha ||
      dlabel.cols != hl || std::int64_t(dbias.size()) != h) {
    throw InvalidShapeError("joint backward operand extents are inconsistent");
  }

  // Tanh-gated gradients summed over each axis: ga[t] = sum_u g[t,u],
  // gl[u] = sum_t g[t,u] with g = djoint * (1 - joint^2).
  Tensor<T> ga = Tensor<T>::zeros({frames, h}, "gate_frames");
  Tensor<T> gl = Tensor<T>::zeros({label_rows, h}, "gate_labels");
  for (std::int64_t t = 0; t < frames; ++t) {
    T* ga_row = ga.data() + t * h;
    for (std::int64_t u = 0; u < label_rows; ++u) {
      const T* dz = djoint.cell(t, u);
      const T* z = joint.cell(t, u);
      T* gl_row = gl.data() + u * h;
      for (std::int64_t k = 0; k < h; ++k) {
        const T g = dz[k] * (T(1) - z[k] * z[k]);
        ga_row[k] += g;
        gl_row[k] += g;
      }
    }
  }

  const T* wa = jp.w_acoustic.data();
  const T* wl = jp.w_label.data();
  for (std::int64_t t = 0; t < frames; ++t) {
    const T* g = ga.data() + t * h;
    const T* a = acoustic.row(t);
    T* da = dacoustic.row(t);
    for (std::int64_t k = 0; k < ha; ++k) da[k] = 0;
    for (std::int64_t j = 0; j < h; ++j) {
      const T gj = g[j];
      dbias[j] += gj;
      const T* warow = wa + j * ha;
      T* dwrow = dw_acoustic.data() + j * ha;
      for (std::int64_t k = 0; k < ha; ++k) {
        da[k] += gj * warow[k];
        dwrow[k] += gj * a[k];
      }
    }
  }
  for (std::int64_t u = 0; u < label_rows; ++u) {
    const T* g = gl.data() + u * h;
    const T* l = label.row(u);
    T* dl = dlabel.row(u);
    for (std::int64_t k = 0; k < hl; ++k) dl[k] = 0;
    for (std::int64_t j = 0; j < h; ++j) {
      const T gj = g[j];
      const T* wlrow = wl + j * hl;
      T* dwrow = dw_label.data() + j * hl;
      for (std::int64_t k = 0; k < hl; ++k) {
        dl[k] += gj * wlrow[k];
        dwrow[k] += gj * l[k];
      }
    }
  }
}

template <typename T>
Tensor<T> joint_forward(const SampleEncodings<T>& enc,
                        const JointParams<T>& jp) {
  Tensor<T> joint = Tensor<T>::zeros(
      {enc.acoustic.rows, enc.label.rows, jp.joint_dim()}, "joint");
  joint_forward_kernel<T>(enc.acoustic, enc.label, jp, lattice_view(joint));
  return joint;
}

template <typename T>
Tensor<T> output_forward(const Tensor<T>& joint, const OutputParams<T>& op) {
  Tensor<T> scores = Tensor<T>::zeros(
      {joint.extent(0), joint.extent(1), op.vocab()}, "scores");
  output_forward_kernel<T>(lattice_view(joint), op, lattice_view(scores));
  return scores;
}

template <typename T>
OutputBackwardResult<T> output_backward(const Tensor<T>& dscores,
                                        const Tensor<T>& joint,
                                        const OutputParams<T>& op) {
  OutputBackwardResult<T> r{
      Tensor<T>::zeros({dscores.extent(0), dscores.extent(1), op.joint_dim()},
                       "djoint"),
      Tensor<T>::zeros({op.vocab(), op.joint_dim()}, "dw_out"),
      Tensor<T>::zeros({op.vocab()}, "dbias_out")};
  output_backward_kernel<T>(lattice_view(dscores), lattice_view(joint), op,
                            lattice_view(r.djoint), r.dw_out.span(),
                            r.dbias_out.span());
  return r;
}

template <typename T>
JointBackwardResult<T> joint_backward(const Tensor<T>& djoint,
                                      const Tensor<T>& joint,
                                      const SampleEncodings<T>& enc,
                                      const JointParams<T>& jp) {
  JointBackwardResult<T> r{
      Tensor<T>::zeros({enc.acoustic.rows, jp.acoustic_dim()}, "dacoustic"),
      Tensor<T>::zeros({enc.label.rows, jp.label_dim()}, "dlabel"),
      Tensor<T>::zeros({jp.joint_dim(), jp.acoustic_dim()}, "dw_acoustic"),
      Tensor<T>::zeros({jp.joint_dim(), jp.label_dim()}, "dw_label"),
      Tensor<T>::zeros({jp.joint_dim()}, "dbias")};
  joint_backward_kernel<T>(lattice_view(djoint), lattice_view(joint),
                           enc.acoustic, enc.label, jp, matrix_view(r.dacoustic),
                           matrix_view(r.dlabel), r.dw_acoustic.span(),
                           r.dw_label.span(), r.dbias.span());
  return r;
}

#define SWT_INSTANTIATE_COMPUTE(T)                                            \
  template void joint_forward_kernel<T>(MatrixView<const T>,                  \
                                        MatrixView<const T>,                  \
                                        const JointParams<T>&, LatticeView<T>); \
  template void output_forward_kernel<T>(LatticeView<const T>,                \
                                         const OutputParams<T>&,              \
                                         LatticeView<T>);                     \
  template void output_backward_kernel<T>(                                    \
      LatticeView<const T>, LatticeView<const T>, const OutputParams<T>&,     \
      LatticeView<T>, std::span<T>, std::span<T>);                            \
  template void joint_backward_kernel<T>(                                     \
      LatticeView<const T>, LatticeView<const T>, MatrixView<const T>,        \
      MatrixView<const T>, const JointParams<T>&, MatrixView<T>,              \
      MatrixView<T>, std::span<T>, std::span<T>, std::span<T>);               \
  template Tensor<T> joint_forward<T>(const SampleEncodings<T>&,              \
                                      const JointParams<T>&);                 \
  template Tensor<T> output_forward<T>(const Tensor<T>&,                      \
                                       const OutputParams<T>&);               \
  template OutputBackwardResult<T> output_backward<T>(                        \
      const Tensor<T>&, const Tensor<T>&, const OutputParams<T>&);            \
  template JointBackwardResult<T> joint_backward<T>(                          \
      const Tensor<T>&, const Tensor<T>&, const SampleEncodings<T>&,          \
      const JointParams<T>&);

SWT_INSTANTIATE_COMPUTE(float)
SWT_INSTANTIATE_COMPUTE(double)

}  // namespace swt
