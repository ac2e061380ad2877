// SPDX-License-Identifier: Apache-2.0

#include "swt/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <thread>

namespace swt {

const char* mode_name(EngineMode mode) {
  switch (mode) {
    case EngineMode::batched: return "batched";
    case EngineMode::sample_wise: return "sample_wise";
    case EngineMode::sample_wise_pr: return "sample_wise_pr";
    case EngineMode::sample_wise_pr_dp: return "sample_wise_pr_dp";
  }
  return "unknown";
}

EngineMode parse_mode(std::string_view name) {
  if (name == "batched") return EngineMode::batched;
  if (name == "sample_wise") return EngineMode::sample_wise;
  if (name == "sample_wise_pr") return EngineMode::sample_wise_pr;
  if (name == "sample_wise_pr_dp") return EngineMode::sample_wise_pr_dp;
  throw InvalidInputError("unknown engine mode '" + std::string(name) + "'");
}

int compute_parallel_iterations(std::int64_t frames, std::int64_t labels,
                                std::int64_t vocab,
                                std::int64_t budget_bytes) {
  if (frames < 1 || labels < 1 || vocab < 1) {
    throw InvalidInputError("parallel-iteration extents must be >= 1");
  }
  const unsigned __int128 base =
      4 * (unsigned __int128)(frames) * (unsigned __int128)(labels) *
      (unsigned __int128)(vocab);
  if (budget_bytes <= 0 || base > (unsigned __int128)(budget_bytes)) {
    return 1;
  }
  int exponent = 0;
  unsigned __int128 cur = base;
  while (exponent < 4 && cur * 2 <= (unsigned __int128)(budget_bytes)) {
    cur *= 2;
    ++exponent;
  }
  return 1 << exponent;
}

std::int64_t lattice_trio_bytes(const LatticeDims& d, Precision p) {
  const std::int64_t cells = d.frames * d.label_rows;
  return cells * (d.joint_dim + 2 * d.vocab) * bytes_per_element(p);
}

std::int64_t sample_working_bytes(const LatticeDims& d, Precision p) {
  const std::int64_t cells = d.frames * d.label_rows;
  std::int64_t elems = 0;
  elems += cells * (2 * d.joint_dim + 2 * d.vocab);  // joint/djoint, scores/dscores
  elems += 3 * cells;                                // log_den, alpha, beta
  elems += (d.frames + d.label_rows) * d.joint_dim;  // projections (also gates)
  elems += d.frames * d.acoustic_dim + d.label_rows * d.label_dim;  // crops
  elems += d.frames * d.acoustic_dim + d.label_rows * d.label_dim;  // dacoustic, dlabel
  elems += d.joint_dim * (d.acoustic_dim + d.label_dim + 1);        // joint grads
  elems += d.vocab * (d.joint_dim + 1);                             // output grads
  return elems * bytes_per_element(p);
}

namespace {

template <typename T>
void validate_step_inputs(const Batch<T>& batch, const JointParams<T>& jp,
                          const OutputParams<T>& op) {
  if (batch.acoustic.shape().rank() != 3 || batch.label.shape().rank() != 3 ||
      batch.acoustic.extent(0) != batch.label.extent(0)) {
    throw InvalidShapeError("batch encoding tensors are inconsistent");
  }
  const std::int64_t b = batch.batch_size();
  if (std::int64_t(batch.t_len.size()) != b ||
      std::int64_t(batch.u_len.size()) != b ||
      std::int64_t(batch.labels.size()) != b * batch.max_labels()) {
    throw InvalidShapeError("batch length/label arrays are inconsistent");
  }
  if (batch.acoustic_dim() != jp.acoustic_dim() ||
      batch.label_dim() != jp.label_dim() ||
      jp.joint_dim() != op.joint_dim()) {
    throw InvalidShapeError("parameter extents do not match the batch");
  }
  for (std::int64_t i = 0; i < b; ++i) {
    if (batch.t_len[i] < 1 || batch.t_len[i] > batch.max_frames() ||
        batch.u_len[i] < 0 || batch.u_len[i] > batch.max_labels()) {
      throw InvalidInputError("sample lengths outside the padded extents");
    }
  }
}

template <typename T>
GradientSet<T> make_gradient_set(const Batch<T>& batch,
                                 const JointParams<T>& jp,
                                 const OutputParams<T>& op) {
  return GradientSet<T>{
      Tensor<T>::zeros({jp.joint_dim(), jp.acoustic_dim()}, "dw_acoustic"),
      Tensor<T>::zeros({jp.joint_dim(), jp.label_dim()}, "dw_label"),
      Tensor<T>::zeros({jp.joint_dim()}, "dbias"),
      Tensor<T>::zeros({op.vocab(), op.joint_dim()}, "dw_out"),
      Tensor<T>::zeros({op.vocab()}, "dbias_out"),
      Tensor<T>::zeros(
          {batch.batch_size(), batch.max_frames(), batch.acoustic_dim()},
          "dacoustic"),
      Tensor<T>::zeros(
          {batch.batch_size(), batch.label_rows(), batch.label_dim()},
          "dlabel")};
}

template <typename T>
SampleGradients<T> make_sample_gradients(std::int64_t b, std::int64_t frames,
                                         std::int64_t rows,
                                         const JointParams<T>& jp,
                                         const OutputParams<T>& op) {
  SampleGradients<T> sg;
  sg.index = b;
  sg.dw_acoustic =
      Tensor<T>::zeros({jp.joint_dim(), jp.acoustic_dim()}, "sample_dw_acoustic");
  sg.dw_label =
      Tensor<T>::zeros({jp.joint_dim(), jp.label_dim()}, "sample_dw_label");
  sg.dbias = Tensor<T>::zeros({jp.joint_dim()}, "sample_dbias");
  sg.dw_out = Tensor<T>::zeros({op.vocab(), op.joint_dim()}, "sample_dw_out");
  sg.dbias_out = Tensor<T>::zeros({op.vocab()}, "sample_dbias_out");
  sg.dacoustic = Tensor<T>::zeros({frames, jp.acoustic_dim()}, "sample_dacoustic");
  sg.dlabel = Tensor<T>::zeros({rows, jp.label_dim()}, "sample_dlabel");
  return sg;
}

/// Leading-row copy of a sample view (the padding-removal slice).
template <typename T>
Tensor<T> crop_rows(MatrixView<const T> m, std::int64_t rows,
                    std::string_view tag) {
  Tensor<T> out = Tensor<T>::zeros({rows, m.cols}, tag);
  for (std::int64_t r = 0; r < rows; ++r) {
    std::copy(m.row(r), m.row(r) + m.cols, out.data() + r * m.cols);
  }
  return out;
}

/// Runs one sample through joint network, output layer, loss, and the two
/// backward passes. `scores_view`/`joint_view` etc. cover the computed
/// extents; the loss only ever touches the valid (t_len, u_len + 1)
/// sub-lattice.
template <typename T>
SampleGradients<T> process_sample(const Batch<T>& batch,
                                  const JointParams<T>& jp,
                                  const OutputParams<T>& op, std::int64_t b,
                                  bool padding_removal) {
  const std::int64_t valid_frames = batch.t_len[b];
  const std::int64_t valid_rows = batch.u_len[b] + 1;
  const std::int64_t frames = padding_removal ? valid_frames : batch.max_frames();
  const std::int64_t rows = padding_removal ? valid_rows : batch.label_rows();

  MatrixView<const T> acoustic = sample_matrix(batch.acoustic, b);
  MatrixView<const T> label = sample_matrix(batch.label, b);
  Tensor<T> acoustic_crop, label_crop;
  if (padding_removal && frames < batch.max_frames()) {
    acoustic_crop = crop_rows(acoustic, frames, "acoustic_crop");
    acoustic = matrix_view(std::as_const(acoustic_crop));
  } else {
    acoustic.rows = frames;
  }
  if (padding_removal && rows < batch.label_rows()) {
    label_crop = crop_rows(label, rows, "label_crop");
    label = matrix_view(std::as_const(label_crop));
  } else {
    label.rows = rows;
  }

  Tensor<T> joint = Tensor<T>::zeros({frames, rows, jp.joint_dim()}, "joint");
  joint_forward_kernel<T>(acoustic, label, jp, lattice_view(joint));

  Tensor<T> scores = Tensor<T>::zeros({frames, rows, op.vocab()}, "scores");
  output_forward_kernel<T>(lattice_view(joint), op, lattice_view(scores));

  const LatticeView<const T> valid_scores =
      lattice_view(std::as_const(scores)).sub(valid_frames, valid_rows);
  Tensor<T> log_den = Tensor<T>::zeros({valid_frames, valid_rows}, "log_den");
  Tensor<T> alpha = Tensor<T>::zeros({valid_frames, valid_rows}, "alpha");
  Tensor<T> beta = Tensor<T>::zeros({valid_frames, valid_rows}, "beta");
  log_denominator_kernel<T>(valid_scores, grid_view(log_den));
  forward_backward_kernel<T>(valid_scores, grid_view(std::as_const(log_den)),
                             batch.sample_labels(b), grid_view(alpha),
                             grid_view(beta));
  const T sample_loss = loss_value(beta);

  Tensor<T> dscores = Tensor<T>::zeros({frames, rows, op.vocab()}, "dscores");
  loss_gradient_kernel<T>(valid_scores, grid_view(std::as_const(log_den)),
                          grid_view(std::as_const(alpha)),
                          grid_view(std::as_const(beta)),
                          batch.sample_labels(b),
                          lattice_view(dscores).sub(valid_frames, valid_rows));

  SampleGradients<T> sg = make_sample_gradients(b, frames, rows, jp, op);
  sg.loss = sample_loss;

  Tensor<T> djoint = Tensor<T>::zeros({frames, rows, jp.joint_dim()}, "djoint");
  output_backward_kernel<T>(lattice_view(std::as_const(dscores)),
                            lattice_view(std::as_const(joint)), op,
                            lattice_view(djoint), sg.dw_out.span(),
                            sg.dbias_out.span());
  joint_backward_kernel<T>(lattice_view(std::as_const(djoint)),
                           lattice_view(std::as_const(joint)), acoustic, label,
                           jp, matrix_view(sg.dacoustic),
                           matrix_view(sg.dlabel), sg.dw_acoustic.span(),
                           sg.dw_label.span(), sg.dbias.span());
  return sg;  // all per-sample intermediates are released on return
}

template <typename T>
void add_into(Tensor<T>& acc, const Tensor<T>& term) {
  T* a = acc.data();
  const T* t = term.data();
  for (std::int64_t i = 0; i < acc.size(); ++i) a[i] += t[i];
}

}  // namespace

template <typename T>
void accumulate(GradientSet<T>& grads, const SampleGradients<T>& sg) {
  add_into(grads.dw_acoustic, sg.dw_acoustic);
  add_into(grads.dw_label, sg.dw_label);
  add_into(grads.dbias, sg.dbias);
  add_into(grads.dw_out, sg.dw_out);
  add_into(grads.dbias_out, sg.dbias_out);
  // Encoder-input gradients land in their sample's slot, no summation.
  MatrixView<T> dst_a = sample_matrix(grads.dacoustic, sg.index);
  for (std::int64_t r = 0; r < sg.dacoustic.extent(0); ++r) {
    std::copy(sg.dacoustic.data() + r * dst_a.cols,
              sg.dacoustic.data() + (r + 1) * dst_a.cols, dst_a.row(r));
  }
  MatrixView<T> dst_l = sample_matrix(grads.dlabel, sg.index);
  for (std::int64_t r = 0; r < sg.dlabel.extent(0); ++r) {
    std::copy(sg.dlabel.data() + r * dst_l.cols,
              sg.dlabel.data() + (r + 1) * dst_l.cols, dst_l.row(r));
  }
}

template <typename T>
StepResult<T> run_batched(const Batch<T>& batch, const JointParams<T>& jp,
                          const OutputParams<T>& op) {
  validate_step_inputs(batch, jp, op);
  const std::int64_t n = batch.batch_size();
  const std::int64_t frames = batch.max_frames();
  const std::int64_t rows = batch.label_rows();

  // Full padded-extent batched activations.
  Tensor<T> joint =
      Tensor<T>::zeros({n, frames, rows, jp.joint_dim()}, "joint");
  for (std::int64_t b = 0; b < n; ++b) {
    joint_forward_kernel<T>(sample_matrix(batch.acoustic, b),
                            sample_matrix(batch.label, b), jp,
                            sample_lattice(joint, b));
  }
  Tensor<T> scores =
      Tensor<T>::zeros({n, frames, rows, op.vocab()}, "scores");
  for (std::int64_t b = 0; b < n; ++b) {
    output_forward_kernel<T>(sample_lattice(std::as_const(joint), b), op,
                             sample_lattice(scores, b));
  }

  // Loss over each sample's true sub-lattice only.
  Tensor<T> log_den = Tensor<T>::zeros({n, frames, rows}, "log_den");
  Tensor<T> alpha = Tensor<T>::zeros({n, frames, rows}, "alpha");
  Tensor<T> beta = Tensor<T>::zeros({n, frames, rows}, "beta");
  StepResult<T> result;
  result.sample_losses.resize(size_t(n));
  for (std::int64_t b = 0; b < n; ++b) {
    const std::int64_t tb = batch.t_len[b], ub1 = batch.u_len[b] + 1;
    const auto valid_scores =
        sample_lattice(std::as_const(scores), b).sub(tb, ub1);
    auto den = sample_grid(log_den, b).sub(tb, ub1);
    auto a = sample_grid(alpha, b).sub(tb, ub1);
    auto bb = sample_grid(beta, b).sub(tb, ub1);
    log_denominator_kernel<T>(valid_scores, den);
    forward_backward_kernel<T>(valid_scores, den, batch.sample_labels(b), a,
                               bb);
    const T log_z = bb.at(0, 0);
    if (!std::isfinite(log_z)) {
      throw NumericalDegeneracyError("no alignment path carries mass");
    }
    result.sample_losses[size_t(b)] = -log_z;
  }

  Tensor<T> dscores =
      Tensor<T>::zeros({n, frames, rows, op.vocab()}, "dscores");
  for (std::int64_t b = 0; b < n; ++b) {
    const std::int64_t tb = batch.t_len[b], ub1 = batch.u_len[b] + 1;
    loss_gradient_kernel<T>(
        sample_lattice(std::as_const(scores), b).sub(tb, ub1),
        sample_grid(std::as_const(log_den), b).sub(tb, ub1),
        sample_grid(std::as_const(alpha), b).sub(tb, ub1),
        sample_grid(std::as_const(beta), b).sub(tb, ub1),
        batch.sample_labels(b), sample_lattice(dscores, b).sub(tb, ub1));
  }

  Tensor<T> djoint =
      Tensor<T>::zeros({n, frames, rows, jp.joint_dim()}, "djoint");
  result.grads = make_gradient_set(batch, jp, op);
  for (std::int64_t b = 0; b < n; ++b) {
    SampleGradients<T> sg = make_sample_gradients(b, frames, rows, jp, op);
    sg.loss = result.sample_losses[size_t(b)];
    output_backward_kernel<T>(sample_lattice(std::as_const(dscores), b),
                              sample_lattice(std::as_const(joint), b), op,
                              sample_lattice(djoint, b), sg.dw_out.span(),
                              sg.dbias_out.span());
    joint_backward_kernel<T>(
        sample_lattice(std::as_const(djoint), b),
        sample_lattice(std::as_const(joint), b),
        sample_matrix(batch.acoustic, b), sample_matrix(batch.label, b), jp,
        matrix_view(sg.dacoustic), matrix_view(sg.dlabel),
        sg.dw_acoustic.span(), sg.dw_label.span(), sg.dbias.span());
    accumulate(result.grads, sg);
    result.loss += sg.loss;
  }
  return result;
}

template <typename T>
StepResult<T> run_sample_wise(const Batch<T>& batch, const JointParams<T>& jp,
                              const OutputParams<T>& op,
                              const EngineConfig& cfg) {
  validate_step_inputs(batch, jp, op);
  const bool padding_removal = cfg.mode == EngineMode::sample_wise_pr ||
                               cfg.mode == EngineMode::sample_wise_pr_dp;
  const std::int64_t n = batch.batch_size();

  std::int64_t group = 1;
  if (cfg.mode == EngineMode::sample_wise_pr_dp) {
    if (cfg.max_parallel < 1 || cfg.max_parallel > 16 ||
        !std::has_single_bit(unsigned(cfg.max_parallel))) {
      throw InvalidInputError("max_parallel must be a power of two in 1..16");
    }
    std::int64_t max_frames = 1, max_labels = 0;
    for (std::int64_t b = 0; b < n; ++b) {
      max_frames = std::max(max_frames, batch.t_len[b]);
      max_labels = std::max(max_labels, batch.u_len[b]);
    }
    // The budget guards the score lattice actually allocated, which has
    // max_labels + 1 rows; the literal flag reproduces the raw-label reading.
    const std::int64_t label_extent =
        cfg.literal_pi_extents ? std::max<std::int64_t>(max_labels, 1)
                               : max_labels + 1;
    group = compute_parallel_iterations(max_frames, label_extent, op.vocab(),
                                        cfg.mem_budget_bytes);
    group = std::min<std::int64_t>(group, cfg.max_parallel);
  }

  StepResult<T> result;
  result.grads = make_gradient_set(batch, jp, op);
  result.sample_losses.resize(size_t(n));

  for (std::int64_t start = 0; start < n; start += group) {
    const std::int64_t count = std::min(group, n - start);
    std::vector<SampleGradients<T>> chunk(static_cast<std::size_t>(count));
    const int workers =
        int(std::min<std::int64_t>(count, std::max(cfg.worker_count, 1)));
    if (workers <= 1) {
      for (std::int64_t i = 0; i < count; ++i) {
        chunk[size_t(i)] =
            process_sample(batch, jp, op, start + i, padding_removal);
      }
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
      pool.reserve(size_t(workers));
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::int64_t i = w; i < count; i += workers) {
              chunk[size_t(i)] =
                  process_sample(batch, jp, op, start + i, padding_removal);
            }
          } catch (...) {
            errors[size_t(w)] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }
    // Ordered reduction: ascending sample index, bitwise reproducible.
    for (std::int64_t i = 0; i < count; ++i) {
      accumulate(result.grads, chunk[size_t(i)]);
      result.sample_losses[size_t(start + i)] = chunk[size_t(i)].loss;
      result.loss += chunk[size_t(i)].loss;
    }
  }
  return result;
}

template <typename T>
StepResult<T> run_step(const Batch<T>& batch, const JointParams<T>& jp,
                       const OutputParams<T>& op, const EngineConfig& cfg) {
  if (cfg.mode == EngineMode::batched) {
    return run_batched(batch, jp, op);
  }
  return run_sample_wise(batch, jp, op, cfg);
}

#define SWT_INSTANTIATE_ENGINE(T)                                             \
  template void accumulate<T>(GradientSet<T>&, const SampleGradients<T>&);    \
  template StepResult<T> run_batched<T>(const Batch<T>&,                      \
                                        const JointParams<T>&,               \
                                        const OutputParams<T>&);             \
  template StepResult<T> run_sample_wise<T>(const Batch<T>&,                  \
                                            const JointParams<T>&,           \
                                            const OutputParams<T>&,          \
                                            const EngineConfig&);            \
  template StepResult<T> run_step<T>(const Batch<T>&, const JointParams<T>&, \
                                     const OutputParams<T>&,                 \
                                     const EngineConfig&);

SWT_INSTANTIATE_ENGINE(float)
SWT_INSTANTIATE_ENGINE(double)

}  // namespace swt
