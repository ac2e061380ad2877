// SPDX-License-Identifier: Apache-2.0

#include "swt/verify.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "swt/bench.hpp"
#include "swt/engine.hpp"
#include "swt/oracle.hpp"
#include "swt/rng.hpp"

namespace swt {

VerifyScale parse_scale(std::string_view name) {
  if (name == "small") return VerifyScale::small;
  if (name == "medium") return VerifyScale::medium;
  throw InvalidInputError("unknown verify scale '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kSeedBase = 0x5eed0000;

template <typename T>
double max_rel_diff(const Tensor<T>& a, const Tensor<T>& b) {
  double worst = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double x = double(a.data()[i]), y = double(b.data()[i]);
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    if (x != y) worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

template <typename T>
bool bitwise_equal(const Tensor<T>& a, const Tensor<T>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), size_t(a.bytes())) == 0;
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
  worst = std::max(worst, std::abs(la - lb) /
                              std::max({std::abs(la), std::abs(lb), 1e-300}));
  return worst;
}

struct LossInstance {
  Tensor<double> scores;
  LabelSequence y;
};

LossInstance random_loss_instance(Rng& rng, std::int64_t max_frames,
                                  std::int64_t max_labels,
                                  std::int64_t max_vocab) {
  const std::int64_t frames = rng.uniform_int(1, max_frames + 1);
  const std::int64_t labels = rng.uniform_int(0, max_labels + 1);
  const std::int64_t vocab = rng.uniform_int(2, max_vocab + 1);
  LossInstance inst;
  inst.scores = Tensor<double>::zeros({frames, labels + 1, vocab}, "scores");
  rng.fill_uniform(inst.scores, -2.0, 2.0);
  std::vector<std::int32_t> y(static_cast<std::size_t>(labels));
  for (auto& l : y) l = std::int32_t(rng.uniform_int(1, vocab));
  inst.y = LabelSequence(std::move(y));
  return inst;
}

template <typename T>
BenchInputs<T> random_ragged_inputs(std::uint64_t seed) {
  Rng dims(seed);
  BenchConfig cfg;
  cfg.batch_size = dims.uniform_int(1, 9);
  cfg.max_frames = dims.uniform_int(1, 13);
  cfg.max_labels = dims.uniform_int(1, 6);
  cfg.joint_dim = dims.uniform_int(1, 9);
  cfg.acoustic_dim = dims.uniform_int(1, 7);
  cfg.label_dim = dims.uniform_int(1, 7);
  cfg.vocab = dims.uniform_int(2, 7);
  cfg.seed = seed;
  BenchInputs<T> in = synth_inputs<T>(cfg);
  // Replace the benchmark ramp with fully random ragged lengths.
  for (std::int64_t b = 0; b < cfg.batch_size; ++b) {
    in.batch.t_len[size_t(b)] = dims.uniform_int(1, cfg.max_frames + 1);
    in.batch.u_len[size_t(b)] = dims.uniform_int(0, cfg.max_labels + 1);
  }
  // Re-zero the padded regions for the new lengths and refresh labels.
  for (std::int64_t b = 0; b < cfg.batch_size; ++b) {
    T* a = in.batch.acoustic.data() + b * cfg.max_frames * cfg.acoustic_dim;
    std::fill(a + in.batch.t_len[size_t(b)] * cfg.acoustic_dim,
              a + cfg.max_frames * cfg.acoustic_dim, T(0));
    T* l =
        in.batch.label.data() + b * (cfg.max_labels + 1) * cfg.label_dim;
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


SuiteResult suite_loss_oracle(int cases) {
  SuiteResult suite{"loss-oracle", true, cases, ""};
  for (int i = 0; i < cases; ++i) {
    Rng rng(kSeedBase + std::uint64_t(i));
    LossInstance inst = random_loss_instance(rng, 5, 3, 4);
    const Tensor<double> log_den = log_denominator(inst.scores);
    auto [alpha, beta] = forward_backward(inst.scores, log_den, inst.y);
    const double engine_loss = loss_value(beta);
    const double oracle_loss =
        oracle::enumerate_paths_loss(inst.scores, log_den, inst.y);
    const double rel = std::abs(engine_loss - oracle_loss) /
                       std::max(std::abs(oracle_loss), 1e-300);
    if (rel > 1e-9) {
      suite.passed = false;
      std::ostringstream os;
      os << "case " << i << " (seed " << kSeedBase + std::uint64_t(i)
         << "): engine " << engine_loss << " vs oracle " << oracle_loss;
      suite.detail = os.str();
      break;
    }
  }
  return suite;
}

bool grads_match_fd(const Tensor<double>& analytic, const Tensor<double>& fd,
                    std::string* why) {
  for (std::int64_t i = 0; i < analytic.size(); ++i) {
    const double g = analytic.data()[i], f = fd.data()[i];
    if (std::abs(g - f) > oracle::grad_tolerance(g)) {
      if (why != nullptr) {
        std::ostringstream os;
        os << "element " << i << ": analytic " << g << " vs fd " << f;
        *why = os.str();
      }
      return false;
    }
  }
  return true;
}

SuiteResult suite_finite_diff(int cases) {
  SuiteResult suite{"finite-diff", true, cases, ""};
  for (int i = 0; i < cases && suite.passed; ++i) {
    Rng rng(kSeedBase + 1000 + std::uint64_t(i));
    const std::int64_t frames = rng.uniform_int(1, 4);
    const std::int64_t labels = rng.uniform_int(0, 3);
    const std::int64_t rows = labels + 1;
    const std::int64_t h = rng.uniform_int(1, 5);
    const std::int64_t enc = rng.uniform_int(1, 4);
    const std::int64_t vocab = rng.uniform_int(2, 5);

    std::vector<std::int32_t> yv(static_cast<std::size_t>(labels));
    for (auto& l : yv) l = std::int32_t(rng.uniform_int(1, vocab));
    const LabelSequence y(std::move(yv));

    std::string why;
    {
      // Full loss pipeline w.r.t. the output scores.
      Tensor<double> scores =
          Tensor<double>::zeros({frames, rows, vocab}, "scores");
      rng.fill_uniform(scores, -2.0, 2.0);
      const Tensor<double> log_den = log_denominator(scores);
      auto [alpha, beta] = forward_backward(scores, log_den, y);
      const Tensor<double> analytic =
          loss_gradient(scores, log_den, alpha, beta, y);
      const Tensor<double> fd = oracle::finite_diff(
          [&](const Tensor<double>& s) {
            const Tensor<double> den = log_denominator(s);
            auto ab = forward_backward(s, den, y);
            return loss_value(ab.second);
          },
          scores);
      if (!grads_match_fd(analytic, fd, &why)) {
        suite.passed = false;
        suite.detail = "loss_gradient case " + std::to_string(i) + ": " + why;
        break;
      }
    }

    // Probe sum(c * forward(...)) for the two layer backward passes.
    JointParams<double> jp{Tensor<double>::zeros({h, enc}, "w_a"),
                           Tensor<double>::zeros({h, enc}, "w_l"),
                           Tensor<double>::zeros({h}, "b")};
    rng.fill_uniform(jp.w_acoustic, -1.0, 1.0);
    rng.fill_uniform(jp.w_label, -1.0, 1.0);
    rng.fill_uniform(jp.bias, -1.0, 1.0);
    OutputParams<double> op{Tensor<double>::zeros({vocab, h}, "w_o"),
                            Tensor<double>::zeros({vocab}, "b_o")};
    rng.fill_uniform(op.w_out, -1.0, 1.0);
    rng.fill_uniform(op.bias_out, -1.0, 1.0);
    Tensor<double> h_acoustic = Tensor<double>::zeros({frames, enc}, "h_a");
    Tensor<double> h_label = Tensor<double>::zeros({rows, enc}, "h_l");
    rng.fill_uniform(h_acoustic, -1.0, 1.0);
    rng.fill_uniform(h_label, -1.0, 1.0);
    Tensor<double> probe_scores =
        Tensor<double>::zeros({frames, rows, vocab}, "probe_scores");
    rng.fill_uniform(probe_scores, -1.0, 1.0);
    Tensor<double> probe_joint =
        Tensor<double>::zeros({frames, rows, h}, "probe_joint");
    rng.fill_uniform(probe_joint, -1.0, 1.0);

    const SampleEncodings<double> encs{matrix_view(std::as_const(h_acoustic)),
                                       matrix_view(std::as_const(h_label))};
    const Tensor<double> joint = joint_forward(encs, jp);
    const auto out_back = output_backward(probe_scores, joint, op);

    auto probe_output = [&](const Tensor<double>& w, const Tensor<double>& b,
                            const Tensor<double>& z) {
      OutputParams<double> p{w.clone(), b.clone()};
      const Tensor<double> s = output_forward(z, p);
      double acc = 0;
      for (std::int64_t k = 0; k < s.size(); ++k)
        acc += probe_scores.data()[k] * s.data()[k];
      return acc;
    };
    const Tensor<double> fd_w_out = oracle::finite_diff(
        [&](const Tensor<double>& w) {
          return probe_output(w, op.bias_out, joint);
        },
        op.w_out);
    const Tensor<double> fd_b_out = oracle::finite_diff(
        [&](const Tensor<double>& b) { return probe_output(op.w_out, b, joint); },
        op.bias_out);
    const Tensor<double> fd_joint = oracle::finite_diff(
        [&](const Tensor<double>& z) {
          return probe_output(op.w_out, op.bias_out, z);
        },
        joint);
    if (!grads_match_fd(out_back.dw_out, fd_w_out, &why) ||
        !grads_match_fd(out_back.dbias_out, fd_b_out, &why) ||
        !grads_match_fd(out_back.djoint, fd_joint, &why)) {
      suite.passed = false;
      suite.detail = "output_backward case " + std::to_string(i) + ": " + why;
      break;
    }

    const auto joint_back = joint_backward(probe_joint, joint, encs, jp);
    auto probe_joint_fn = [&](const JointParams<double>& p,
                              const Tensor<double>& a,
                              const Tensor<double>& l) {
      const SampleEncodings<double> e{matrix_view(std::as_const(a)),
                                      matrix_view(std::as_const(l))};
      const Tensor<double> z = joint_forward(e, p);
      double acc = 0;
      for (std::int64_t k = 0; k < z.size(); ++k)
        acc += probe_joint.data()[k] * z.data()[k];
      return acc;
    };
    const Tensor<double> fd_w_a = oracle::finite_diff(
        [&](const Tensor<double>& w) {
          JointParams<double> p{w.clone(), jp.w_label.clone(), jp.bias.clone()};
          return probe_joint_fn(p, h_acoustic, h_label);
        },
        jp.w_acoustic);
    const Tensor<double> fd_w_l = oracle::finite_diff(
        [&](const Tensor<double>& w) {
          JointParams<double> p{jp.w_acoustic.clone(), w.clone(),
                                jp.bias.clone()};
          return probe_joint_fn(p, h_acoustic, h_label);
        },
        jp.w_label);
    const Tensor<double> fd_bias = oracle::finite_diff(
        [&](const Tensor<double>& b) {
          JointParams<double> p{jp.w_acoustic.clone(), jp.w_label.clone(),
                                b.clone()};
          return probe_joint_fn(p, h_acoustic, h_label);
        },
        jp.bias);
    const Tensor<double> fd_h_a = oracle::finite_diff(
        [&](const Tensor<double>& a) { return probe_joint_fn(jp, a, h_label); },
        h_acoustic);
    const Tensor<double> fd_h_l = oracle::finite_diff(
        [&](const Tensor<double>& l) {
          return probe_joint_fn(jp, h_acoustic, l);
        },
        h_label);
    if (!grads_match_fd(joint_back.dw_acoustic, fd_w_a, &why) ||
        !grads_match_fd(joint_back.dw_label, fd_w_l, &why) ||
        !grads_match_fd(joint_back.dbias, fd_bias, &why) ||
        !grads_match_fd(joint_back.dacoustic, fd_h_a, &why) ||
        !grads_match_fd(joint_back.dlabel, fd_h_l, &why)) {
      suite.passed = false;
      suite.detail = "joint_backward case " + std::to_string(i) + ": " + why;
      break;
    }
  }
  return suite;
}

SuiteResult suite_closed_form() {
  struct Case {
    std::int64_t frames, labels, vocab;
  };
  const Case cases[] = {{1, 0, 2}, {2, 1, 2}, {5, 3, 4}, {10, 4, 8}};
  SuiteResult suite{"closed-form", true, 4, ""};
  for (const Case& c : cases) {
    Tensor<double> scores =
        Tensor<double>::zeros({c.frames, c.labels + 1, c.vocab}, "scores");
    std::vector<std::int32_t> yv(size_t(c.labels), 1);
    const auto result = transducer_loss_sample(scores, LabelSequence(yv));
    const double expected =
        double(c.frames + c.labels) * std::log(double(c.vocab)) -
        std::log(double(oracle::count_paths(c.frames, c.labels)));
    if (std::abs(result.value - expected) > 1e-9) {
      suite.passed = false;
      std::ostringstream os;
      os << "frames=" << c.frames << " labels=" << c.labels
         << " vocab=" << c.vocab << ": got " << result.value << " expected "
         << expected;
      suite.detail = os.str();
      break;
    }
  }
  return suite;
}

SuiteResult suite_engine_equivalence(int cases) {
  SuiteResult suite{"engine-equivalence", true, cases, ""};
  const EngineMode modes[] = {EngineMode::sample_wise,
                              EngineMode::sample_wise_pr,
                              EngineMode::sample_wise_pr_dp};
  for (int i = 0; i < cases && suite.passed; ++i) {
    const std::uint64_t seed = kSeedBase + 2000 + std::uint64_t(i);
    {
      BenchInputs<double> in = random_ragged_inputs<double>(seed);
      const StepResult<double> ref = run_batched(in.batch, in.jp, in.op);
      for (EngineMode mode : modes) {
        EngineConfig cfg;
        cfg.mode = mode;
        cfg.worker_count = mode == EngineMode::sample_wise_pr_dp ? 3 : 1;
        const StepResult<double> got =
            run_sample_wise(in.batch, in.jp, in.op, cfg);
        const double rel = step_max_rel_diff(ref, got);
        if (rel > 1e-10) {
          suite.passed = false;
          suite.detail = std::string(mode_name(mode)) + " f64 rel " +
                         std::to_string(rel) + " at seed " +
                         std::to_string(seed);
          break;
        }
      }
    }
    if (!suite.passed) break;
    BenchInputs<float> in = random_ragged_inputs<float>(seed);
    const StepResult<float> ref = run_batched(in.batch, in.jp, in.op);
    for (EngineMode mode : modes) {
      EngineConfig cfg;
      cfg.mode = mode;
      cfg.worker_count = mode == EngineMode::sample_wise_pr_dp ? 3 : 1;
      const StepResult<float> got = run_sample_wise(in.batch, in.jp, in.op, cfg);
      const double rel = step_max_rel_diff(ref, got);
      if (rel > 2e-4) {
        suite.passed = false;
        suite.detail = std::string(mode_name(mode)) + " f32 rel " +
                       std::to_string(rel) + " at seed " + std::to_string(seed);
        break;
      }
    }
  }
  return suite;
}

SuiteResult suite_memory_release() {
  SuiteResult suite{"memory-release", true, 4, ""};
  auto& tracker = AllocationTracker::instance();
  BenchConfig cfg;
  cfg.batch_size = 4;
  cfg.max_frames = 10;
  cfg.max_labels = 4;
  cfg.joint_dim = 8;
  cfg.acoustic_dim = 6;
  cfg.label_dim = 6;
  cfg.vocab = 5;
  cfg.seed = 7;
  const std::int64_t live_start = tracker.live_bytes();
  for (EngineMode mode :
       {EngineMode::batched, EngineMode::sample_wise, EngineMode::sample_wise_pr,
        EngineMode::sample_wise_pr_dp}) {
    BenchInputs<double> in = synth_inputs<double>(cfg);
    const std::int64_t input_bytes = in.batch.acoustic.bytes() +
                                     in.batch.label.bytes() +
                                     in.jp.w_acoustic.bytes() +
                                     in.jp.w_label.bytes() + in.jp.bias.bytes() +
                                     in.op.w_out.bytes() +
                                     in.op.bias_out.bytes();
    EngineConfig ecfg;
    ecfg.mode = mode;
    ecfg.worker_count = 2;
    {
      const StepResult<double> result = run_step(in.batch, in.jp, in.op, ecfg);
      const std::int64_t output_bytes =
          result.grads.dw_acoustic.bytes() + result.grads.dw_label.bytes() +
          result.grads.dbias.bytes() + result.grads.dw_out.bytes() +
          result.grads.dbias_out.bytes() + result.grads.dacoustic.bytes() +
          result.grads.dlabel.bytes();
      if (tracker.live_bytes() != live_start + input_bytes + output_bytes) {
        suite.passed = false;
        suite.detail = std::string(mode_name(mode)) + ": live " +
                       std::to_string(tracker.live_bytes()) + " expected " +
                       std::to_string(live_start + input_bytes + output_bytes);
        break;
      }
    }
  }
  if (suite.passed && tracker.live_bytes() != live_start) {
    suite.passed = false;
    suite.detail = "leak after releasing inputs and outputs";
  }
  return suite;
}

SuiteResult suite_determinism() {
  SuiteResult suite{"determinism", true, 4, ""};
  BenchConfig cfg;
  cfg.batch_size = 6;
  cfg.max_frames = 9;
  cfg.max_labels = 4;
  cfg.joint_dim = 8;
  cfg.acoustic_dim = 5;
  cfg.label_dim = 5;
  cfg.vocab = 6;
  cfg.seed = 99;
  for (EngineMode mode :
       {EngineMode::batched, EngineMode::sample_wise, EngineMode::sample_wise_pr,
        EngineMode::sample_wise_pr_dp}) {
    EngineConfig ecfg;
    ecfg.mode = mode;
    ecfg.worker_count = mode == EngineMode::sample_wise_pr_dp ? 4 : 1;
    BenchInputs<float> a = synth_inputs<float>(cfg);
    BenchInputs<float> b = synth_inputs<float>(cfg);
    if (!bitwise_equal(a.batch.acoustic, b.batch.acoustic) ||
        !bitwise_equal(a.batch.label, b.batch.label)) {
      suite.passed = false;
      suite.detail = "input synthesis is not reproducible";
      break;
    }
    const StepResult<float> r1 = run_step(a.batch, a.jp, a.op, ecfg);
    const StepResult<float> r2 = run_step(b.batch, b.jp, b.op, ecfg);
    if (r1.loss != r2.loss ||
        !bitwise_equal(r1.grads.dw_acoustic, r2.grads.dw_acoustic) ||
        !bitwise_equal(r1.grads.dw_label, r2.grads.dw_label) ||
        !bitwise_equal(r1.grads.dbias, r2.grads.dbias) ||
        !bitwise_equal(r1.grads.dw_out, r2.grads.dw_out) ||
        !bitwise_equal(r1.grads.dbias_out, r2.grads.dbias_out) ||
        !bitwise_equal(r1.grads.dacoustic, r2.grads.dacoustic) ||
        !bitwise_equal(r1.grads.dlabel, r2.grads.dlabel)) {
      suite.passed = false;
      suite.detail = std::string(mode_name(mode)) + " differs between runs";
      break;
    }
  }
  return suite;
}

SuiteResult suite_parallel_iterations() {
  SuiteResult suite{"parallel-iterations", true, 3, ""};
  struct Case {
    std::int64_t frames, labels, vocab;
    int expected;
  };
  const Case cases[] = {
      {500, 100, 4096, 1}, {232, 46, 4096, 4}, {50, 10, 4096, 16}};
  for (const Case& c : cases) {
    const int got = compute_parallel_iterations(c.frames, c.labels, c.vocab,
                                                1'000'000'000);
    if (got != c.expected) {
      suite.passed = false;
      std::ostringstream os;
      os << "(" << c.frames << "," << c.labels << "," << c.vocab << "): got "
         << got << " expected " << c.expected;
      suite.detail = os.str();
      break;
    }
  }
  return suite;
}

SuiteResult suite_memory_scaling() {
  SuiteResult suite{"memory-scaling", true, 4, ""};
  auto& tracker = AllocationTracker::instance();
  BenchConfig cfg;
  cfg.max_frames = 50;
  cfg.max_labels = 10;
  cfg.joint_dim = 64;
  cfg.acoustic_dim = 64;
  cfg.label_dim = 64;
  cfg.vocab = 128;
  cfg.seed = 5;

  const std::int64_t per_sample_3d =
      (cfg.max_frames * cfg.acoustic_dim +
       (cfg.max_labels + 1) * cfg.label_dim) *
      2 * bytes_per_element(Precision::f32);
  const LatticeDims dims{cfg.max_frames, cfg.max_labels + 1, cfg.joint_dim,
                         cfg.acoustic_dim, cfg.label_dim, cfg.vocab};
  const std::int64_t trio = lattice_trio_bytes(dims, Precision::f32);

  std::int64_t sample_wise_single = 0;
  for (std::int64_t batch : {1, 4, 16, 64}) {
    cfg.batch_size = batch;
    BenchInputs<float> in = synth_inputs<float>(cfg);
    std::int64_t peaks[3] = {0, 0, 0};
    const EngineMode modes[] = {EngineMode::sample_wise,
                                EngineMode::sample_wise_pr,
                                EngineMode::batched};
    for (int m = 0; m < 3; ++m) {
      EngineConfig ecfg;
      ecfg.mode = modes[m];
      tracker.reset_peak();
      const StepResult<float> result = run_step(in.batch, in.jp, in.op, ecfg);
      peaks[m] = tracker.peak_bytes();
    }
    if (batch == 1) sample_wise_single = peaks[0];
    std::ostringstream os;
    if (peaks[0] >
        sample_wise_single +
            std::int64_t(1.1 * double((batch - 1) * per_sample_3d))) {
      suite.passed = false;
      os << "sample_wise peak at B=" << batch << " is " << peaks[0]
         << ", bound " << sample_wise_single << " + 1.1*" << batch - 1 << "*"
         << per_sample_3d;
      suite.detail = os.str();
      break;
    }
    if (peaks[2] < std::int64_t(0.8 * double(batch * trio))) {
      suite.passed = false;
      os << "batched peak at B=" << batch << " is " << peaks[2]
         << ", below 0.8*B*" << trio;
      suite.detail = os.str();
      break;
    }
    if (batch >= 2 && !(peaks[1] <= peaks[0] && peaks[0] <= peaks[2])) {
      suite.passed = false;
      os << "peak ordering violated at B=" << batch << ": pr=" << peaks[1]
         << " sample_wise=" << peaks[0] << " batched=" << peaks[2];
      suite.detail = os.str();
      break;
    }
  }
  return suite;
}

}  // namespace

VerifyReport run_verification(VerifyScale scale) {
  const bool medium = scale == VerifyScale::medium;
  VerifyReport report;
  report.suites.push_back(suite_loss_oracle(medium ? 400 : 200));
  report.suites.push_back(suite_finite_diff(medium ? 50 : 20));
  report.suites.push_back(suite_closed_form());
  report.suites.push_back(suite_engine_equivalence(medium ? 30 : 10));
  report.suites.push_back(suite_memory_release());
  report.suites.push_back(suite_determinism());
  report.suites.push_back(suite_parallel_iterations());
  if (medium) {
    report.suites.push_back(suite_memory_scaling());
  }
  return report;
}

}  // namespace swt
