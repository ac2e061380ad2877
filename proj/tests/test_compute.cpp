// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swt/compute.hpp"
#include "swt/oracle.hpp"
#include "swt/rng.hpp"

using namespace swt;

namespace {

template <typename T>
struct Fixture {
  Tensor<T> h_acoustic, h_label;
  JointParams<T> jp;
  OutputParams<T> op;

  Fixture(std::int64_t frames, std::int64_t rows, std::int64_t h,
          std::int64_t enc, std::int64_t vocab, std::uint64_t seed,
          double span = 1.0) {
    Rng rng(seed);
    h_acoustic = Tensor<T>::zeros({frames, enc});
    h_label = Tensor<T>::zeros({rows, enc});
    jp = JointParams<T>{Tensor<T>::zeros({h, enc}), Tensor<T>::zeros({h, enc}),
                        Tensor<T>::zeros({h})};
    op = OutputParams<T>{Tensor<T>::zeros({vocab, h}),
                         Tensor<T>::zeros({vocab})};
    rng.fill_uniform(h_acoustic, -span, span);
    rng.fill_uniform(h_label, -span, span);
    rng.fill_uniform(jp.w_acoustic, -span, span);
    rng.fill_uniform(jp.w_label, -span, span);
    rng.fill_uniform(jp.bias, -span, span);
    rng.fill_uniform(op.w_out, -span, span);
    rng.fill_uniform(op.bias_out, -span, span);
  }

  SampleEncodings<T> encodings() const {
    return {matrix_view(h_acoustic), matrix_view(h_label)};
  }
};

}  // namespace

TEST_CASE("joint forward is zero on all-zero inputs") {
  Fixture<float> fx(3, 2, 4, 3, 5, 1);
  for (auto* t : {&fx.h_acoustic, &fx.h_label}) {
    for (float& v : t->span()) v = 0;
  }
  for (auto* t : {&fx.jp.w_acoustic, &fx.jp.w_label, &fx.jp.bias}) {
    for (float& v : t->span()) v = 0;
  }
  auto joint = joint_forward(fx.encodings(), fx.jp);
  for (float v : joint.span()) CHECK(v == 0.0f);
}

TEST_CASE("large bias saturates tanh") {
  Fixture<float> fx(2, 3, 4, 2, 5, 2);
  for (auto* t : {&fx.jp.w_acoustic, &fx.jp.w_label}) {
    for (float& v : t->span()) v = 0;
  }
  for (float& v : fx.jp.bias.span()) v = 100.0f;
  auto joint = joint_forward(fx.encodings(), fx.jp);
  for (float v : joint.span()) {
    CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));
  }
}

TEST_CASE("joint forward matches the scalar-loop definition") {
  Fixture<double> fx(3, 3, 4, 3, 5, 3);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  for (std::int64_t t = 0; t < 3; ++t) {
    for (std::int64_t u = 0; u < 3; ++u) {
      for (std::int64_t k = 0; k < 4; ++k) {
        double pa = 0, pl = 0;
        for (std::int64_t a = 0; a < 3; ++a)
          pa += fx.jp.w_acoustic(k, a) * fx.h_acoustic(t, a);
        for (std::int64_t l = 0; l < 3; ++l)
          pl += fx.jp.w_label(k, l) * fx.h_label(u, l);
        const double want = std::tanh(pa + pl + fx.jp.bias(k));
        CHECK(joint(t, u, k) == doctest::Approx(want).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("output forward replicates the bias on zero joint encodings") {
  Fixture<float> fx(2, 2, 3, 2, 4, 4);
  auto joint = Tensor<float>::zeros({2, 2, 3});
  for (std::int64_t i = 0; i < 4; ++i) fx.op.bias_out.data()[i] = float(i + 1);
  auto scores = output_forward(joint, fx.op);
  for (std::int64_t t = 0; t < 2; ++t)
    for (std::int64_t u = 0; u < 2; ++u)
      for (std::int64_t v = 0; v < 4; ++v)
        CHECK(scores(t, u, v) == float(v + 1));
}

TEST_CASE("identity output layer passes the joint encodings through") {
  Fixture<float> fx(2, 3, 4, 2, 4, 5);
  for (float& v : fx.op.w_out.span()) v = 0;
  for (std::int64_t i = 0; i < 4; ++i) fx.op.w_out(i, i) = 1.0f;
  for (float& v : fx.op.bias_out.span()) v = 0;
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto scores = output_forward(joint, fx.op);
  for (std::int64_t i = 0; i < joint.size(); ++i)
    CHECK(scores.data()[i] == joint.data()[i]);
}

TEST_CASE("output forward matches the scalar-loop definition") {
  Fixture<double> fx(2, 3, 4, 3, 5, 6);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto scores = output_forward(joint, fx.op);
  for (std::int64_t t = 0; t < 2; ++t) {
    for (std::int64_t u = 0; u < 3; ++u) {
      for (std::int64_t v = 0; v < 5; ++v) {
        double acc = fx.op.bias_out(v);
        for (std::int64_t k = 0; k < 4; ++k)
          acc += fx.op.w_out(v, k) * joint(t, u, k);
        CHECK(scores(t, u, v) == doctest::Approx(acc).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("output backward on zero upstream gradient") {
  Fixture<double> fx(2, 2, 3, 2, 4, 7);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto dscores = Tensor<double>::zeros({2, 2, 4});
  auto r = output_backward(dscores, joint, fx.op);
  for (double v : r.djoint.span()) CHECK(v == 0.0);
  for (double v : r.dw_out.span()) CHECK(v == 0.0);
  for (double v : r.dbias_out.span()) CHECK(v == 0.0);
}

TEST_CASE("single-element chain rule through the output layer") {
  Fixture<double> fx(1, 1, 3, 2, 4, 8);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto dscores = Tensor<double>::zeros({1, 1, 4});
  dscores(0, 0, 0) = 1.0;
  auto r = output_backward(dscores, joint, fx.op);
  for (std::int64_t k = 0; k < 3; ++k) {
    CHECK(r.dw_out(0, k) == joint(0, 0, k));
    CHECK(r.dw_out(1, k) == 0.0);
    CHECK(r.djoint(0, 0, k) == fx.op.w_out(0, k));
  }
  CHECK(r.dbias_out(0) == 1.0);
  CHECK(r.dbias_out(1) == 0.0);
}

TEST_CASE("output backward matches finite differences of a scalar probe") {
  Fixture<double> fx(2, 3, 3, 2, 4, 9);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto weights = Tensor<double>::zeros({2, 3, 4});
  Rng rng(10);
  rng.fill_uniform(weights, -1, 1);
  auto r = output_backward(weights, joint, fx.op);

  auto probe = [&](const Tensor<double>& w, const Tensor<double>& b,
                   const Tensor<double>& z) {
    OutputParams<double> p{w.clone(), b.clone()};
    auto s = output_forward(z, p);
    double acc = 0;
    for (std::int64_t i = 0; i < s.size(); ++i)
      acc += weights.data()[i] * s.data()[i];
    return acc;
  };
  auto fd_w = oracle::finite_diff(
      [&](const Tensor<double>& w) { return probe(w, fx.op.bias_out, joint); },
      fx.op.w_out);
  auto fd_b = oracle::finite_diff(
      [&](const Tensor<double>& b) { return probe(fx.op.w_out, b, joint); },
      fx.op.bias_out);
  auto fd_z = oracle::finite_diff(
      [&](const Tensor<double>& z) {
        return probe(fx.op.w_out, fx.op.bias_out, z);
      },
      joint);
  for (std::int64_t i = 0; i < fd_w.size(); ++i) {
    CHECK(std::abs(r.dw_out.data()[i] - fd_w.data()[i]) <
          oracle::grad_tolerance(r.dw_out.data()[i]));
  }
  for (std::int64_t i = 0; i < fd_b.size(); ++i) {
    CHECK(std::abs(r.dbias_out.data()[i] - fd_b.data()[i]) <
          oracle::grad_tolerance(r.dbias_out.data()[i]));
  }
  for (std::int64_t i = 0; i < fd_z.size(); ++i) {
    CHECK(std::abs(r.djoint.data()[i] - fd_z.data()[i]) <
          oracle::grad_tolerance(r.djoint.data()[i]));
  }
}

TEST_CASE("joint backward on zero upstream gradient") {
  Fixture<double> fx(3, 2, 4, 3, 5, 11);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto djoint = Tensor<double>::zeros({3, 2, 4});
  auto r = joint_backward(djoint, joint, fx.encodings(), fx.jp);
  for (double v : r.dacoustic.span()) CHECK(v == 0.0);
  for (double v : r.dlabel.span()) CHECK(v == 0.0);
  for (double v : r.dw_acoustic.span()) CHECK(v == 0.0);
  for (double v : r.dw_label.span()) CHECK(v == 0.0);
  for (double v : r.dbias.span()) CHECK(v == 0.0);
}

TEST_CASE("zero parameters leave the tanh gate open") {
  Fixture<double> fx(3, 2, 4, 3, 5, 12);
  for (auto* t : {&fx.h_acoustic, &fx.h_label}) {
    for (double& v : t->span()) v = 0;
  }
  for (auto* t : {&fx.jp.w_acoustic, &fx.jp.w_label, &fx.jp.bias}) {
    for (double& v : t->span()) v = 0;
  }
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto djoint = Tensor<double>::zeros({3, 2, 4});
  Rng rng(13);
  rng.fill_uniform(djoint, -1, 1);
  auto r = joint_backward(djoint, joint, fx.encodings(), fx.jp);
  for (std::int64_t k = 0; k < 4; ++k) {
    double sum = 0;
    for (std::int64_t t = 0; t < 3; ++t)
      for (std::int64_t u = 0; u < 2; ++u) sum += djoint(t, u, k);
    CHECK(r.dbias(k) == doctest::Approx(sum).epsilon(1e-14));
  }
}

TEST_CASE("joint backward matches finite differences of a scalar probe") {
  Fixture<double> fx(3, 3, 4, 3, 5, 14);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto weights = Tensor<double>::zeros({3, 3, 4});
  Rng rng(15);
  rng.fill_uniform(weights, -1, 1);
  auto r = joint_backward(weights, joint, fx.encodings(), fx.jp);

  auto probe = [&](const JointParams<double>& p, const Tensor<double>& a,
                   const Tensor<double>& l) {
    SampleEncodings<double> e{matrix_view(a), matrix_view(l)};
    auto z = joint_forward(e, p);
    double acc = 0;
    for (std::int64_t i = 0; i < z.size(); ++i)
      acc += weights.data()[i] * z.data()[i];
    return acc;
  };
  auto check = [&](const Tensor<double>& analytic, const Tensor<double>& fd) {
    for (std::int64_t i = 0; i < fd.size(); ++i) {
      CHECK(std::abs(analytic.data()[i] - fd.data()[i]) <
            oracle::grad_tolerance(analytic.data()[i]));
    }
  };
  check(r.dw_acoustic, oracle::finite_diff(
                           [&](const Tensor<double>& w) {
                             JointParams<double> p{w.clone(),
                                                   fx.jp.w_label.clone(),
                                                   fx.jp.bias.clone()};
                             return probe(p, fx.h_acoustic, fx.h_label);
                           },
                           fx.jp.w_acoustic));
  check(r.dw_label, oracle::finite_diff(
                        [&](const Tensor<double>& w) {
                          JointParams<double> p{fx.jp.w_acoustic.clone(),
                                                w.clone(), fx.jp.bias.clone()};
                          return probe(p, fx.h_acoustic, fx.h_label);
                        },
                        fx.jp.w_label));
  check(r.dbias, oracle::finite_diff(
                     [&](const Tensor<double>& b) {
                       JointParams<double> p{fx.jp.w_acoustic.clone(),
                                             fx.jp.w_label.clone(), b.clone()};
                       return probe(p, fx.h_acoustic, fx.h_label);
                     },
                     fx.jp.bias));
  check(r.dacoustic, oracle::finite_diff(
                         [&](const Tensor<double>& a) {
                           return probe(fx.jp, a, fx.h_label);
                         },
                         fx.h_acoustic));
  check(r.dlabel, oracle::finite_diff(
                      [&](const Tensor<double>& l) {
                        return probe(fx.jp, fx.h_acoustic, l);
                      },
                      fx.h_label));
}

TEST_CASE("backward is linear: doubling the upstream doubles every output") {
  Fixture<double> fx(2, 3, 4, 3, 5, 16);
  auto joint = joint_forward(fx.encodings(), fx.jp);
  auto dscores = Tensor<double>::zeros({2, 3, 5});
  Rng rng(17);
  rng.fill_uniform(dscores, -1, 1);
  auto doubled = dscores.clone();
  for (double& v : doubled.span()) v *= 2;

  auto r1 = output_backward(dscores, joint, fx.op);
  auto r2 = output_backward(doubled, joint, fx.op);
  auto expect_doubled = [](const Tensor<double>& two, const Tensor<double>& one) {
    for (std::int64_t i = 0; i < one.size(); ++i) {
      CHECK(std::abs(two.data()[i] - 2 * one.data()[i]) <=
            1e-14 * std::abs(one.data()[i]));
    }
  };
  expect_doubled(r2.djoint, r1.djoint);
  expect_doubled(r2.dw_out, r1.dw_out);
  expect_doubled(r2.dbias_out, r1.dbias_out);
}

TEST_CASE("per-sample kernels on strided batch slices match standalone runs") {
  // Stacked batched evaluation vs. per-sample tensors, bitwise in f64.
  Fixture<double> fx0(4, 3, 5, 3, 6, 18);
  Fixture<double> fx1(4, 3, 5, 3, 6, 19);

  auto batched_joint = Tensor<double>::zeros({2, 4, 3, 5});
  joint_forward_kernel<double>(matrix_view(fx0.h_acoustic),
                               matrix_view(fx0.h_label), fx0.jp,
                               sample_lattice(batched_joint, 0));
  joint_forward_kernel<double>(matrix_view(fx1.h_acoustic),
                               matrix_view(fx1.h_label), fx1.jp,
                               sample_lattice(batched_joint, 1));
  auto single0 = joint_forward(fx0.encodings(), fx0.jp);
  auto single1 = joint_forward(fx1.encodings(), fx1.jp);
  for (std::int64_t i = 0; i < single0.size(); ++i) {
    REQUIRE(batched_joint.data()[i] == single0.data()[i]);
    REQUIRE(batched_joint.data()[single0.size() + i] == single1.data()[i]);
  }

  auto batched_scores = Tensor<double>::zeros({2, 4, 3, 6});
  output_forward_kernel<double>(sample_lattice(std::as_const(batched_joint), 0),
                                fx0.op, sample_lattice(batched_scores, 0));
  auto scores0 = output_forward(single0, fx0.op);
  for (std::int64_t i = 0; i < scores0.size(); ++i) {
    REQUIRE(batched_scores.data()[i] == scores0.data()[i]);
  }
}

TEST_CASE("shape mismatches raise invalid-shape errors") {
  Fixture<float> fx(2, 2, 3, 2, 4, 20);
  auto bad_joint = Tensor<float>::zeros({2, 2, 5});
  CHECK_THROWS_AS(output_forward(bad_joint, fx.op), InvalidShapeError);

  Fixture<float> other(2, 2, 3, 4, 4, 21);  // acoustic_dim 4 vs params 2
  SampleEncodings<float> mixed{matrix_view(other.h_acoustic),
                               matrix_view(fx.h_label)};
  CHECK_THROWS_AS(joint_forward(mixed, fx.jp), InvalidShapeError);
}
