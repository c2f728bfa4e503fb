// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <filesystem>

#include "gradcheck.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/nn/adamw.hpp"
#include "radarppg/nn/attention.hpp"
#include "radarppg/nn/checkpoint.hpp"
#include "radarppg/nn/encoder.hpp"
#include "radarppg/nn/ops.hpp"
#include "support.hpp"

using namespace radarppg;
using namespace radarppg::nn;
using radarppg::testing::DTensor;
using radarppg::testing::grad_check;
using radarppg::testing::random_tensor;

namespace {

using testing::encoder_from;
using testing::encoder_list;
using testing::mhsa_from;
using testing::random_encoder;
using testing::random_mhsa;

}  // namespace

TEST_CASE("gradient suite") {
  for (const auto& r : testing::gradient_suite(20)) {
    INFO(r.op << " worst relative error " << r.worst_rel_error << " over " << r.seeds << " seeds");
    CHECK(r.checked > 0);
    CHECK(r.worst_rel_error < 1e-4);
  }
}

TEST_CASE("mse_loss values and closed-form gradient") {
  const std::vector<double> target{1.0, -2.0, 0.5, 3.0};
  auto same = DTensor::from({1, 4}, target, true);
  CHECK(mse_loss(same, std::span<const double>(target)).item() == 0.0);
  std::vector<double> plus(target);
  for (double& x : plus) x += 1.0;
  auto off = DTensor::from({1, 4}, plus, true);
  const auto loss = mse_loss(off, std::span<const double>(target));
  CHECK(loss.item() == doctest::Approx(1.0));
  loss.backward();
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(off.grad()[i] - 2.0 * 1.0 / 4.0) < 1e-6);
  CHECK_THROWS_AS(mse_loss(off, std::span<const double>(target).first(3)), ShapeError);
}

TEST_CASE("conv1d examples") {
  std::mt19937_64 rng(3);
  auto x = random_tensor({4, 10}, rng, 1.0, false);
  std::vector<double> eye(16, 0.0);
  for (std::size_t c = 0; c < 4; ++c) eye[c * 4 + c] = 1.0;
  const auto y = conv1d(x, DTensor::from({4, 4, 1}, eye), DTensor::zeros({4}));
  for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.values()[i] == x.values()[i]);
  const auto big = random_tensor({8, 2000}, rng, 1.0, false);
  const auto z = conv1d(big, random_tensor({32, 8, 3}, rng, 0.1, false), DTensor::zeros({32}));
  CHECK(z.shape() == Shape{32, 2000});
  // Oracle: direct "same" correlation sum at a few outputs.
  const auto w = random_tensor({2, 4, 3}, rng, 1.0, false);
  const auto b = random_tensor({2}, rng, 1.0, false);
  const auto o = conv1d(x, w, b);
  for (std::size_t co = 0; co < 2; ++co)
    for (std::size_t t : {0u, 4u, 9u}) {
      double s = b.values()[co];
      for (std::size_t ci = 0; ci < 4; ++ci)
        for (std::size_t j = 0; j < 3; ++j) {
          const long src = static_cast<long>(t) + static_cast<long>(j) - 1;
          if (src >= 0 && src < 10) s += w.values()[(co * 4 + ci) * 3 + j] * x.values()[ci * 10 + src];
        }
      CHECK(o.values()[co * 10 + t] == doctest::Approx(s));
    }
  CHECK_THROWS_AS(conv1d(x, random_tensor({2, 3, 3}, rng), b), ShapeError);
}

TEST_CASE("layer_norm examples") {
  std::mt19937_64 rng(4);
  const auto x = random_tensor({16, 6}, rng, 3.0, false);
  std::vector<double> ones(16, 1.0);
  const auto y = layer_norm(x, DTensor::from({16}, ones), DTensor::zeros({16}));
  for (std::size_t t = 0; t < 6; ++t) {
    double m = 0.0, v = 0.0;
    for (std::size_t r = 0; r < 16; ++r) m += y.values()[r * 6 + t];
    m /= 16.0;
    for (std::size_t r = 0; r < 16; ++r) v += std::pow(y.values()[r * 6 + t] - m, 2);
    CHECK(std::abs(m) < 1e-6);
    CHECK(std::abs(v / 16.0 - 1.0) < 1e-4);
  }
  const auto flat = layer_norm(DTensor::from({4, 2}, std::vector<double>(8, 7.0)), DTensor::from({4}, std::vector<double>(4, 1.0)),
                               DTensor::zeros({4}));
  for (double v : flat.values()) CHECK(v == 0.0);
}

TEST_CASE("attention examples") {
  std::mt19937_64 rng(5);
  const auto q = random_tensor({8, 7}, rng, 2.0, false), k = random_tensor({8, 7}, rng, 2.0, false),
             v = random_tensor({8, 7}, rng, 1.0, false);
  std::vector<double> w;
  scaled_dot_product_attention(q, k, v, 2, &w);
  REQUIRE(w.size() == 2 * 7 * 7);
  for (std::size_t row = 0; row < 14; ++row) {
    double s = 0.0;
    for (std::size_t j = 0; j < 7; ++j) {
      s += w[row * 7 + j];
      CHECK(w[row * 7 + j] >= 0.0);
    }
    CHECK(std::abs(s - 1.0) < 1e-6);
  }
  // T = 1: output = Wo (Wv x + bv) + bo.
  const auto p = random_mhsa(8, rng);
  const auto x1 = random_tensor({8, 1}, rng, 1.0, false);
  const auto out = multi_head_self_attention(x1, p, 2);
  const auto ref = linear(linear(x1, p.wv, p.bv), p.wo, p.bo);
  for (std::size_t i = 0; i < 8; ++i) CHECK(out.values()[i] == doctest::Approx(ref.values()[i]));
  CHECK_THROWS(scaled_dot_product_attention(q, k, v, 3));
}

TEST_CASE("attention blocks agree with the plain formula on long inputs") {
  std::mt19937_64 rng(6);
  const std::size_t d = 4, T = 300;
  const auto q = random_tensor({d, T}, rng, 1.0, false), k = random_tensor({d, T}, rng, 1.0, false),
             v = random_tensor({d, T}, rng, 1.0, false);
  const auto o = scaled_dot_product_attention(q, k, v, 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i : {0u, 127u, 128u, 299u}) {
    std::vector<double> s(T);
    for (std::size_t j = 0; j < T; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < d; ++r) acc += q.values()[r * T + i] * k.values()[r * T + j];
      s[j] = acc * scale;
    }
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& x : s) z += (x = std::exp(x - m));
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < T; ++j) acc += s[j] / z * v.values()[r * T + j];
      CHECK(o.values()[r * T + i] == doctest::Approx(acc).epsilon(1e-10));
    }
  }
}

TEST_CASE("encoder layer examples") {
  std::mt19937_64 rng(8);
  const auto x = random_tensor({8, 6}, rng, 1.0, false);
  auto p = random_encoder(8, 16, rng);
  std::mt19937_64 r1(1);
  const auto a = encoder_layer(x, p, 2, 0.16, false, &r1);
  const auto b = encoder_layer(x, p, 2, 0.16, false, &r1);
  CHECK(a.shape() == Shape{8, 6});
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

  for (auto* t : {&p.attn.wq, &p.attn.bq, &p.attn.wk, &p.attn.bk, &p.attn.wv, &p.attn.bv, &p.attn.wo, &p.attn.bo,
                  &p.ff1_w, &p.ff1_b, &p.ff2_w, &p.ff2_b})
    std::fill(t->mutable_values().begin(), t->mutable_values().end(), 0.0);
  const auto z = encoder_layer(x, p, 2, 0.0, false, nullptr);
  const auto ref = layer_norm(layer_norm(x, p.ln1_gain, p.ln1_shift), p.ln2_gain, p.ln2_shift);
  for (std::size_t i = 0; i < z.numel(); ++i) CHECK(z.values()[i] == doctest::Approx(ref.values()[i]));
}

TEST_CASE("permutation equivariance without positional encoding") {
  std::mt19937_64 rng(9);
  const std::size_t d = 8, T = 9;
  const auto p = random_encoder(d, 16, rng);
  const auto w = random_tensor({d, 3, 1}, rng, 0.5, false);
  const auto b = random_tensor({d}, rng, 0.1, false);
  const auto x = random_tensor({3, T}, rng, 1.0, false);
  std::vector<std::size_t> perm(T);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> xp(3 * T);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < T; ++t) xp[c * T + t] = x.values()[c * T + perm[t]];
  auto run = [&](const DTensor& in) { return encoder_layer(relu(conv1d(in, w, b)), p, 2, 0.0, false, nullptr); };
  const auto y = run(x), yp = run(DTensor::from({3, T}, xp));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t t = 0; t < T; ++t) CHECK(std::abs(yp.values()[r * T + t] - y.values()[r * T + perm[t]]) < 1e-6);
}

TEST_CASE("dropout statistics") {
  for (double p : {0.16, 0.5}) {
    const std::size_t n = 100000;
    const auto x = DTensor::from({1, n}, std::vector<double>(n, 1.0));
    std::mt19937_64 rng(42);
    const auto y = dropout(x, p, rng, true);
    std::size_t zeros = 0;
    for (double v : y.values()) {
      if (v == 0.0) ++zeros;
      else CHECK(v == doctest::Approx(1.0 / (1.0 - p)));
    }
    CHECK(std::abs(static_cast<double>(zeros) / n - p) < 0.02);
    const auto id = dropout(x, p, rng, false);
    CHECK(std::equal(id.values().begin(), id.values().end(), x.values().begin()));
  }
}

TEST_CASE("backward is deterministic") {
  auto grads = [] {
    std::mt19937_64 rng(12);
    auto in = encoder_list(random_encoder(8, 16, rng));
    const auto x = random_tensor({8, 20}, rng);
    const auto y = encoder_layer(x, encoder_from(in, 0), 2, 0.0, false, nullptr);
    std::vector<double> t(y.numel(), 0.25);
    mse_loss(y, std::span<const double>(t)).backward();
    std::vector<double> all(x.grad().begin(), x.grad().end());
    for (const auto& p : in) all.insert(all.end(), p.grad().begin(), p.grad().end());
    return all;
  };
  const auto g1 = grads(), g2 = grads();
  REQUIRE(g1.size() == g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i)
    if (g1[i] != g2[i]) { MESSAGE(i << " " << g1[i] << " " << g2[i]); break; }
  CHECK(g1 == g2);
}

TEST_CASE("float gradients do not depend on buffer placement") {
  auto run = [](std::size_t shift) {
    // Odd-sized live allocations move later buffers to other alignments.
    std::vector<std::vector<char>> pad;
    for (std::size_t i = 0; i < 5; ++i) pad.emplace_back(8 * shift + 24 * i + 8);
    std::mt19937_64 rng(21);
    std::normal_distribution<float> n01;
    auto rnd = [&](Shape s, float scale) {
      std::vector<float> v(shape_numel(s));
      for (float& x : v) x = scale * n01(rng);
      return Tensor<float>::from(std::move(s), std::move(v), true);
    };
    const std::size_t d = 16, T = 300;
    const auto x = rnd({d, T}, 1.0f);
    MhsaParams<float> p{rnd({d, d}, 0.3f), rnd({d}, 0.1f), rnd({d, d}, 0.3f), rnd({d}, 0.1f),
                        rnd({d, d}, 0.3f), rnd({d}, 0.1f), rnd({d, d}, 0.3f), rnd({d}, 0.1f)};
    const auto g = rnd({d}, 0.1f), b = rnd({d}, 0.1f);
    const auto y = layer_norm(add(x, multi_head_self_attention(x, p, 4)), g, b);
    std::vector<float> t(y.numel(), 0.1f);
    mse_loss(y, std::span<const float>(t)).backward();
    std::vector<float> all(y.values().begin(), y.values().end());
    for (const auto& q : {x, p.wq, p.bq, p.wk, p.wv, p.bv, g, b}) all.insert(all.end(), q.grad().begin(), q.grad().end());
    return all;
  };
  const auto ref = run(0);
  for (std::size_t shift = 1; shift < 8; ++shift) CHECK(run(shift) == ref);
}

TEST_CASE("positional encoding") {
  const auto pe = sinusoidal_positional_encoding<double>(16, 50);
  REQUIRE(pe.size() == 16 * 50);
  CHECK(pe[0] == 0.0);
  CHECK(pe[1 * 50 + 0] == 1.0);
  for (double v : pe) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  for (std::size_t t = 0; t < 50; ++t) CHECK(pe[t] == doctest::Approx(std::sin(static_cast<double>(t))));
  CHECK(pe[4 * 50 + 7] == doctest::Approx(std::sin(7.0 / std::pow(10000.0, 4.0 / 16.0))));
  CHECK(pe[5 * 50 + 7] == doctest::Approx(std::cos(7.0 / std::pow(10000.0, 4.0 / 16.0))));
  CHECK_THROWS(sinusoidal_positional_encoding<double>(15, 4));
}

TEST_CASE("adamw examples") {
  SUBCASE("quadratic loss step decreases |theta|") {
    std::vector<DTensor> params{DTensor::from({1}, {1.0}, true)};
    AdamWState<double> st;
    st.lr = 0.1;
    params[0].mutable_grad()[0] = 1.0;  // d/dtheta of theta^2 / 2
    adamw_step(st, params);
    CHECK(std::abs(params[0].values()[0]) < 1.0);
    CHECK(params[0].values()[0] == doctest::Approx(0.9));
    CHECK(st.step == 1);
  }
  SUBCASE("zero gradient decays by lr * wd") {
    std::vector<DTensor> params{DTensor::from({2}, {1.0, -3.0}, true)};
    params[0].mutable_grad();
    AdamWState<double> st;
    st.lr = 0.1;
    st.weight_decay = 1e-2;
    for (int i = 1; i <= 5; ++i) {
      adamw_step(st, params);
      CHECK(st.step == static_cast<std::uint64_t>(i));
      CHECK(params[0].values()[0] == doctest::Approx(std::pow(1 - 1e-3, i)).epsilon(1e-12));
      CHECK(params[0].values()[1] == doctest::Approx(-3.0 * std::pow(1 - 1e-3, i)).epsilon(1e-12));
    }
  }
  SUBCASE("reference two-step trajectory") {
    std::vector<DTensor> params{DTensor::from({1}, {0.5}, true)};
    AdamWState<double> st;
    st.lr = 0.01;
    st.weight_decay = 0.1;
    double theta = 0.5, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
      const double g = 2.0 * theta;
      params[0].zero_grad();
      params[0].mutable_grad()[0] = g;
      adamw_step(st, params);
      theta -= 0.01 * 0.1 * theta;
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
      theta -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(params[0].values()[0] == doctest::Approx(theta).epsilon(1e-12));
    }
  }
}

TEST_CASE("checkpoint container") {
  testing::TempDir dir("rvnn");
  Checkpoint c;
  c.manifest = {{"note", "x"}};
  c.arrays.push_back({"a", {2, 3}, {1, 2, 3, 4, 5, 6}});
  c.arrays.push_back({"b", {1}, {-1.5f}});
  save_checkpoint(dir.file("m.rvnn"), c);
  const auto back = load_checkpoint(dir.file("m.rvnn"));
  CHECK(back.manifest["note"] == "x");
  CHECK(back.manifest["format_version"] == kCheckpointVersion);
  CHECK(back.find("a").values == c.arrays[0].values);
  CHECK(back.find("b").shape == Shape{1});
  CHECK_THROWS(back.find("zzz"));
  std::filesystem::resize_file(dir.file("m.rvnn"), std::filesystem::file_size(dir.file("m.rvnn")) - 2);
  CHECK_THROWS_AS(load_checkpoint(dir.file("m.rvnn")), FormatError);
}
