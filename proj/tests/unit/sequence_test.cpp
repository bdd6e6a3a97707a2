#include <gtest/gtest.h>

#include <cmath>

#include "rahp/core/grad_check.hpp"
#include "rahp/core/ops.hpp"
#include "rahp/nn/sequence.hpp"

using namespace rahp;
using namespace rahp::nn;
using core::Tensor;
using Td = Tensor<double>;

namespace {

LstmCellParams<double> random_cell(std::size_t in, std::size_t h, core::Rng& rng, double bound = 0.6) {
  return {core::uniform_tensor<double>({4 * h, in}, bound, rng), core::uniform_tensor<double>({4 * h, h}, bound, rng),
          core::uniform_tensor<double>({4 * h}, bound, rng)};
}

LstmCellParams<double> zero_cell(std::size_t in, std::size_t h) {
  return {Td::zeros({4 * h, in}), Td::zeros({4 * h, h}), Td::zeros({4 * h})};
}

// Plain-loop LSTM step in long double, independent of the tensor ops.
struct ScalarState {
  std::vector<long double> h, c;
};

ScalarState scalar_step(const std::vector<double>& x, const ScalarState& prev, const LstmCellParams<double>& p) {
  const std::size_t h = prev.h.size(), in = x.size();
  auto sig = [](long double v) { return 1.0L / (1.0L + std::exp(-v)); };
  std::vector<long double> z(4 * h);
  for (std::size_t r = 0; r < 4 * h; ++r) {
    long double acc = p.bias.data()[r];
    for (std::size_t k = 0; k < in; ++k) acc += p.input_weights.data()[r * in + k] * static_cast<long double>(x[k]);
    for (std::size_t k = 0; k < h; ++k) acc += p.hidden_weights.data()[r * h + k] * prev.h[k];
    z[r] = acc;
  }
  ScalarState next{std::vector<long double>(h), std::vector<long double>(h)};
  for (std::size_t j = 0; j < h; ++j) {
    const long double i = sig(z[j]), f = sig(z[h + j]), g = std::tanh(z[2 * h + j]), o = sig(z[3 * h + j]);
    next.c[j] = f * prev.c[j] + i * g;
    next.h[j] = o * std::tanh(next.c[j]);
  }
  return next;
}

std::vector<std::vector<long double>> scalar_direction(const std::vector<std::vector<double>>& xs,
                                                       const LstmCellParams<double>& p, bool reverse) {
  const std::size_t h = p.hidden();
  ScalarState state{std::vector<long double>(h, 0), std::vector<long double>(h, 0)};
  std::vector<std::vector<long double>> out(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const std::size_t t = reverse ? xs.size() - 1 - s : s;
    state = scalar_step(xs[t], state, p);
    out[t] = state.h;
  }
  return out;
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t d, core::Rng& rng) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (auto& v : r) v = rng.uniform(-1.0, 1.0);
  }
  return rows;
}

Td to_matrix(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Td::from({rows.size(), rows[0].size()}, flat);
}

}  // namespace

TEST(Mask, PrefixOnly) {
  EXPECT_EQ(Mask::from_flags({true, true, false}).real(), 2u);
  EXPECT_THROW(Mask::from_flags({true, false, true}), std::invalid_argument);
  EXPECT_THROW(Mask(2, 3), std::invalid_argument);
}

TEST(LstmStep, ZeroParamsZeroState) {
  const auto p = zero_cell(3, 2);
  const auto s = lstm_step<double>(Td::vector({1, -2, 3}), {Td::zeros({2}), Td::zeros({2})}, p);
  for (double v : s.hidden.data()) EXPECT_EQ(v, 0.0);
  for (double v : s.cell.data()) EXPECT_EQ(v, 0.0);
}

TEST(LstmStep, ZeroParamsClosedForm) {
  const auto p = zero_cell(2, 3);
  const std::vector<double> c = {0.8, -1.6, 3.0};
  const auto s = lstm_step<double>(Td::vector({0.3, 0.1}), {Td::zeros({3}), Td::vector(c)}, p);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_DOUBLE_EQ(s.cell.at(j), 0.5 * c[j]);
    EXPECT_NEAR(s.hidden.at(j), 0.5 * std::tanh(0.5 * c[j]), 1e-15);
  }
}

TEST(LstmStep, MatchesScalarOracle) {
  core::Rng rng(21);
  const auto p = random_cell(3, 2, rng);
  const std::vector<double> x = {0.4, -0.7, 0.2}, h0 = {0.1, -0.3}, c0 = {0.5, 0.2};
  const auto s = lstm_step<double>(Td::vector(x), {Td::vector(h0), Td::vector(c0)}, p);
  const auto oracle = scalar_step(x, {{h0.begin(), h0.end()}, {c0.begin(), c0.end()}}, p);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(s.hidden.at(j), static_cast<double>(oracle.h[j]), 1e-14);
    EXPECT_NEAR(s.cell.at(j), static_cast<double>(oracle.c[j]), 1e-14);
  }
  EXPECT_THROW(lstm_step<double>(Td::vector({1.0, 2.0}), {Td::zeros({2}), Td::zeros({2})}, p), std::invalid_argument);
  EXPECT_THROW(lstm_step<double>(Td::vector(x), {Td::zeros({3}), Td::zeros({3})}, p), std::invalid_argument);
}

TEST(BiLstm, SingletonSeesOneToken) {
  core::Rng rng(22);
  BiLstmParams<double> p{random_cell(3, 2, rng), random_cell(3, 2, rng)};
  const auto x = Td::from({1, 3}, {0.2, -0.5, 0.9});
  const auto out = bilstm_encode(x, Mask(1), p);
  const auto fwd = lstm_step<double>(core::row(x, 0), {Td::zeros({2}), Td::zeros({2})}, p.forward);
  const auto bwd = lstm_step<double>(core::row(x, 0), {Td::zeros({2}), Td::zeros({2})}, p.backward);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(out.at(0, j), fwd.hidden.at(j), 1e-15);
    EXPECT_NEAR(out.at(0, 2 + j), bwd.hidden.at(j), 1e-15);
  }
  const auto fin = final_state(out, Mask(1));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(fin.at(j), out.at(0, j));
}

TEST(BiLstm, MatchesScalarOracleAndFinalState) {
  core::Rng rng(23);
  BiLstmParams<double> p{random_cell(3, 2, rng), random_cell(3, 2, rng)};
  const auto xs = random_rows(2, 3, rng);
  const auto out = bilstm_encode(to_matrix(xs), Mask(2), p);
  const auto fwd = scalar_direction(xs, p.forward, false);
  const auto bwd = scalar_direction(xs, p.backward, true);
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(out.at(t, j), static_cast<double>(fwd[t][j]), 1e-14);
      EXPECT_NEAR(out.at(t, 2 + j), static_cast<double>(bwd[t][j]), 1e-14);
    }
  }
  const auto fin = final_state(out, Mask(2));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(fin.at(j), static_cast<double>(fwd[1][j]), 1e-14);
    EXPECT_NEAR(fin.at(2 + j), static_cast<double>(bwd[0][j]), 1e-14);
  }
}

TEST(BiLstm, PaddingInvariance) {
  core::Rng rng(24);
  BiLstmParams<double> p{random_cell(4, 3, rng), random_cell(4, 3, rng)};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t real = 1 + rng.index(6), pad = 1 + rng.index(5);
    auto rows = random_rows(real, 4, rng);
    const auto plain = bilstm_encode(to_matrix(rows), Mask(real), p);
    // Padded rows hold garbage; the mask alone must keep them out.
    const auto garbage = random_rows(pad, 4, rng);
    rows.insert(rows.end(), garbage.begin(), garbage.end());
    const Mask mask(real + pad, real);
    const auto padded = bilstm_encode(to_matrix(rows), mask, p);
    for (std::size_t t = 0; t < real; ++t) {
      for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(padded.at(t, j), plain.at(t, j), 1e-12);
    }
    for (std::size_t t = real; t < real + pad; ++t) {
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(padded.at(t, j), 0.0);
    }
    const auto a = final_state(plain, Mask(real)), b = final_state(padded, mask);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(a.at(j), b.at(j), 1e-12);
  }
}

TEST(BiLstm, MirrorSymmetry) {
  core::Rng rng(25);
  const auto cell = random_cell(3, 2, rng);
  BiLstmParams<double> p{cell, cell};
  auto xs = random_rows(2, 3, rng);
  xs.push_back(xs[1]);
  xs.push_back(xs[0]);  // palindrome of length 4
  const auto out = bilstm_encode(to_matrix(xs), Mask(4), p);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(out.at(t, j), out.at(3 - t, 2 + j), 1e-15);
  }
}

TEST(BiLstm, Errors) {
  core::Rng rng(26);
  BiLstmParams<double> p{random_cell(3, 2, rng), random_cell(3, 2, rng)};
  EXPECT_THROW(bilstm_encode(Td::zeros({2, 3}), Mask(2, 0), p), std::invalid_argument);
  EXPECT_THROW(bilstm_encode(Td::zeros({2, 3}), Mask(3), p), std::invalid_argument);
  EXPECT_THROW(final_state(Td::zeros({2, 4}), Mask(2, 0)), std::invalid_argument);
}

TEST(BiLstm, GradCheckThroughEncoderAndFinalState) {
  core::Rng rng(27);
  BiLstmParams<double> p{random_cell(3, 2, rng), random_cell(3, 2, rng)};
  const auto x = core::uniform_tensor<double>({4, 3}, 1.0, rng);
  const auto probe = core::uniform_tensor<double>({4}, 1.0, rng).detach();
  const Mask mask(4, 3);
  auto f = [&] { return core::dot(final_state(bilstm_encode(x, mask, p), mask), probe); };
  const auto result = core::grad_check(f, {x, p.forward.input_weights, p.forward.hidden_weights, p.forward.bias,
                                           p.backward.input_weights, p.backward.hidden_weights, p.backward.bias});
  EXPECT_LT(result.max_relative_error, 1e-6);
}

TEST(BiLstmParams, ForgetBiasStartsAtOne) {
  core::ParamStore<double> store;
  core::Rng rng(28);
  add_bilstm_params(store, "bilstm_c", 5, 4, rng);
  const auto p = bilstm_params(store, "bilstm_c");
  EXPECT_EQ(p.forward.input_weights.shape(), (core::Shape{16, 5}));
  EXPECT_EQ(p.backward.hidden_weights.shape(), (core::Shape{16, 4}));
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(p.forward.bias.at(i), (i >= 4 && i < 8) ? 1.0 : 0.0);
  EXPECT_EQ(store.names_with_prefix("bilstm_c.").size(), 6u);
}

TEST(Mlp, AffineChainOracle) {
  MlpParams<double> p{Td::from({2, 2}, {1, -1, 0.5, 2}), Td::vector({0.1, -3}), Td::from({1, 2}, {2, -1}),
                      Td::vector({0.25})};
  // hidden = relu([1*1 - 1*2 + 0.1, 0.5*1 + 2*2 - 3]) = relu([-0.9, 1.5]) = [0, 1.5]; out = -1.5 + 0.25.
  const auto out = mlp_forward(Td::vector({1, 2}), p);
  EXPECT_DOUBLE_EQ(out.at(0), -1.25);
}
