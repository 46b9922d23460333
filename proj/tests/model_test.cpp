// tests/model_test.cpp

// Copyright 2026  DCCRN-CPP Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dccrn/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace dccrn;

namespace {

// Miniature configuration that keeps the receptive field inside a 16-sample
// frame; used wherever a full straight-line transcription is affordable.
DccrnConfig miniature_config() {
  DccrnConfig cfg;
  cfg.frame_size = 16;
  cfg.sub_frames = 4;
  cfg.growth = 2;
  cfg.num_blocks = 1;
  cfg.kernel_small = 3;
  cfg.kernel_large = 3;
  cfg.dilations = {1};
  cfg.gru_hidden = 3;
  return cfg;
}

DccrnConfig desk_config() {
  DccrnConfig cfg;
  cfg.growth = 16;
  cfg.num_blocks = 2;
  cfg.dilations = {1, 2};
  return cfg;
}

template <typename T>
std::vector<T> random_values(std::mt19937_64* rng, size_t n, double amp = 0.5) {
  std::uniform_real_distribution<double> d(-amp, amp);
  std::vector<T> v(n);
  for (T& x : v) x = static_cast<T>(d(*rng));
  return v;
}

oracles::GruCellRef to_ref(const GruLayerParams<double>& g) {
  oracles::GruCellRef r;
  r.input = g.input_size();
  r.hidden = g.hidden_size();
  r.wz = g.wz.data;
  r.wr = g.wr.data;
  r.wh = g.wh.data;
  r.uz = g.uz.data;
  r.ur = g.ur.data;
  r.uh = g.uh.data;
  r.bz = g.bz.data;
  r.br = g.br.data;
  r.bh = g.bh.data;
  return r;
}

// Straight-line dense-block replay: explicit concatenation (newest feature
// map first), double-precision conv and leaky ReLU.
std::vector<double> dense_block_ref(const DenseBlockParams<double>& blk,
                                    const std::vector<double>& x, int n, double slope) {
  std::vector<std::vector<double>> maps = {x};  // block input
  std::vector<double> cur = x;
  for (size_t l = 0; l < blk.layers.size(); ++l) {
    const ConvKernel<double>& kern = blk.layers[l];
    std::vector<double> input;
    if (l == 0) {
      input = x;
    } else {
      const int c_total = kern.c_in();
      input.resize(static_cast<size_t>(n) * c_total);
      int off = 0;
      for (auto it = maps.rbegin(); it != maps.rend(); ++it) {
        const int c = static_cast<int>(it->size()) / n;
        for (int row = 0; row < n; ++row) {
          for (int ch = 0; ch < c; ++ch) {
            input[static_cast<size_t>(row) * c_total + off + ch] =
                (*it)[static_cast<size_t>(row) * c + ch];
          }
        }
        off += c;
      }
    }
    std::vector<double> y = oracles::conv1d(input, n, kern.c_in(), kern.weights.data,
                                            kern.k(), kern.c_out(), kern.bias.data,
                                            kern.dilation);
    for (double& v : y) v = v > 0.0 ? v : slope * v;
    maps.push_back(y);
    cur = y;
  }
  return cur;
}

TEST(DenseBlockTest, ChannelScheduleMatchesArchitectureTable) {
  DccrnConfig cfg;  // defaults: D=32
  DccrnParams<float> p(cfg);
  const int expect_in[5] = {32, 64, 96, 128, 160};
  for (const auto& blk : p.blocks) {
    for (int l = 0; l < 5; ++l) {
      EXPECT_EQ(blk.layers[static_cast<size_t>(l)].c_in(), expect_in[l]);
      EXPECT_EQ(blk.layers[static_cast<size_t>(l)].c_out(), 32);
    }
    EXPECT_EQ(blk.layers[2].k(), 55);
    EXPECT_EQ(blk.layers[0].k(), 5);
  }
  // Middle-layer dilations 1, 2, 4, 8 across the four blocks.
  for (int b = 0; b < 4; ++b) {
    EXPECT_EQ(p.blocks[static_cast<size_t>(b)].layers[2].dilation, 1 << b);
    EXPECT_EQ(p.blocks[static_cast<size_t>(b)].layers[0].dilation, 1);
  }
}

TEST(DenseBlockTest, ZeroWeightsGiveZeroOutput) {
  Tape<float> tp;
  DenseBlockParams<float> blk(4, 3, 5, 2);  // zero-initialized tensors
  std::vector<ConvLeaves<float>> leaves;
  for (const auto& l : blk.layers) {
    leaves.push_back({tp.leaf(l.weights, false), tp.leaf(l.bias, false), l.dilation});
  }
  std::mt19937_64 rng(3);
  auto x = tp.leaf(Tensor<float>({20, 4}, random_values<float>(&rng, 80)), false);
  auto y = dense_block_forward(tp, x, leaves, 0.01f);
  for (float v : tp.value(y).data) EXPECT_EQ(v, 0.f);
}

TEST(DenseBlockTest, TinyBlockMatchesUnrolledOracle) {
  // D=2, K=3, N=12, dilated middle layer, against the straight-line replay.
  std::mt19937_64 rng(7);
  DenseBlockParams<double> blk(2, 3, 3, 2);
  for (auto& l : blk.layers) {
    l.weights.data = random_values<double>(&rng, l.weights.data.size());
    l.bias.data = random_values<double>(&rng, l.bias.data.size());
  }
  const int n = 12;
  const std::vector<double> x = random_values<double>(&rng, n * 2);

  Tape<double> tp;
  std::vector<ConvLeaves<double>> leaves;
  for (const auto& l : blk.layers) {
    leaves.push_back({tp.leaf(l.weights, false), tp.leaf(l.bias, false), l.dilation});
  }
  auto y = dense_block_forward(tp, tp.leaf(Tensor<double>({n, 2}, x), false), leaves, 0.01);

  const auto ref = dense_block_ref(blk, x, n, 0.01);
  ASSERT_EQ(tp.value(y).data.size(), ref.size());
  for (size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(tp.value(y).data[i], ref[i], 1e-5) << i;
  }
}

TEST(DensenetTest, ShapeChainFollowsArchitecture) {
  DccrnConfig cfg = desk_config();
  DccrnParams<float> p = init_params<float>(cfg, 5);
  Tape<float> tp;
  TapeModel<float> m(tp, p, false, false);
  std::mt19937_64 rng(11);
  auto x = tp.leaf(Tensor<float>({1024, 1}, random_values<float>(&rng, 1024)), false);
  auto entry = tp.leaky_relu(tp.conv1d(x, m.entry_w(), m.entry_b(), 1), 0.01f);
  EXPECT_EQ(tp.value(entry).shape[0], 1024);
  EXPECT_EQ(tp.value(entry).shape[1], cfg.growth);
  auto out = m.densenet_forward(x);
  EXPECT_EQ(tp.value(out).shape[0], 1024);
  EXPECT_EQ(tp.value(out).shape[1], 1);

  auto bad = tp.leaf(Tensor<float>({512, 1}), false);
  EXPECT_THROW(m.densenet_forward(bad), std::invalid_argument);
}

TEST(DensenetTest, ReceptiveFieldMatchesHandArithmetic) {
  DccrnConfig cfg;  // full size
  DccrnParams<float> p(cfg);
  // 1 + 2*54 (entry/exit) + 4 blocks * (4 small layers * 4) + 54*(1+2+4+8).
  EXPECT_EQ(p.receptive_field(), 983);
  EXPECT_LE(p.receptive_field(), cfg.frame_size);

  DccrnParams<float> desk(desk_config());
  EXPECT_EQ(desk.receptive_field(), 1 + 2 * 54 + 2 * 16 + 54 * (1 + 2));

  // A frame too small for the stack is rejected at construction.
  DccrnConfig tiny;
  tiny.frame_size = 512;
  tiny.sub_frames = 2;
  EXPECT_THROW(DccrnParams<float>{tiny}, std::invalid_argument);
}

TEST(DensenetTest, ZeroInputZeroBiasGivesZeroOutput) {
  DccrnConfig cfg = miniature_config();
  DccrnParams<float> p = init_params<float>(cfg, 9);  // biases stay zero
  Tape<float> tp;
  TapeModel<float> m(tp, p, false, false);
  auto x = tp.leaf(Tensor<float>({cfg.frame_size, 1}), false);
  auto y = m.densenet_forward(x);
  for (float v : tp.value(y).data) EXPECT_EQ(v, 0.f);
}

TEST(GruCellTest, InjectedZeroUpdateGateKeepsState) {
  std::mt19937_64 rng(13);
  GruLayerParams<float> g(6, 6);
  for (auto* t : {&g.wz, &g.wr, &g.wh, &g.uz, &g.ur, &g.uh}) {
    t->data = random_values<float>(&rng, t->data.size());
  }
  Tape<float> tp;
  auto leaves = bind_gru_leaves(tp, g);
  const std::vector<float> h_prev = random_values<float>(&rng, 6);
  const std::vector<float> x = random_values<float>(&rng, 6);
  const std::vector<float> z_zero(6, 0.f);
  auto h = gru_cell_step(tp, leaves, tp.leaf(Tensor<float>({6}, x), false),
                         tp.leaf(Tensor<float>({6}, h_prev), false), &z_zero);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(tp.value(h).data[static_cast<size_t>(i)], h_prev[static_cast<size_t>(i)]);
}

TEST(GruCellTest, AllZeroWeightsProduceNeutralGates) {
  GruLayerParams<float> g(4, 4);
  Tape<float> tp;
  auto leaves = bind_gru_leaves(tp, g);
  auto x = tp.leaf(Tensor<float>({4}, {0.3f, -0.2f, 0.9f, 0.f}), false);
  auto h0 = tp.leaf(Tensor<float>({4}), false);
  auto h = gru_cell_step(tp, leaves, x, h0);
  // z = r = 0.5, cand = 0, h' = 0.
  for (float v : tp.value(h).data) EXPECT_EQ(v, 0.f);
}

TEST(GruCellTest, RandomCellMatchesEquationTranscription) {
  std::mt19937_64 rng(17);
  GruLayerParams<double> g(6, 6);
  for (auto* t : {&g.wz, &g.wr, &g.wh, &g.uz, &g.ur, &g.uh, &g.bz, &g.br, &g.bh}) {
    t->data = random_values<double>(&rng, t->data.size());
  }
  const auto ref_cell = to_ref(g);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_values<double>(&rng, 6, 1.0);
    const auto h = random_values<double>(&rng, 6, 1.0);
    Tape<double> tp;
    auto leaves = bind_gru_leaves(tp, g);
    auto out = gru_cell_step(tp, leaves, tp.leaf(Tensor<double>({6}, x), false),
                             tp.leaf(Tensor<double>({6}, h), false));
    const auto ref = ref_cell.step(x, h);
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(tp.value(out).data[static_cast<size_t>(i)], ref[static_cast<size_t>(i)], 1e-6);
    }
  }
}

TEST(GruForwardTest, OutputDimensionIsSubFrameSize) {
  DccrnConfig cfg;  // full size
  DccrnParams<float> p = init_params<float>(cfg, 21);
  Tape<float> tp;
  TapeModel<float> m(tp, p, false, false);
  std::mt19937_64 rng(23);
  std::vector<Tape<float>::NodeId> subs;
  for (int i = 0; i < 4; ++i) {
    subs.push_back(tp.leaf(Tensor<float>({256}, random_values<float>(&rng, 256)), false));
  }
  auto out = m.gru_forward(subs);
  EXPECT_EQ(tp.value(out).shape[0], 256);
  EXPECT_EQ(tp.value(out).rank(), 1);

  std::vector<Tape<float>::NodeId> wrong(subs.begin(), subs.begin() + 2);
  EXPECT_THROW(m.gru_forward(wrong), std::invalid_argument);
}

TEST(GruForwardTest, MatchesStackedCellOracle) {
  // Stacked double-precision reference composed step by step.
  DccrnConfig cfg = miniature_config();
  DccrnParams<double> p = init_params<double>(cfg, 29);
  const auto ref1 = to_ref(p.gru1);
  const auto ref2 = to_ref(p.gru2);
  std::mt19937_64 rng(31);
  std::vector<std::vector<double>> subs;
  for (int i = 0; i < cfg.sub_frames; ++i) {
    subs.push_back(random_values<double>(&rng, static_cast<size_t>(cfg.sub_size())));
  }

  std::vector<double> h1(static_cast<size_t>(cfg.gru_hidden), 0.0);
  std::vector<double> h2(static_cast<size_t>(cfg.sub_size()), 0.0);
  for (const auto& s : subs) {
    h1 = ref1.step(s, h1);
    h2 = ref2.step(h1, h2);
  }

  Tape<double> tp;
  TapeModel<double> m(tp, p, false, false);
  std::vector<Tape<double>::NodeId> sub_ids;
  for (const auto& s : subs) {
    sub_ids.push_back(tp.leaf(Tensor<double>({cfg.sub_size()}, s), false));
  }
  auto out = m.gru_forward(sub_ids);
  for (int i = 0; i < cfg.sub_size(); ++i) {
    EXPECT_NEAR(tp.value(out).data[static_cast<size_t>(i)], h2[static_cast<size_t>(i)], 1e-12);
  }
}

TEST(GruForwardTest, SingleStepSequence) {
  DccrnConfig cfg = miniature_config();
  cfg.frame_size = 4;
  cfg.sub_frames = 1;
  cfg.kernel_small = 3;
  cfg.kernel_large = 3;
  // Receptive field 15 > 4, so build the GRU layers directly instead.
  GruLayerParams<double> g1(4, 3);
  GruLayerParams<double> g2(3, 4);
  std::mt19937_64 rng(37);
  for (auto* t : {&g1.wz, &g1.wr, &g1.wh}) t->data = random_values<double>(&rng, t->data.size());
  for (auto* t : {&g2.wz, &g2.wr, &g2.wh}) t->data = random_values<double>(&rng, t->data.size());
  const auto x = random_values<double>(&rng, 4);

  Tape<double> tp;
  auto l1 = bind_gru_leaves(tp, g1);
  auto l2 = bind_gru_leaves(tp, g2);
  auto xid = tp.leaf(Tensor<double>({4}, x), false);
  auto h1 = gru_cell_step(tp, l1, xid, tp.leaf(Tensor<double>({3}), false));
  auto h2 = gru_cell_step(tp, l2, h1, tp.leaf(Tensor<double>({4}), false));

  std::vector<double> r1 = to_ref(g1).step(x, std::vector<double>(3, 0.0));
  std::vector<double> r2 = to_ref(g2).step(r1, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(tp.value(h2).data[static_cast<size_t>(i)], r2[static_cast<size_t>(i)], 1e-12);
  }
}

TEST(DccrnForwardTest, OutputLengthAndShortcutDominance) {
  DccrnConfig cfg = desk_config();
  DccrnParams<float> p = init_params<float>(cfg, 41);
  std::mt19937_64 rng(43);
  const auto frame = random_values<float>(&rng, 1024);

  const auto out = dccrn_forward_frame(p, frame);
  EXPECT_EQ(out.size(), 256u);

  // GRU weights zeroed: output equals the DenseNet's last sub-frame exactly.
  DccrnParams<float> zeroed = p;
  for (auto& np : collect_params(zeroed)) {
    if (np.rnn) std::fill(np.tensor->data.begin(), np.tensor->data.end(), 0.f);
  }
  const auto zg = dccrn_forward_frame(zeroed, frame);
  Tape<float> tp;
  TapeModel<float> m(tp, zeroed, false, false);
  auto dense = m.densenet_forward(tp.leaf(Tensor<float>({1024, 1}, frame), false));
  const auto& dv = tp.value(dense).data;
  for (int i = 0; i < 256; ++i) {
    EXPECT_EQ(zg[static_cast<size_t>(i)], dv[static_cast<size_t>(768 + i)]) << i;
  }

  // The zero_gru ablation option takes the same shortcut-only path.
  const auto ablated = dccrn_forward_frame(p, frame, ForwardOptions{.zero_gru = true});
  Tape<float> tp2;
  TapeModel<float> m2(tp2, p, false, false);
  auto dense2 = m2.densenet_forward(tp2.leaf(Tensor<float>({1024, 1}, frame), false));
  for (int i = 0; i < 256; ++i) {
    EXPECT_EQ(ablated[static_cast<size_t>(i)], tp2.value(dense2).data[static_cast<size_t>(768 + i)]);
  }
}

TEST(DccrnForwardTest, MiniatureEndToEndMatchesStraightLineOracle) {
  DccrnConfig cfg = miniature_config();
  DccrnParams<double> p = init_params<double>(cfg, 47);
  std::mt19937_64 rng(53);
  const auto frame = random_values<double>(&rng, static_cast<size_t>(cfg.frame_size));

  // Straight-line replay: entry conv + leaky, dense block, exit conv,
  // reshape into sub-frames, stacked GRU, additive shortcut.
  std::vector<double> cur = oracles::conv1d(frame, cfg.frame_size, 1, p.entry.weights.data,
                                            p.entry.k(), cfg.growth, p.entry.bias.data, 1);
  for (double& v : cur) v = v > 0.0 ? v : 0.01 * v;
  cur = dense_block_ref(p.blocks[0], cur, cfg.frame_size, 0.01);
  cur = oracles::conv1d(cur, cfg.frame_size, cfg.growth, p.exit.weights.data, p.exit.k(), 1,
                        p.exit.bias.data, 1);
  const int sub = cfg.sub_size();
  const auto ref1 = to_ref(p.gru1);
  const auto ref2 = to_ref(p.gru2);
  std::vector<double> h1(static_cast<size_t>(cfg.gru_hidden), 0.0);
  std::vector<double> h2(static_cast<size_t>(sub), 0.0);
  for (int i = 0; i < cfg.sub_frames; ++i) {
    std::vector<double> s(cur.begin() + i * sub, cur.begin() + (i + 1) * sub);
    h1 = ref1.step(s, h1);
    h2 = ref2.step(h1, h2);
  }
  std::vector<double> expected(static_cast<size_t>(sub));
  for (int i = 0; i < sub; ++i) {
    expected[static_cast<size_t>(i)] =
        h2[static_cast<size_t>(i)] + cur[static_cast<size_t>((cfg.sub_frames - 1) * sub + i)];
  }

  const auto got = dccrn_forward_frame(p, frame);
  for (int i = 0; i < sub; ++i) {
    EXPECT_NEAR(got[static_cast<size_t>(i)], expected[static_cast<size_t>(i)], 1e-5) << i;
  }
}

TEST(ParamCountTest, HandArithmeticOverArchitectureTable) {
  DccrnConfig cfg;  // full size
  DccrnParams<float> p(cfg);
  const ParamCount c = param_count(p);
  // Dense block weights: 5120 + 10240 + 168960 + 20480 + 25600.
  for (int64_t bw : c.block_weights) EXPECT_EQ(bw, 230400);
  EXPECT_EQ(c.gru2_weights, 3 * (32 + 256) * 256);  // 221184
  EXPECT_EQ(c.gru1_weights, 3 * (256 + 32) * 32);   // 27648
  EXPECT_EQ(c.entry_total, 55 * 32 + 32);
  EXPECT_EQ(c.exit_total, 55 * 32 + 1);
  EXPECT_EQ(c.cnn_total, 1792 + 4 * 230560 + 1761);
  EXPECT_EQ(c.rnn_total, 27744 + 221952);
  EXPECT_EQ(c.total, c.cnn_total + c.rnn_total);
  // Bracket around the publicly reported 1.38 M figure.
  EXPECT_GE(c.total, 1000000);
  EXPECT_LE(c.total, 1600000);
}

TEST(InitTest, DeterministicAndBounded) {
  DccrnConfig cfg = desk_config();
  DccrnParams<float> a = init_params<float>(cfg, 77);
  DccrnParams<float> b = init_params<float>(cfg, 77);
  DccrnParams<float> c = init_params<float>(cfg, 78);
  auto pa = collect_params(a), pb = collect_params(b), pc = collect_params(c);
  bool any_diff = false;
  for (size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].tensor->data, pb[i].tensor->data) << pa[i].name;
    if (pa[i].tensor->data != pc[i].tensor->data) any_diff = true;
    if (pa[i].fan_in > 0) {
      const float bound = 1.f / std::sqrt(static_cast<float>(pa[i].fan_in)) + 1e-7f;
      for (float v : pa[i].tensor->data) {
        EXPECT_LE(std::abs(v), bound) << pa[i].name;
      }
    } else {
      for (float v : pa[i].tensor->data) EXPECT_EQ(v, 0.f);
    }
  }
  EXPECT_TRUE(any_diff);
}

TEST(InitTest, HundredSeedForwardSanitySweep) {
  DccrnConfig cfg = miniature_config();
  std::mt19937_64 rng(59);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    DccrnParams<float> p = init_params<float>(cfg, seed);
    const auto frame = random_values<float>(&rng, static_cast<size_t>(cfg.frame_size));
    const auto out = dccrn_forward_frame(p, frame);
    double sq = 0.0;
    for (float v : out) {
      ASSERT_TRUE(std::isfinite(v));
      sq += static_cast<double>(v) * v;
    }
    const double rms = std::sqrt(sq / static_cast<double>(out.size()));
    EXPECT_GT(rms, 1e-6) << seed;
    EXPECT_LT(rms, 1e2) << seed;
  }
}

TEST(GradientFlowTest, EveryParameterReceivesGradient) {
  DccrnConfig cfg = miniature_config();
  DccrnParams<double> p = init_params<double>(cfg, 61);
  std::mt19937_64 rng(67);
  Tape<double> tp;
  TapeModel<double> m(tp, p, true, true);
  auto x = tp.leaf(
      Tensor<double>({cfg.frame_size, 1}, random_values<double>(&rng, static_cast<size_t>(cfg.frame_size))),
      false);
  auto g = m.dccrn_forward(x);
  auto target = tp.leaf(
      Tensor<double>({cfg.sub_size()}, random_values<double>(&rng, static_cast<size_t>(cfg.sub_size()))),
      false);
  tp.backward(tp.mse(g.output, target));
  const auto& named = m.named();
  const auto& ids = m.leaf_ids();
  for (size_t i = 0; i < ids.size(); ++i) {
    double mass = 0.0;
    for (double gv : tp.grad_data(ids[i])) mass += std::abs(gv);
    EXPECT_GT(mass, 0.0) << named[i].name;
  }
}

TEST(CausalityTest, FirstSampleInfluencesOutputThroughGru) {
  DccrnConfig cfg = desk_config();
  cfg.growth = 8;
  DccrnParams<float> p = init_params<float>(cfg, 71);
  std::mt19937_64 rng(73);
  auto frame = random_values<float>(&rng, 1024);
  const auto base = dccrn_forward_frame(p, frame);
  frame[0] += 0.25f;
  const auto bumped = dccrn_forward_frame(p, frame);
  double diff = 0.0;
  for (size_t i = 0; i < base.size(); ++i) diff += std::abs(base[i] - bumped[i]);
  EXPECT_GT(diff, 0.0);
}

TEST(ConfigTest, EnlargedFrameVariantKeepsSubFrameSize) {
  const DccrnConfig big = DccrnConfig::with_frame_size(4096);
  EXPECT_EQ(big.sub_frames, 16);
  EXPECT_EQ(big.sub_size(), 256);
  DccrnParams<float> p(big);  // receptive field still fits
  EXPECT_EQ(p.gru2.hidden_size(), 256);
  EXPECT_THROW(DccrnConfig::with_frame_size(1000), std::invalid_argument);
}

TEST(LedgerTest, NineRowsWithArchitectureShapes) {
  const std::string ledger = shape_ledger(DccrnConfig{});
  int rows = 0;
  for (char ch : ledger) rows += (ch == '\n');
  EXPECT_EQ(rows, 9);
  EXPECT_NE(ledger.find("(55, 1, 32)"), std::string::npos);
  EXPECT_NE(ledger.find("(55, 96, 32)"), std::string::npos);
  EXPECT_NE(ledger.find("(5, 160, 32)"), std::string::npos);
  EXPECT_NE(ledger.find("(256+32, 32)x3"), std::string::npos);
  EXPECT_NE(ledger.find("(32+256, 256)x3"), std::string::npos);
}

}  // namespace
