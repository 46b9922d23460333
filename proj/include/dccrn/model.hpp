// dccrn/model.hpp

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

// The DCCRN network: a dilated densely-connected 1-D convolutional front end,
// a two-layer many-to-one GRU back end, and an additive shortcut carrying the
// front end's last sub-frame to the output.

#ifndef DCCRN_MODEL_HPP_
#define DCCRN_MODEL_HPP_

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dccrn/dsp.hpp"
#include "dccrn/tensor.hpp"

namespace dccrn {

struct DccrnConfig {
  int frame_size = 1024;                  // N
  int sub_frames = 4;                     // M
  int growth = 32;                        // D, channels added per dense layer
  int num_blocks = 4;
  int kernel_small = 5;                   // K_s
  int kernel_large = 55;                  // K_l, entry/exit and block middles
  std::vector<int> dilations = {1, 2, 4, 8};  // middle-layer dilation per block
  int gru_hidden = 32;                    // first GRU layer width
  float leaky_slope = 0.01f;

  int sub_size() const { return frame_size / sub_frames; }
  dsp::FramePlan plan() const { return dsp::FramePlan{frame_size, sub_frames}; }

  void validate() const {
    plan().validate();
    DCCRN_CHECK(growth >= 1 && num_blocks >= 1, "growth and block count must be positive");
    DCCRN_CHECK(kernel_small % 2 == 1 && kernel_large % 2 == 1, "kernel sizes must be odd");
    DCCRN_CHECK(static_cast<int>(dilations.size()) == num_blocks,
                "need one middle-layer dilation per block");
    for (int d : dilations) DCCRN_CHECK(d >= 1, "dilations must be >= 1");
    DCCRN_CHECK(gru_hidden >= 1, "gru_hidden must be positive");
    DCCRN_CHECK(leaky_slope > 0.f && leaky_slope < 1.f, "leaky slope must be in (0,1)");
  }

  // Frame-size variant keeping 256-sample sub-frames (the enlarged-frame
  // configuration); frame_size must be a multiple of 256.
  static DccrnConfig with_frame_size(int n) {
    DccrnConfig c;
    DCCRN_CHECK(n % 256 == 0, "frame size must be a multiple of 256");
    c.frame_size = n;
    c.sub_frames = n / 256;
    return c;
  }
};

// One dense block: five conv layers, each consuming the channel-concatenation
// of the block input and all previous layer outputs (newest first). The
// middle layer uses the large kernel and the block's dilation rate.
template <typename T>
struct DenseBlockParams {
  std::vector<ConvKernel<T>> layers;
  int middle_dilation = 1;

  DenseBlockParams() = default;
  DenseBlockParams(int growth, int k_small, int k_large, int dilation)
      : middle_dilation(dilation) {
    for (int l = 0; l < 5; ++l) {
      const bool mid = (l == 2);
      layers.emplace_back(mid ? k_large : k_small, (l + 1) * growth, growth,
                          mid ? dilation : 1);
    }
  }
};

// z, r and candidate weights of one GRU layer. W_* map the input, U_* map the
// previous hidden state; one bias per gate.
template <typename T>
struct GruLayerParams {
  Tensor<T> wz, wr, wh;  // (input, hidden)
  Tensor<T> uz, ur, uh;  // (hidden, hidden)
  Tensor<T> bz, br, bh;  // (hidden)

  GruLayerParams() = default;
  GruLayerParams(int input, int hidden)
      : wz({input, hidden}), wr({input, hidden}), wh({input, hidden}),
        uz({hidden, hidden}), ur({hidden, hidden}), uh({hidden, hidden}),
        bz({hidden}), br({hidden}), bh({hidden}) {}

  int input_size() const { return wz.shape[0]; }
  int hidden_size() const { return wz.shape[1]; }
};

template <typename T>
struct DccrnParams {
  DccrnConfig config;
  ConvKernel<T> entry;                      // (K_l, 1, D)
  std::vector<DenseBlockParams<T>> blocks;  // num_blocks
  ConvKernel<T> exit;                       // (K_l, D, 1)
  GruLayerParams<T> gru1;                   // sub_size -> gru_hidden
  GruLayerParams<T> gru2;                   // gru_hidden -> sub_size

  DccrnParams() = default;
  explicit DccrnParams(const DccrnConfig& cfg) : config(cfg) {
    cfg.validate();
    entry = ConvKernel<T>(cfg.kernel_large, 1, cfg.growth);
    for (int b = 0; b < cfg.num_blocks; ++b) {
      blocks.emplace_back(cfg.growth, cfg.kernel_small, cfg.kernel_large,
                          cfg.dilations[static_cast<size_t>(b)]);
    }
    exit = ConvKernel<T>(cfg.kernel_large, cfg.growth, 1);
    gru1 = GruLayerParams<T>(cfg.sub_size(), cfg.gru_hidden);
    gru2 = GruLayerParams<T>(cfg.gru_hidden, cfg.sub_size());
    DCCRN_CHECK(receptive_field() <= cfg.frame_size,
                "CNN receptive field " << receptive_field() << " exceeds frame size "
                                       << cfg.frame_size);
  }

  // Number of input samples influencing one output sample of the conv stack:
  // 1 + sum of (K-1)*dilation over every conv layer, walked from the actual
  // kernel objects.
  int64_t receptive_field() const {
    int64_t rf = 1;
    rf += static_cast<int64_t>(entry.k() - 1) * entry.dilation;
    for (const auto& b : blocks) {
      for (const auto& l : b.layers) rf += static_cast<int64_t>(l.k() - 1) * l.dilation;
    }
    rf += static_cast<int64_t>(exit.k() - 1) * exit.dilation;
    return rf;
  }
};

template <typename T>
struct NamedParam {
  std::string name;
  Tensor<T>* tensor;
  bool rnn;     // true for the GRU component
  int fan_in;   // 0 for biases
};

namespace detail {

template <typename T>
void collect_gru(const std::string& prefix, GruLayerParams<T>& g,
                 std::vector<NamedParam<T>>* out) {
  const int in = g.input_size(), hid = g.hidden_size();
  out->push_back({prefix + ".wz", &g.wz, true, in});
  out->push_back({prefix + ".wr", &g.wr, true, in});
  out->push_back({prefix + ".wh", &g.wh, true, in});
  out->push_back({prefix + ".uz", &g.uz, true, hid});
  out->push_back({prefix + ".ur", &g.ur, true, hid});
  out->push_back({prefix + ".uh", &g.uh, true, hid});
  out->push_back({prefix + ".bz", &g.bz, true, 0});
  out->push_back({prefix + ".br", &g.br, true, 0});
  out->push_back({prefix + ".bh", &g.bh, true, 0});
}

}  // namespace detail

// Stable, name-addressed view of every learnable tensor. Checkpoint records,
// optimizer slots and initialization draws all follow this order.
template <typename T>
std::vector<NamedParam<T>> collect_params(DccrnParams<T>& p) {
  std::vector<NamedParam<T>> out;
  out.push_back({"cnn.entry.w", &p.entry.weights, false, p.entry.k() * p.entry.c_in()});
  out.push_back({"cnn.entry.b", &p.entry.bias, false, 0});
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    for (size_t l = 0; l < p.blocks[b].layers.size(); ++l) {
      ConvKernel<T>& k = p.blocks[b].layers[l];
      std::ostringstream name;
      name << "cnn.block" << (b + 1) << ".layer" << (l + 1);
      out.push_back({name.str() + ".w", &k.weights, false, k.k() * k.c_in()});
      out.push_back({name.str() + ".b", &k.bias, false, 0});
    }
  }
  out.push_back({"cnn.exit.w", &p.exit.weights, false, p.exit.k() * p.exit.c_in()});
  out.push_back({"cnn.exit.b", &p.exit.bias, false, 0});
  detail::collect_gru("rnn.gru1", p.gru1, &out);
  detail::collect_gru("rnn.gru2", p.gru2, &out);
  return out;
}

// Fan-in-scaled uniform init U(-1/sqrt(fan_in), +1/sqrt(fan_in)) for weights,
// zero biases; fully determined by the seed.
template <typename T>
DccrnParams<T> init_params(const DccrnConfig& cfg, uint64_t seed) {
  DccrnParams<T> p(cfg);
  std::mt19937_64 rng(seed);
  for (NamedParam<T>& np : collect_params(p)) {
    if (np.fan_in == 0) continue;  // biases stay zero
    const double bound = 1.0 / std::sqrt(static_cast<double>(np.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (T& v : np.tensor->data) v = static_cast<T>(dist(rng));
  }
  return p;
}

struct ParamCount {
  int64_t total = 0;
  int64_t cnn_total = 0, rnn_total = 0;
  int64_t entry_total = 0, exit_total = 0;
  std::vector<int64_t> block_weights;  // weights only, per block
  std::vector<int64_t> block_totals;
  int64_t gru1_weights = 0, gru1_total = 0;
  int64_t gru2_weights = 0, gru2_total = 0;
};

template <typename T>
ParamCount param_count(DccrnParams<T>& p) {
  ParamCount c;
  c.entry_total = p.entry.weights.numel() + p.entry.bias.numel();
  c.exit_total = p.exit.weights.numel() + p.exit.bias.numel();
  for (const auto& b : p.blocks) {
    int64_t w = 0, t = 0;
    for (const auto& l : b.layers) {
      w += l.weights.numel();
      t += l.weights.numel() + l.bias.numel();
    }
    c.block_weights.push_back(w);
    c.block_totals.push_back(t);
    c.cnn_total += t;
  }
  c.cnn_total += c.entry_total + c.exit_total;
  auto gru_w = [](const GruLayerParams<T>& g) {
    return g.wz.numel() + g.wr.numel() + g.wh.numel() + g.uz.numel() + g.ur.numel() +
           g.uh.numel();
  };
  auto gru_b = [](const GruLayerParams<T>& g) {
    return g.bz.numel() + g.br.numel() + g.bh.numel();
  };
  c.gru1_weights = gru_w(p.gru1);
  c.gru1_total = c.gru1_weights + gru_b(p.gru1);
  c.gru2_weights = gru_w(p.gru2);
  c.gru2_total = c.gru2_weights + gru_b(p.gru2);
  c.rnn_total = c.gru1_total + c.gru2_total;
  c.total = c.cnn_total + c.rnn_total;
  return c;
}

struct ForwardOptions {
  bool zero_gru = false;      // ablation: output is the shortcut alone
  bool use_shortcut = true;   // debug: drop the additive shortcut
};

// Weight/bias leaf pairs of one dense block's five layers, plus the leaves of
// one GRU layer. Free-function forwards operate on these so that blocks and
// cells can run stand-alone (and at sizes the full model would reject).
template <typename T>
struct ConvLeaves {
  typename Tape<T>::NodeId w, b;
  int dilation;
};

template <typename T>
struct GruLeaves {
  typename Tape<T>::NodeId wz, wr, wh, uz, ur, uh, bz, br, bh;
};

// Five conv+leaky-ReLU layers; layer l consumes the channel-concatenation of
// the block input and all previous layer outputs, newest feature map first.
template <typename T>
typename Tape<T>::NodeId dense_block_forward(Tape<T>& tp, typename Tape<T>::NodeId x,
                                             const std::vector<ConvLeaves<T>>& layers,
                                             T slope) {
  std::vector<typename Tape<T>::NodeId> feature_maps = {x};
  typename Tape<T>::NodeId cur = x;
  for (size_t l = 0; l < layers.size(); ++l) {
    typename Tape<T>::NodeId input;
    if (l == 0) {
      input = x;
    } else {
      std::vector<typename Tape<T>::NodeId> parts(feature_maps.rbegin(), feature_maps.rend());
      input = tp.concat_channels(parts);
    }
    cur = tp.leaky_relu(tp.conv1d(input, layers[l].w, layers[l].b, layers[l].dilation), slope);
    feature_maps.push_back(cur);
  }
  return cur;
}

// One GRU update:
//   z = sigmoid(Wz x + Uz h + bz)        r = sigmoid(Wr x + Ur h + br)
//   cand = tanh(Wh x + Uh (r . h) + bh)  h' = (1 - z) . h + z . cand
// z_forced, when given, bypasses the update gate (test hook).
template <typename T>
typename Tape<T>::NodeId gru_cell_step(Tape<T>& tp, const GruLeaves<T>& g,
                                       typename Tape<T>::NodeId x,
                                       typename Tape<T>::NodeId h_prev,
                                       const std::vector<T>* z_forced = nullptr) {
  typename Tape<T>::NodeId z;
  if (z_forced != nullptr) {
    z = tp.leaf(Tensor<T>({static_cast<int>(z_forced->size())}, *z_forced), false);
  } else {
    z = tp.sigmoid(tp.add(tp.linear(x, g.wz, g.bz), tp.matvec(h_prev, g.uz)));
  }
  typename Tape<T>::NodeId r =
      tp.sigmoid(tp.add(tp.linear(x, g.wr, g.br), tp.matvec(h_prev, g.ur)));
  typename Tape<T>::NodeId cand = tp.tanh_op(
      tp.add(tp.linear(x, g.wh, g.bh), tp.matvec(tp.hadamard(r, h_prev), g.uh)));
  return tp.add(tp.hadamard(tp.one_minus(z), h_prev), tp.hadamard(z, cand));
}

// Binds a GRU layer's tensors onto a tape as leaves (readback not tracked);
// for stand-alone cell tests.
template <typename T>
GruLeaves<T> bind_gru_leaves(Tape<T>& tp, const GruLayerParams<T>& g, bool needs_grad = false) {
  return GruLeaves<T>{tp.leaf(g.wz, needs_grad), tp.leaf(g.wr, needs_grad),
                      tp.leaf(g.wh, needs_grad), tp.leaf(g.uz, needs_grad),
                      tp.leaf(g.ur, needs_grad), tp.leaf(g.uh, needs_grad),
                      tp.leaf(g.bz, needs_grad), tp.leaf(g.br, needs_grad),
                      tp.leaf(g.bh, needs_grad)};
}

// Parameters bound onto one tape as leaf nodes, in collect_params order.
// cnn/rnn grad switches implement the stage-wise freezing.
template <typename T>
class TapeModel {
 public:
  using NodeId = typename Tape<T>::NodeId;

  TapeModel(Tape<T>& tape, DccrnParams<T>& params, bool cnn_grad, bool rnn_grad)
      : tape_(tape), params_(params) {
    named_ = collect_params(params);
    for (NamedParam<T>& np : named_) {
      leaf_ids_.push_back(tape_.leaf(*np.tensor, np.rnn ? rnn_grad : cnn_grad));
    }
  }

  const std::vector<NamedParam<T>>& named() const { return named_; }
  const std::vector<NodeId>& leaf_ids() const { return leaf_ids_; }
  const DccrnConfig& config() const { return params_.config; }

  NodeId dense_block_forward(NodeId x, int block_index) {
    const DenseBlockParams<T>& blk = params_.blocks[static_cast<size_t>(block_index)];
    std::vector<ConvLeaves<T>> layers;
    for (size_t l = 0; l < blk.layers.size(); ++l) {
      const auto [w, b] = conv_leaf(block_index, static_cast<int>(l));
      layers.push_back(ConvLeaves<T>{w, b, blk.layers[l].dilation});
    }
    return dccrn::dense_block_forward(tape_, x, layers,
                                      static_cast<T>(params_.config.leaky_slope));
  }

  // Entry conv, the dense blocks, exit conv. Feature length is preserved at
  // every layer; the exit layer is linear so the output can carry a signed
  // waveform.
  NodeId densenet_forward(NodeId x) {
    const Tensor<T>& xv = tape_.value(x);
    DCCRN_CHECK(xv.rank() == 2 && xv.shape[0] == params_.config.frame_size &&
                    xv.shape[1] == 1,
                "densenet input must be (" << params_.config.frame_size << ", 1)");
    NodeId cur = tape_.leaky_relu(tape_.conv1d(x, entry_w(), entry_b(), 1),
                                  static_cast<T>(params_.config.leaky_slope));
    for (int b = 0; b < params_.config.num_blocks; ++b) {
      cur = dense_block_forward(cur, b);
    }
    return tape_.conv1d(cur, exit_w(), exit_b(), 1);
  }

  GruLeaves<T> gru_leaves(int layer) const {
    const size_t base = gru_base_index(layer);
    return GruLeaves<T>{leaf_ids_[base + 0], leaf_ids_[base + 1], leaf_ids_[base + 2],
                        leaf_ids_[base + 3], leaf_ids_[base + 4], leaf_ids_[base + 5],
                        leaf_ids_[base + 6], leaf_ids_[base + 7], leaf_ids_[base + 8]};
  }

  // Two stacked layers over the M sub-frames, zero initial state; only the
  // second layer's final hidden state is returned (many-to-one readout).
  NodeId gru_forward(const std::vector<NodeId>& subframes) {
    DCCRN_CHECK(static_cast<int>(subframes.size()) == params_.config.sub_frames,
                "expected " << params_.config.sub_frames << " sub-frames");
    const GruLeaves<T> g1 = gru_leaves(1);
    const GruLeaves<T> g2 = gru_leaves(2);
    NodeId h1 = tape_.leaf(Tensor<T>({params_.config.gru_hidden}), false);
    NodeId h2 = tape_.leaf(Tensor<T>({params_.config.sub_size()}), false);
    for (NodeId s : subframes) {
      const Tensor<T>& sv = tape_.value(s);
      DCCRN_CHECK(sv.rank() == 1 && sv.shape[0] == params_.config.sub_size(),
                  "sub-frame must be rank-1 of " << params_.config.sub_size());
      h1 = dccrn::gru_cell_step(tape_, g1, s, h1);
      h2 = dccrn::gru_cell_step(tape_, g2, h1, h2);
    }
    return h2;
  }

  struct Graph {
    NodeId input;       // (N, 1)
    NodeId dense_out;   // (N, 1)
    NodeId dense_flat;  // (N)
    NodeId last_sub;    // (N/M), the shortcut
    NodeId output;      // (N/M)
  };

  // Full forward: the GRU consumes the DenseNet output reshaped into M
  // consecutive sub-frames (oldest first), and the DenseNet's newest
  // sub-frame is added to the GRU output.
  Graph dccrn_forward(NodeId x, const ForwardOptions& opt = {}) {
    Graph gph;
    gph.input = x;
    gph.dense_out = densenet_forward(x);
    const int n = params_.config.frame_size;
    const int m = params_.config.sub_frames;
    const int sub = params_.config.sub_size();
    gph.dense_flat = tape_.reshape(gph.dense_out, {n});
    std::vector<NodeId> subs;
    for (int i = 0; i < m; ++i) {
      subs.push_back(tape_.slice_features(gph.dense_flat, i * sub, sub));
    }
    gph.last_sub = subs.back();
    if (opt.zero_gru) {
      gph.output = opt.use_shortcut
                       ? gph.last_sub
                       : tape_.leaf(Tensor<T>({sub}), false);
      return gph;
    }
    NodeId gru_out = gru_forward(subs);
    gph.output = opt.use_shortcut ? tape_.add(gru_out, gph.last_sub) : gru_out;
    return gph;
  }

  NodeId entry_w() const { return leaf_ids_[0]; }
  NodeId entry_b() const { return leaf_ids_[1]; }
  NodeId exit_w() const { return leaf_ids_[exit_index()]; }
  NodeId exit_b() const { return leaf_ids_[exit_index() + 1]; }

 private:
  std::pair<NodeId, NodeId> conv_leaf(int block, int layer) const {
    const size_t idx = 2 + (static_cast<size_t>(block) * 5 + layer) * 2;
    return {leaf_ids_[idx], leaf_ids_[idx + 1]};
  }
  size_t exit_index() const {
    return 2 + static_cast<size_t>(params_.config.num_blocks) * 5 * 2;
  }
  size_t gru_base_index(int layer) const {
    return exit_index() + 2 + (layer == 1 ? 0 : 9);
  }

  Tape<T>& tape_;
  DccrnParams<T>& params_;
  std::vector<NamedParam<T>> named_;
  std::vector<NodeId> leaf_ids_;
};

// Single-frame convenience forward used by tests and inspection paths.
template <typename T>
std::vector<T> dccrn_forward_frame(DccrnParams<T>& params, const std::vector<T>& frame,
                                   const ForwardOptions& opt = {}) {
  DCCRN_CHECK(static_cast<int>(frame.size()) == params.config.frame_size,
              "frame length must be " << params.config.frame_size);
  Tape<T> tape;
  TapeModel<T> model(tape, params, false, false);
  typename Tape<T>::NodeId x =
      tape.leaf(Tensor<T>({params.config.frame_size, 1}, frame), false);
  auto grap = model.dccrn_forward(x, opt);
  return tape.value(grap.output).data;
}

// The architecture table: one row per distinct stage of the pipeline, with
// the dense-block kernel chain listed once (it repeats across blocks).
inline std::string shape_ledger(const DccrnConfig& cfg) {
  cfg.validate();
  const int n = cfg.frame_size, d = cfg.growth, m = cfg.sub_frames, sub = cfg.sub_size();
  std::ostringstream os;
  auto row = [&os](const std::string& comp, const std::string& in, const std::string& kern,
                   const std::string& out) {
    os << comp << " | in=" << in << " | kernel=" << kern << " | out=" << out << "\n";
  };
  std::ostringstream dil;
  for (size_t i = 0; i < cfg.dilations.size(); ++i) {
    dil << (i ? "," : "") << cfg.dilations[i];
  }
  auto shp = [](int a, int b) {
    std::ostringstream s;
    s << "(" << a << ", " << b << ")";
    return s.str();
  };
  row("change_channel", shp(n, 1), "(" + std::to_string(cfg.kernel_large) + ", 1, " +
                                       std::to_string(d) + ")", shp(n, d));
  for (int l = 0; l < 5; ++l) {
    const bool mid = (l == 2);
    const int k = mid ? cfg.kernel_large : cfg.kernel_small;
    std::ostringstream kern;
    kern << "(" << k << ", " << (l + 1) * d << ", " << d << ")";
    if (mid) kern << " dilation={" << dil.str() << "}";
    std::ostringstream comp;
    comp << "dense_layer" << (l + 1) << " x" << cfg.num_blocks;
    row(comp.str(), shp(n, (l + 1) * d), kern.str(), shp(n, d));
  }
  row("change_channel", shp(n, d), "(" + std::to_string(cfg.kernel_large) + ", " +
                                       std::to_string(d) + ", 1)", shp(n, 1));
  row("reshape", shp(n, 1), "-", "(" + std::to_string(m) + ", " + std::to_string(sub) + ")");
  std::ostringstream gk;
  gk << "(" << sub << "+" << cfg.gru_hidden << ", " << cfg.gru_hidden << ")x3 (" << cfg.gru_hidden
     << "+" << sub << ", " << sub << ")x3";
  row("gru", "(" + std::to_string(m) + ", " + std::to_string(sub) + ")", gk.str(),
      shp(sub, 1));
  return os.str();
}

}  // namespace dccrn

#endif  // DCCRN_MODEL_HPP_
