// dccrn/tensor.hpp

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

// Differentiable numeric core: rank<=3 tensors, 1-D (dilated) convolution,
// linear maps, pointwise nonlinearities, channel concatenation and MSE, each
// with exact reverse-mode gradients over a Wengert-list tape.
//
// Scalars are templated: float is the production precision, double is the
// shadow precision used by the gradient-verification tests only.

#ifndef DCCRN_TENSOR_HPP_
#define DCCRN_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "dccrn/base.hpp"

namespace dccrn {

inline int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    DCCRN_CHECK(d > 0, "non-positive dim " << d);
    n *= d;
  }
  return n;
}

// Rank 1..3 array, row-major: (features), (features, channels) or
// (frames, bins). The grad buffer is empty until a backward pass touches it.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;
  std::vector<T> grad;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    DCCRN_CHECK(shape.size() >= 1 && shape.size() <= 3, "rank must be 1..3");
    data.assign(static_cast<size_t>(shape_numel(shape)), T(0));
  }
  Tensor(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    DCCRN_CHECK(shape.size() >= 1 && shape.size() <= 3, "rank must be 1..3");
    DCCRN_CHECK(static_cast<int64_t>(data.size()) == shape_numel(shape),
                "data length " << data.size() << " does not match shape");
  }

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

  // Shape set, contents left unwritten; for op outputs that overwrite fully.
  static Tensor uninit(std::vector<int> s) {
    Tensor t;
    t.shape = std::move(s);
    DCCRN_CHECK(t.shape.size() >= 1 && t.shape.size() <= 3, "rank must be 1..3");
    t.data.resize(static_cast<size_t>(shape_numel(t.shape)));
    return t;
  }

  int rank() const { return static_cast<int>(shape.size()); }
  int64_t numel() const { return static_cast<int64_t>(data.size()); }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
  }
  void zero_grad() {
    std::fill(grad.begin(), grad.end(), T(0));
  }

  void check_finite(const char* what) const {
    DCCRN_RUNTIME_CHECK(all_finite(data), "non-finite values in " << what);
  }
};

// 1-D convolution filter: weights (K, C_in, C_out), bias (C_out), dilation.
template <typename T>
struct ConvKernel {
  Tensor<T> weights;
  Tensor<T> bias;
  int dilation = 1;

  ConvKernel() = default;
  ConvKernel(int k, int c_in, int c_out, int dil = 1)
      : weights({k, c_in, c_out}), bias({c_out}), dilation(dil) {
    validate();
  }

  int k() const { return weights.shape[0]; }
  int c_in() const { return weights.shape[1]; }
  int c_out() const { return weights.shape[2]; }

  void validate() const {
    DCCRN_CHECK(weights.rank() == 3, "conv weights must be (K, C_in, C_out)");
    DCCRN_CHECK(k() % 2 == 1, "kernel size must be odd, got " << k());
    DCCRN_CHECK(dilation >= 1, "dilation must be >= 1, got " << dilation);
    DCCRN_CHECK(bias.rank() == 1 && bias.shape[0] == c_out(), "bias shape mismatch");
  }
};

enum class PointwiseKind { kSigmoid, kTanh, kAdd, kHadamard, kOneMinus };

namespace detail {

// The convolution kernels below run channel-major (C, N) so the innermost
// loops sweep the long feature axis contiguously; callers transpose at the
// boundary. Accumulation order is fixed, so results are reproducible
// bit-for-bit on one platform.

template <typename T>
void transpose(const T* src, int rows, int cols, T* dst) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      dst[static_cast<size_t>(c) * rows + r] = src[static_cast<size_t>(r) * cols + c];
    }
  }
}

// y_t(C_out, N) = b + w * x_t(C_in, N), taps spaced `dil` apart, zero padded.
template <typename T>
void conv_forward_cm(const T* __restrict__ xt, const T* __restrict__ w,
                     const T* __restrict__ b, T* __restrict__ yt, int n, int c_in, int k,
                     int c_out, int dil) {
  const int half = k / 2;
  for (int co = 0; co < c_out; ++co) {
    T* __restrict__ yrow = yt + static_cast<size_t>(co) * n;
    for (int t = 0; t < n; ++t) yrow[t] = b[co];
  }
  for (int kk = 0; kk < k; ++kk) {
    const int off = (kk - half) * dil;
    const int t_lo = off < 0 ? -off : 0;
    const int t_hi = off > 0 ? n - off : n;
    if (t_lo >= t_hi) continue;
    int ci = 0;
    for (; ci + 4 <= c_in; ci += 4) {
      const T* __restrict__ x0 = xt + static_cast<size_t>(ci + 0) * n + off;
      const T* __restrict__ x1 = xt + static_cast<size_t>(ci + 1) * n + off;
      const T* __restrict__ x2 = xt + static_cast<size_t>(ci + 2) * n + off;
      const T* __restrict__ x3 = xt + static_cast<size_t>(ci + 3) * n + off;
      const T* wbase = w + (static_cast<size_t>(kk) * c_in + ci) * c_out;
      int co = 0;
      for (; co + 2 <= c_out; co += 2) {
        T* __restrict__ ya = yt + static_cast<size_t>(co + 0) * n;
        T* __restrict__ yb = yt + static_cast<size_t>(co + 1) * n;
        const T wa0 = wbase[0 * c_out + co], wb0 = wbase[0 * c_out + co + 1];
        const T wa1 = wbase[1 * c_out + co], wb1 = wbase[1 * c_out + co + 1];
        const T wa2 = wbase[2 * c_out + co], wb2 = wbase[2 * c_out + co + 1];
        const T wa3 = wbase[3 * c_out + co], wb3 = wbase[3 * c_out + co + 1];
        for (int t = t_lo; t < t_hi; ++t) {
          const T v0 = x0[t], v1 = x1[t], v2 = x2[t], v3 = x3[t];
          ya[t] += wa0 * v0 + wa1 * v1 + wa2 * v2 + wa3 * v3;
          yb[t] += wb0 * v0 + wb1 * v1 + wb2 * v2 + wb3 * v3;
        }
      }
      for (; co < c_out; ++co) {
        T* __restrict__ ya = yt + static_cast<size_t>(co) * n;
        const T wa0 = wbase[0 * c_out + co];
        const T wa1 = wbase[1 * c_out + co];
        const T wa2 = wbase[2 * c_out + co];
        const T wa3 = wbase[3 * c_out + co];
        for (int t = t_lo; t < t_hi; ++t) {
          ya[t] += wa0 * x0[t] + wa1 * x1[t] + wa2 * x2[t] + wa3 * x3[t];
        }
      }
    }
    for (; ci < c_in; ++ci) {
      const T* __restrict__ xrow = xt + static_cast<size_t>(ci) * n + off;
      const T* __restrict__ wrow = w + (static_cast<size_t>(kk) * c_in + ci) * c_out;
      for (int co = 0; co < c_out; ++co) {
        const T wv = wrow[co];
        T* __restrict__ yrow = yt + static_cast<size_t>(co) * n;
        for (int t = t_lo; t < t_hi; ++t) yrow[t] += wv * xrow[t];
      }
    }
  }
}

// dx_t[ci][t+off] += sum_co w[kk,ci,co] * dy_t[co][t].
template <typename T>
void conv_backward_dx_cm(const T* __restrict__ dyt, const T* __restrict__ w,
                         T* __restrict__ dxt, int n, int c_in, int k, int c_out, int dil) {
  const int half = k / 2;
  for (int kk = 0; kk < k; ++kk) {
    const int off = (kk - half) * dil;
    const int t_lo = off < 0 ? -off : 0;
    const int t_hi = off > 0 ? n - off : n;
    if (t_lo >= t_hi) continue;
    int ci = 0;
    for (; ci + 2 <= c_in; ci += 2) {
      T* __restrict__ dxa = dxt + static_cast<size_t>(ci + 0) * n + off;
      T* __restrict__ dxb = dxt + static_cast<size_t>(ci + 1) * n + off;
      const T* wa = w + (static_cast<size_t>(kk) * c_in + ci + 0) * c_out;
      const T* wb = w + (static_cast<size_t>(kk) * c_in + ci + 1) * c_out;
      int co = 0;
      for (; co + 2 <= c_out; co += 2) {
        const T* __restrict__ dy0 = dyt + static_cast<size_t>(co + 0) * n;
        const T* __restrict__ dy1 = dyt + static_cast<size_t>(co + 1) * n;
        const T wa0 = wa[co], wa1 = wa[co + 1];
        const T wb0 = wb[co], wb1 = wb[co + 1];
        for (int t = t_lo; t < t_hi; ++t) {
          const T g0 = dy0[t], g1 = dy1[t];
          dxa[t] += wa0 * g0 + wa1 * g1;
          dxb[t] += wb0 * g0 + wb1 * g1;
        }
      }
      for (; co < c_out; ++co) {
        const T* __restrict__ dy0 = dyt + static_cast<size_t>(co) * n;
        const T wa0 = wa[co], wb0 = wb[co];
        for (int t = t_lo; t < t_hi; ++t) {
          dxa[t] += wa0 * dy0[t];
          dxb[t] += wb0 * dy0[t];
        }
      }
    }
    for (; ci < c_in; ++ci) {
      T* __restrict__ dxa = dxt + static_cast<size_t>(ci) * n + off;
      const T* wa = w + (static_cast<size_t>(kk) * c_in + ci) * c_out;
      for (int co = 0; co < c_out; ++co) {
        const T* __restrict__ dy0 = dyt + static_cast<size_t>(co) * n;
        const T wv = wa[co];
        for (int t = t_lo; t < t_hi; ++t) dxa[t] += wv * dy0[t];
      }
    }
  }
}

// dw[kk,ci,co] += sum_t x_t[ci][t+off] * dy_t[co][t]. The reduction keeps a
// fixed number of lanes so it vectorizes under strict FP semantics and stays
// deterministic.
template <typename T>
void conv_backward_dw(const T* __restrict__ xt, const T* __restrict__ dyt,
                      T* __restrict__ dw, int n, int c_in, int k, int c_out, int dil) {
  constexpr int kLanes = 16;
  const int half = k / 2;
  for (int kk = 0; kk < k; ++kk) {
    const int off = (kk - half) * dil;
    const int t_lo = off < 0 ? -off : 0;
    const int t_hi = off > 0 ? n - off : n;
    if (t_lo >= t_hi) continue;
    const int span = t_hi - t_lo;
    for (int ci = 0; ci < c_in; ++ci) {
      const T* __restrict__ xrow = xt + static_cast<size_t>(ci) * n + off + t_lo;
      for (int co = 0; co < c_out; ++co) {
        const T* __restrict__ dyrow = dyt + static_cast<size_t>(co) * n + t_lo;
        T lanes[kLanes] = {};
        int t = 0;
        for (; t + kLanes <= span; t += kLanes) {
          for (int j = 0; j < kLanes; ++j) lanes[j] += xrow[t + j] * dyrow[t + j];
        }
        T acc = T(0);
        for (; t < span; ++t) acc += xrow[t] * dyrow[t];
        for (int j = 0; j < kLanes; ++j) acc += lanes[j];
        dw[(static_cast<size_t>(kk) * c_in + ci) * c_out + co] += acc;
      }
    }
  }
}

}  // namespace detail

// Reverse-mode tape. Nodes are appended in topological order during the
// forward pass; backward() walks the list once in reverse.
template <typename T>
class Tape {
 public:
  using NodeId = int;

  // Inserts a leaf carrying an externally produced value. Parameters pass
  // needs_grad=true; inputs and constants pass false.
  NodeId leaf(Tensor<T> value, bool needs_grad) {
    return push(std::move(value), needs_grad, {}, nullptr);
  }

  const Tensor<T>& value(NodeId id) const { return node(id).value; }
  Tensor<T>& mutable_value(NodeId id) { return node(id).value; }

  // Gradient of the last backward()'s loss w.r.t. node id. All-zero if the
  // node was unreachable from the loss.
  const std::vector<T>& grad_data(NodeId id) {
    Node& n = node(id);
    n.value.ensure_grad();
    return n.value.grad;
  }

  size_t size() const { return nodes_.size(); }
  void clear() {
    nodes_.clear();
    backward_done_ = false;
  }

  // --- ops -----------------------------------------------------------------

  // Zero-padded dilated 1-D convolution; output feature count equals input
  // feature count. x: (N, C_in), w: (K, C_in, C_out), b: (C_out).
  NodeId conv1d(NodeId x_id, NodeId w_id, NodeId b_id, int dilation) {
    const Tensor<T>& x = value(x_id);
    const Tensor<T>& w = value(w_id);
    const Tensor<T>& b = value(b_id);
    DCCRN_CHECK(x.rank() == 2, "conv1d input must be (N, C_in)");
    DCCRN_CHECK(w.rank() == 3, "conv1d weights must be (K, C_in, C_out)");
    DCCRN_CHECK(dilation >= 1, "dilation must be >= 1");
    const int n = x.shape[0], c_in = x.shape[1];
    const int k = w.shape[0], c_out = w.shape[2];
    DCCRN_CHECK(k % 2 == 1, "kernel size must be odd");
    DCCRN_CHECK(w.shape[1] == c_in,
                "conv1d channel mismatch: input " << c_in << " vs kernel " << w.shape[1]);
    DCCRN_CHECK(b.rank() == 1 && b.shape[0] == c_out, "conv1d bias mismatch");
    x.check_finite("conv1d input");

    std::vector<T> xt(static_cast<size_t>(c_in) * n);
    detail::transpose(x.data.data(), n, c_in, xt.data());
    std::vector<T> yt(static_cast<size_t>(c_out) * n);
    detail::conv_forward_cm(xt.data(), w.data.data(), b.data.data(), yt.data(), n, c_in, k,
                            c_out, dilation);
    Tensor<T> y = Tensor<T>::uninit({n, c_out});
    detail::transpose(yt.data(), c_out, n, y.data.data());

    return push(std::move(y), any_needs_grad({x_id, w_id, b_id}), {x_id, w_id, b_id},
                [x_id, w_id, b_id, dilation, n, c_in, k, c_out](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  Node& wn = tp.node(w_id);
                  Node& bn = tp.node(b_id);
                  std::vector<T> dyt(static_cast<size_t>(c_out) * n);
                  detail::transpose(self.value.grad.data(), n, c_out, dyt.data());
                  if (bn.needs_grad) {
                    bn.value.ensure_grad();
                    T* db = bn.value.grad.data();
                    const T* dy = self.value.grad.data();
                    for (int t = 0; t < n; ++t) {
                      for (int co = 0; co < c_out; ++co) {
                        db[co] += dy[static_cast<size_t>(t) * c_out + co];
                      }
                    }
                  }
                  if (wn.needs_grad) {
                    wn.value.ensure_grad();
                    std::vector<T> xt(static_cast<size_t>(c_in) * n);
                    detail::transpose(xn.value.data.data(), n, c_in, xt.data());
                    detail::conv_backward_dw(xt.data(), dyt.data(), wn.value.grad.data(), n,
                                             c_in, k, c_out, dilation);
                  }
                  if (xn.needs_grad) {
                    xn.value.ensure_grad();
                    std::vector<T> dxt(static_cast<size_t>(c_in) * n, T(0));
                    detail::conv_backward_dx_cm(dyt.data(), wn.value.data.data(), dxt.data(),
                                                n, c_in, k, c_out, dilation);
                    T* dx = xn.value.grad.data();
                    for (int ci = 0; ci < c_in; ++ci) {
                      const T* src = dxt.data() + static_cast<size_t>(ci) * n;
                      for (int t = 0; t < n; ++t) {
                        dx[static_cast<size_t>(t) * c_in + ci] += src[t];
                      }
                    }
                  }
                });
  }

  NodeId conv1d(NodeId x_id, NodeId w_id, NodeId b_id) { return conv1d(x_id, w_id, b_id, 1); }

  // max(x, slope*x); subgradient at the kink is slope.
  NodeId leaky_relu(NodeId x_id, T slope) {
    DCCRN_CHECK(slope > T(0) && slope < T(1), "leaky_relu slope must be in (0, 1)");
    const Tensor<T>& x = value(x_id);
    x.check_finite("leaky_relu input");
    Tensor<T> y = Tensor<T>::uninit(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) {
      const T v = x.data[i];
      y.data[i] = v > T(0) ? v : slope * v;
    }
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id, slope](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  const T* xd = xn.value.data.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) {
                    dx[i] += dy[i] * (xd[i] > T(0) ? T(1) : slope);
                  }
                });
  }

  // Channel-wise concatenation in the given order; parts must share N.
  NodeId concat_channels(const std::vector<NodeId>& parts) {
    DCCRN_CHECK(!parts.empty(), "concat_channels needs at least one part");
    const int n = value(parts[0]).shape[0];
    int c_total = 0;
    for (NodeId p : parts) {
      const Tensor<T>& t = value(p);
      DCCRN_CHECK(t.rank() == 2, "concat_channels parts must be (N, C)");
      DCCRN_CHECK(t.shape[0] == n, "concat_channels feature count mismatch: "
                                       << t.shape[0] << " vs " << n);
      c_total += t.shape[1];
    }
    Tensor<T> y = Tensor<T>::uninit({n, c_total});
    {
      int off = 0;
      for (NodeId p : parts) {
        const Tensor<T>& t = value(p);
        const int c = t.shape[1];
        for (int row = 0; row < n; ++row) {
          std::copy_n(t.data.data() + static_cast<size_t>(row) * c, c,
                      y.data.data() + static_cast<size_t>(row) * c_total + off);
        }
        off += c;
      }
    }
    std::vector<NodeId> ps = parts;
    return push(std::move(y), any_needs_grad(parts), parts,
                [ps, n, c_total](Tape& tp, Node& self) {
                  const T* dy = self.value.grad.data();
                  int off = 0;
                  for (NodeId p : ps) {
                    Node& pn = tp.node(p);
                    const int c = pn.value.shape[1];
                    if (pn.needs_grad) {
                      pn.value.ensure_grad();
                      T* dp = pn.value.grad.data();
                      for (int row = 0; row < n; ++row) {
                        const T* src = dy + static_cast<size_t>(row) * c_total + off;
                        T* dst = dp + static_cast<size_t>(row) * c;
                        for (int i = 0; i < c; ++i) dst[i] += src[i];
                      }
                    }
                    off += c;
                  }
                });
  }

  // x: (F_in), w: (F_in, F_out), b: (F_out) -> x.w + b.
  NodeId linear(NodeId x_id, NodeId w_id, NodeId b_id) {
    const Tensor<T>& b = value(b_id);
    NodeId y = matvec(x_id, w_id);
    DCCRN_CHECK(b.rank() == 1 && b.shape[0] == value(y).shape[0], "linear bias mismatch");
    return add(y, b_id);
  }

  // Linear map without bias; the GRU recurrence shares one bias per gate.
  NodeId matvec(NodeId x_id, NodeId w_id) {
    const Tensor<T>& x = value(x_id);
    const Tensor<T>& w = value(w_id);
    DCCRN_CHECK(x.rank() == 1, "matvec input must be rank 1");
    DCCRN_CHECK(w.rank() == 2, "matvec weights must be (F_in, F_out)");
    const int f_in = x.shape[0], f_out = w.shape[1];
    DCCRN_CHECK(w.shape[0] == f_in,
                "matvec shape mismatch: input " << f_in << " vs weights " << w.shape[0]);
    x.check_finite("matvec input");
    Tensor<T> y = Tensor<T>::zeros({f_out});
    const T* xd = x.data.data();
    const T* wd = w.data.data();
    T* yd = y.data.data();
    for (int fi = 0; fi < f_in; ++fi) {
      const T xv = xd[fi];
      const T* wrow = wd + static_cast<size_t>(fi) * f_out;
      for (int fo = 0; fo < f_out; ++fo) yd[fo] += xv * wrow[fo];
    }
    return push(std::move(y), any_needs_grad({x_id, w_id}), {x_id, w_id},
                [x_id, w_id, f_in, f_out](Tape& tp, Node& self) {
                  const T* dy = self.value.grad.data();
                  Node& xn = tp.node(x_id);
                  Node& wn = tp.node(w_id);
                  if (wn.needs_grad) {
                    wn.value.ensure_grad();
                    T* dw = wn.value.grad.data();
                    const T* xd = xn.value.data.data();
                    for (int fi = 0; fi < f_in; ++fi) {
                      const T xv = xd[fi];
                      T* dwrow = dw + static_cast<size_t>(fi) * f_out;
                      for (int fo = 0; fo < f_out; ++fo) dwrow[fo] += xv * dy[fo];
                    }
                  }
                  if (xn.needs_grad) {
                    xn.value.ensure_grad();
                    T* dx = xn.value.grad.data();
                    const T* wd = wn.value.data.data();
                    for (int fi = 0; fi < f_in; ++fi) {
                      const T* wrow = wd + static_cast<size_t>(fi) * f_out;
                      T acc = T(0);
                      for (int fo = 0; fo < f_out; ++fo) acc += wrow[fo] * dy[fo];
                      dx[fi] += acc;
                    }
                  }
                });
  }

  NodeId sigmoid(NodeId x_id) {
    const Tensor<T>& x = value(x_id);
    Tensor<T> y = Tensor<T>::uninit(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = T(1) / (T(1) + std::exp(-x.data[i]));
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  const T* s = self.value.data.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) {
                    dx[i] += dy[i] * s[i] * (T(1) - s[i]);
                  }
                });
  }

  NodeId tanh_op(NodeId x_id) {
    const Tensor<T>& x = value(x_id);
    Tensor<T> y = Tensor<T>::uninit(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::tanh(x.data[i]);
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  const T* t = self.value.data.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) {
                    dx[i] += dy[i] * (T(1) - t[i] * t[i]);
                  }
                });
  }

  NodeId one_minus(NodeId x_id) {
    const Tensor<T>& x = value(x_id);
    Tensor<T> y = Tensor<T>::uninit(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = T(1) - x.data[i];
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) dx[i] -= dy[i];
                });
  }

  NodeId add(NodeId a_id, NodeId b_id) {
    const Tensor<T>& a = value(a_id);
    const Tensor<T>& b = value(b_id);
    DCCRN_CHECK(a.numel() == b.numel(), "add operand size mismatch");
    Tensor<T> y = Tensor<T>::uninit(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) y.data[i] = a.data[i] + b.data[i];
    return push(std::move(y), any_needs_grad({a_id, b_id}), {a_id, b_id},
                [a_id, b_id](Tape& tp, Node& self) {
                  const T* dy = self.value.grad.data();
                  for (NodeId id : {a_id, b_id}) {
                    Node& n = tp.node(id);
                    if (!n.needs_grad) continue;
                    n.value.ensure_grad();
                    T* d = n.value.grad.data();
                    for (size_t i = 0; i < self.value.data.size(); ++i) d[i] += dy[i];
                  }
                });
  }

  NodeId hadamard(NodeId a_id, NodeId b_id) {
    const Tensor<T>& a = value(a_id);
    const Tensor<T>& b = value(b_id);
    DCCRN_CHECK(a.numel() == b.numel(), "hadamard operand size mismatch");
    Tensor<T> y = Tensor<T>::uninit(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) y.data[i] = a.data[i] * b.data[i];
    return push(std::move(y), any_needs_grad({a_id, b_id}), {a_id, b_id},
                [a_id, b_id](Tape& tp, Node& self) {
                  const T* dy = self.value.grad.data();
                  Node& an = tp.node(a_id);
                  Node& bn = tp.node(b_id);
                  if (an.needs_grad) {
                    an.value.ensure_grad();
                    T* da = an.value.grad.data();
                    const T* bdv = bn.value.data.data();
                    for (size_t i = 0; i < self.value.data.size(); ++i) da[i] += dy[i] * bdv[i];
                  }
                  if (bn.needs_grad) {
                    bn.value.ensure_grad();
                    T* db = bn.value.grad.data();
                    const T* adv = an.value.data.data();
                    for (size_t i = 0; i < self.value.data.size(); ++i) db[i] += dy[i] * adv[i];
                  }
                });
  }

  NodeId pointwise(PointwiseKind kind, NodeId a, NodeId b = -1) {
    switch (kind) {
      case PointwiseKind::kSigmoid: return sigmoid(a);
      case PointwiseKind::kTanh: return tanh_op(a);
      case PointwiseKind::kOneMinus: return one_minus(a);
      case PointwiseKind::kAdd:
        DCCRN_CHECK(b >= 0, "add needs two operands");
        return add(a, b);
      case PointwiseKind::kHadamard:
        DCCRN_CHECK(b >= 0, "hadamard needs two operands");
        return hadamard(a, b);
    }
    DCCRN_CHECK(false, "unknown pointwise kind");
    return -1;
  }

  // Mean of squared differences; gradient 2(a-b)/count w.r.t. a.
  NodeId mse(NodeId a_id, NodeId b_id) {
    const Tensor<T>& a = value(a_id);
    const Tensor<T>& b = value(b_id);
    DCCRN_CHECK(a.numel() == b.numel(),
                "mse size mismatch: " << a.numel() << " vs " << b.numel());
    a.check_finite("mse lhs");
    b.check_finite("mse rhs");
    T acc = T(0);
    for (size_t i = 0; i < a.data.size(); ++i) {
      const T d = a.data[i] - b.data[i];
      acc += d * d;
    }
    Tensor<T> y({1}, {acc / static_cast<T>(a.numel())});
    return push(std::move(y), any_needs_grad({a_id, b_id}), {a_id, b_id},
                [a_id, b_id](Tape& tp, Node& self) {
                  const T dy = self.value.grad[0];
                  Node& an = tp.node(a_id);
                  Node& bn = tp.node(b_id);
                  const T scale = T(2) / static_cast<T>(an.value.numel());
                  const T* ad = an.value.data.data();
                  const T* bd = bn.value.data.data();
                  if (an.needs_grad) {
                    an.value.ensure_grad();
                    T* da = an.value.grad.data();
                    for (size_t i = 0; i < an.value.data.size(); ++i) {
                      da[i] += dy * scale * (ad[i] - bd[i]);
                    }
                  }
                  if (bn.needs_grad) {
                    bn.value.ensure_grad();
                    T* db = bn.value.grad.data();
                    for (size_t i = 0; i < an.value.data.size(); ++i) {
                      db[i] -= dy * scale * (ad[i] - bd[i]);
                    }
                  }
                });
  }

  // Rows [start, start+len) of a rank-2 tensor, or a span of a rank-1 tensor.
  NodeId slice_features(NodeId x_id, int start, int len) {
    const Tensor<T>& x = value(x_id);
    DCCRN_CHECK(start >= 0 && len >= 1 && start + len <= x.shape[0],
                "slice [" << start << ", " << start + len << ") out of range");
    const int c = x.rank() >= 2 ? x.shape[1] : 1;
    std::vector<int> out_shape = x.shape;
    out_shape[0] = len;
    Tensor<T> y = Tensor<T>::uninit(out_shape);
    std::copy_n(x.data.data() + static_cast<size_t>(start) * c,
                static_cast<size_t>(len) * c, y.data.data());
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id, start, c](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  T* dx = xn.value.grad.data() + static_cast<size_t>(start) * c;
                  for (size_t i = 0; i < self.value.data.size(); ++i) dx[i] += dy[i];
                });
  }

  // Same data, new shape; numel must match.
  NodeId reshape(NodeId x_id, std::vector<int> new_shape) {
    const Tensor<T>& x = value(x_id);
    DCCRN_CHECK(shape_numel(new_shape) == x.numel(), "reshape numel mismatch");
    Tensor<T> y(new_shape, x.data);
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) dx[i] += dy[i];
                });
  }

  NodeId scale(NodeId x_id, T c) {
    const Tensor<T>& x = value(x_id);
    Tensor<T> y = Tensor<T>::uninit(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = c * x.data[i];
    return push(std::move(y), any_needs_grad({x_id}), {x_id},
                [x_id, c](Tape& tp, Node& self) {
                  Node& xn = tp.node(x_id);
                  if (!xn.needs_grad) return;
                  xn.value.ensure_grad();
                  const T* dy = self.value.grad.data();
                  T* dx = xn.value.grad.data();
                  for (size_t i = 0; i < self.value.data.size(); ++i) dx[i] += c * dy[i];
                });
  }

  // Extension point for composite ops assembled outside this header. The
  // backward callback reads grad_data(self), then folds parent gradients in
  // through accum_grad(); it runs only when self lies on the loss path.
  NodeId custom(Tensor<T> value, std::vector<NodeId> parents,
                std::function<void(Tape&, NodeId)> back) {
    const NodeId id = push(std::move(value), any_needs_grad(parents), parents, nullptr);
    if (node(id).needs_grad) {
      node(id).back = [back = std::move(back), id](Tape& tp, Node&) { back(tp, id); };
    }
    return id;
  }

  bool needs_grad(NodeId id) const { return node(id).needs_grad; }

  void accum_grad(NodeId id, const std::vector<T>& g) {
    Node& n = node(id);
    DCCRN_CHECK(g.size() == n.value.data.size(), "accum_grad size mismatch");
    n.value.ensure_grad();
    T* dst = n.value.grad.data();
    for (size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }

  // Reverse accumulation from a scalar loss. Each node is visited exactly
  // once, in reverse construction (= reverse topological) order.
  void backward(NodeId loss_id) {
    DCCRN_RUNTIME_CHECK(!backward_done_, "backward called twice without re-running forward");
    Node& loss = node(loss_id);
    DCCRN_RUNTIME_CHECK(loss.value.numel() == 1, "backward needs a scalar loss");
    backward_done_ = true;
    loss.value.ensure_grad();
    loss.value.grad[0] = T(1);
    for (NodeId id = loss_id; id >= 0; --id) {
      Node& n = nodes_[static_cast<size_t>(id)];
      if (!n.back) continue;
      if (n.value.grad.size() != n.value.data.size()) continue;  // off the loss path
      n.back(*this, n);
    }
  }

  bool backward_done() const { return backward_done_; }

 private:
  struct Node {
    Tensor<T> value;
    bool needs_grad = false;
    std::vector<NodeId> parents;
    std::function<void(Tape&, Node&)> back;
  };

  Node& node(NodeId id) {
    DCCRN_CHECK(id >= 0 && static_cast<size_t>(id) < nodes_.size(), "bad node id " << id);
    return nodes_[static_cast<size_t>(id)];
  }
  const Node& node(NodeId id) const {
    DCCRN_CHECK(id >= 0 && static_cast<size_t>(id) < nodes_.size(), "bad node id " << id);
    return nodes_[static_cast<size_t>(id)];
  }

  bool any_needs_grad(const std::vector<NodeId>& ids) const {
    for (NodeId id : ids) {
      if (node(id).needs_grad) return true;
    }
    return false;
  }

  NodeId push(Tensor<T> value, bool needs_grad, std::vector<NodeId> parents,
              std::function<void(Tape&, Node&)> back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.parents = std::move(parents);
    if (needs_grad) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  // deque keeps value()/grad_data() references stable while the graph grows.
  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace dccrn

#endif  // DCCRN_TENSOR_HPP_
