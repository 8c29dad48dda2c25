// Copyright 2026 The socdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "socdiff/rng.hpp"
#include "socdiff/types.hpp"

namespace socdiff {

/// 1-D temporal convolution residual stack for epsilon prediction,
/// templated on the compute scalar: float for production inference and
/// training, double for finite-difference gradient tests.
///
/// Layout: input projection (D -> H, kernel k), `depth` residual blocks
/// (conv H -> H with a per-block sinusoidal-time bias, SiLU, conv H -> H,
/// skip add), and a kernel-1 head (H -> D) that starts at zero so the
/// untrained network predicts zero noise.
///
/// Activations are C x (B*L) matrices: one column per (sample, position),
/// samples stored contiguously, so every convolution is a single GEMM over
/// im2col patches. The network itself is length-agnostic.
template <typename T>
struct TemporalNet {
  using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  struct Conv {
    MatT w;  // out_ch x (in_ch * k)
    MatT b;  // out_ch x 1
  };
  struct Block {
    Conv c1, c2;
    MatT time_w;  // H x E
    MatT time_b;  // H x 1
  };

  int D = 0, H = 0, E = 0, depth = 0, kernel = 0;
  Conv in_proj;
  std::vector<Block> blocks;
  Conv head;

  void init(int d, int h, int e, int depth_, int kernel_, Rng& rng) {
    if (d < 1 || h < 1 || e < 2 || depth_ < 1 || kernel_ < 1 ||
        kernel_ % 2 == 0)
      throw std::invalid_argument("TemporalNet: bad architecture sizes");
    D = d;
    H = h;
    E = e;
    depth = depth_;
    kernel = kernel_;
    auto fill = [&rng](MatT& m, Index rows, Index cols, Scalar stddev) {
      m.resize(rows, cols);
      for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
          m(i, j) = static_cast<T>(stddev * rng.normal());
    };
    fill(in_proj.w, H, static_cast<Index>(D) * kernel,
         std::sqrt(2.0 / (D * kernel)));
    in_proj.b = MatT::Zero(H, 1);
    blocks.resize(static_cast<std::size_t>(depth));
    for (Block& blk : blocks) {
      fill(blk.c1.w, H, static_cast<Index>(H) * kernel,
           std::sqrt(2.0 / (H * kernel)));
      blk.c1.b = MatT::Zero(H, 1);
      fill(blk.c2.w, H, static_cast<Index>(H) * kernel,
           std::sqrt(2.0 / (H * kernel)));
      blk.c2.b = MatT::Zero(H, 1);
      fill(blk.time_w, H, E, 1.0 / std::sqrt(static_cast<Scalar>(E)));
      blk.time_b = MatT::Zero(H, 1);
    }
    head.w = MatT::Zero(D, H);  // zero head: untrained net predicts 0
    head.b = MatT::Zero(D, 1);
  }

  /// Visits every parameter matrix in a fixed order with a stable name.
  template <typename Fn>
  void visit_params(Fn&& fn) {
    fn("in_proj.w", in_proj.w);
    fn("in_proj.b", in_proj.b);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string p = "block" + std::to_string(i) + ".";
      fn(p + "c1.w", blocks[i].c1.w);
      fn(p + "c1.b", blocks[i].c1.b);
      fn(p + "c2.w", blocks[i].c2.w);
      fn(p + "c2.b", blocks[i].c2.b);
      fn(p + "time.w", blocks[i].time_w);
      fn(p + "time.b", blocks[i].time_b);
    }
    fn("head.w", head.w);
    fn("head.b", head.b);
  }

  template <typename Fn>
  void visit_params(Fn&& fn) const {
    const_cast<TemporalNet*>(this)->visit_params(
        [&fn](const std::string& name, const MatT& m) { fn(name, m); });
  }

  Index param_count() const {
    Index n = 0;
    visit_params([&n](const std::string&, const MatT& m) { n += m.size(); });
    return n;
  }

  /// Transformer-style sinusoidal embedding of an integer timestep.
  MatT time_embedding(int t) const {
    MatT e(E, 1);
    const int half = E / 2;
    for (int i = 0; i < half; ++i) {
      const Scalar freq =
          std::exp(-std::log(10000.0) * static_cast<Scalar>(i) /
                   static_cast<Scalar>(half));
      e(2 * i, 0) = static_cast<T>(std::sin(t * freq));
      e(2 * i + 1, 0) = static_cast<T>(std::cos(t * freq));
    }
    if (E % 2 == 1) e(E - 1, 0) = T(1);
    return e;
  }

  // im2col with per-sample zero padding: column (b*L + l) of the result
  // stacks the k input columns centered on position l of sample b.
  static MatT im2col(const MatT& x, int B, int L, int k) {
    const Index C = x.rows();
    const int pad = k / 2;
    MatT p = MatT::Zero(C * k, x.cols());
    for (int o = 0; o < k; ++o) {
      const int shift = o - pad;
      const int lo = std::max(0, -shift);
      const int hi = std::min(L - 1, L - 1 - shift);
      if (lo > hi) continue;
      const int n = hi - lo + 1;
      for (int b = 0; b < B; ++b) {
        p.block(static_cast<Index>(o) * C, b * L + lo, C, n) =
            x.block(0, b * L + lo + shift, C, n);
      }
    }
    return p;
  }

  // Adjoint of im2col: scatter-adds patch gradients back onto columns.
  static MatT col2im(const MatT& dp, Index C, int B, int L, int k) {
    const int pad = k / 2;
    MatT dx = MatT::Zero(C, dp.cols());
    for (int o = 0; o < k; ++o) {
      const int shift = o - pad;
      const int lo = std::max(0, -shift);
      const int hi = std::min(L - 1, L - 1 - shift);
      if (lo > hi) continue;
      const int n = hi - lo + 1;
      for (int b = 0; b < B; ++b) {
        dx.block(0, b * L + lo + shift, C, n) +=
            dp.block(static_cast<Index>(o) * C, b * L + lo, C, n);
      }
    }
    return dx;
  }

  static MatT conv_apply(const Conv& c, const MatT& patches) {
    return (c.w * patches).colwise() + c.b.col(0);
  }

  static MatT silu(const MatT& u) {
    return u.unaryExpr([](T v) { return v / (T(1) + std::exp(-v)); });
  }

  static MatT silu_deriv(const MatT& u) {
    return u.unaryExpr([](T v) {
      const T s = T(1) / (T(1) + std::exp(-v));
      return s * (T(1) + v * (T(1) - s));
    });
  }

  /// Per-layer activations cached by forward() for the backward pass.
  struct Trace {
    int B = 0, L = 0;
    MatT x0;      // D x BL input
    MatT h0;      // H x BL after in_proj
    struct BlockTrace {
      MatT u;  // pre-activation of c1 (+ time bias)
      MatT a;  // silu(u)
    };
    std::vector<BlockTrace> blk;
    std::vector<MatT> block_in;  // input of each block
    MatT y;                      // input of the head
    MatT out;                    // D x BL prediction
    std::vector<MatT> emb;       // per-sample time embeddings, E x 1
  };

  /// Forward pass over a batch: x0 is D x (B*L); ts holds one timestep per
  /// sample. Fills `tr` and returns the prediction (alias of tr.out).
  const MatT& forward(const MatT& x0, const std::vector<int>& ts, int B,
                      int L, Trace& tr) const {
    if (x0.rows() != D || x0.cols() != static_cast<Index>(B) * L)
      throw std::invalid_argument("TemporalNet: input shape mismatch");
    if (static_cast<int>(ts.size()) != B)
      throw std::invalid_argument("TemporalNet: one timestep per sample");
    tr.B = B;
    tr.L = L;
    tr.x0 = x0;
    tr.h0 = conv_apply(in_proj, im2col(x0, B, L, kernel));
    tr.blk.resize(blocks.size());
    tr.block_in.resize(blocks.size());
    tr.emb.resize(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b)
      tr.emb[static_cast<std::size_t>(b)] = time_embedding(ts[b]);

    MatT x = tr.h0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const Block& blk = blocks[i];
      tr.block_in[i] = x;
      MatT u = conv_apply(blk.c1, im2col(x, B, L, kernel));
      for (int b = 0; b < B; ++b) {
        const MatT bias =
            blk.time_w * tr.emb[static_cast<std::size_t>(b)] + blk.time_b;
        u.middleCols(b * L, L).colwise() += bias.col(0);
      }
      tr.blk[i].u = u;
      tr.blk[i].a = silu(u);
      x += conv_apply(blk.c2, im2col(tr.blk[i].a, B, L, kernel));
    }
    tr.y = x;
    tr.out = (head.w * x).colwise() + head.b.col(0);
    return tr.out;
  }

  /// Gradient container mirroring the parameter layout.
  struct Grads {
    Conv in_proj;
    std::vector<Block> blocks;
    Conv head;

    void init_like(TemporalNet& net) {
      auto zero = [](const MatT& m) { return MatT::Zero(m.rows(), m.cols()); };
      in_proj.w = zero(net.in_proj.w);
      in_proj.b = zero(net.in_proj.b);
      blocks.resize(net.blocks.size());
      for (std::size_t i = 0; i < net.blocks.size(); ++i) {
        blocks[i].c1.w = zero(net.blocks[i].c1.w);
        blocks[i].c1.b = zero(net.blocks[i].c1.b);
        blocks[i].c2.w = zero(net.blocks[i].c2.w);
        blocks[i].c2.b = zero(net.blocks[i].c2.b);
        blocks[i].time_w = zero(net.blocks[i].time_w);
        blocks[i].time_b = zero(net.blocks[i].time_b);
      }
      head.w = zero(net.head.w);
      head.b = zero(net.head.b);
    }

    template <typename Fn>
    void visit(Fn&& fn) {
      fn("in_proj.w", in_proj.w);
      fn("in_proj.b", in_proj.b);
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string p = "block" + std::to_string(i) + ".";
        fn(p + "c1.w", blocks[i].c1.w);
        fn(p + "c1.b", blocks[i].c1.b);
        fn(p + "c2.w", blocks[i].c2.w);
        fn(p + "c2.b", blocks[i].c2.b);
        fn(p + "time.w", blocks[i].time_w);
        fn(p + "time.b", blocks[i].time_b);
      }
      fn("head.w", head.w);
      fn("head.b", head.b);
    }
  };

  /// Backward pass for d(loss)/d(out) = dout; accumulates into g.
  void backward(const Trace& tr, const MatT& dout, Grads& g) const {
    const int B = tr.B, L = tr.L;
    g.head.w += dout * tr.y.transpose();
    g.head.b.col(0) += dout.rowwise().sum();
    MatT dy = head.w.transpose() * dout;

    for (std::size_t ii = blocks.size(); ii-- > 0;) {
      const Block& blk = blocks[ii];
      // y = x + conv2(a): the residual passes dy through unchanged.
      const MatT a_patch = im2col(tr.blk[ii].a, B, L, kernel);
      g.blocks[ii].c2.w += dy * a_patch.transpose();
      g.blocks[ii].c2.b.col(0) += dy.rowwise().sum();
      MatT da = col2im(blk.c2.w.transpose() * dy, H, B, L, kernel);
      MatT du = (da.array() * silu_deriv(tr.blk[ii].u).array()).matrix();
      for (int b = 0; b < B; ++b) {
        const MatT s = du.middleCols(b * L, L).rowwise().sum();
        g.blocks[ii].time_w +=
            s * tr.emb[static_cast<std::size_t>(b)].transpose();
        g.blocks[ii].time_b += s;
      }
      const MatT x_patch = im2col(tr.block_in[ii], B, L, kernel);
      g.blocks[ii].c1.w += du * x_patch.transpose();
      g.blocks[ii].c1.b.col(0) += du.rowwise().sum();
      dy += col2im(blk.c1.w.transpose() * du, H, B, L, kernel);
    }

    const MatT x0_patch = im2col(tr.x0, B, L, kernel);
    g.in_proj.w += dy * x0_patch.transpose();
    g.in_proj.b.col(0) += dy.rowwise().sum();
  }
};

/// Adam optimizer over a TemporalNet's parameters, deterministic given the
/// visiting order.
template <typename T>
class AdamOptimizer {
 public:
  using Net = TemporalNet<T>;
  using MatT = typename Net::MatT;

  AdamOptimizer(Net& net, Scalar lr, Scalar beta1 = 0.9, Scalar beta2 = 0.999,
                Scalar eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    net.visit_params([this](const std::string&, MatT& p) {
      m_.push_back(MatT::Zero(p.rows(), p.cols()));
      v_.push_back(MatT::Zero(p.rows(), p.cols()));
    });
  }

  void step(Net& net, typename Net::Grads& grads) {
    ++t_;
    const Scalar bc1 = 1.0 - std::pow(beta1_, static_cast<Scalar>(t_));
    const Scalar bc2 = 1.0 - std::pow(beta2_, static_cast<Scalar>(t_));
    std::size_t i = 0;
    std::vector<MatT*> gs;
    grads.visit([&gs](const std::string&, MatT& g) { gs.push_back(&g); });
    net.visit_params([&](const std::string&, MatT& p) {
      MatT& g = *gs[i];
      m_[i] = static_cast<T>(beta1_) * m_[i] +
              static_cast<T>(1.0 - beta1_) * g;
      v_[i] = (static_cast<T>(beta2_) * v_[i].array() +
               static_cast<T>(1.0 - beta2_) * g.array().square())
                  .matrix();
      const auto mhat = m_[i].array() / static_cast<T>(bc1);
      const auto vhat = v_[i].array() / static_cast<T>(bc2);
      p.array() -=
          static_cast<T>(lr_) * mhat / (vhat.sqrt() + static_cast<T>(eps_));
      ++i;
    });
  }

 private:
  Scalar lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<MatT> m_, v_;
};

}  // namespace socdiff
