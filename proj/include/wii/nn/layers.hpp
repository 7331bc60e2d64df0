#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "wii/nn/tensor.hpp"
#include "wii/rng.hpp"

namespace wii::nn {

enum class Mode { kTrain, kEval };

// Batched layer interface. Tensors carry a leading batch dimension;
// output_shape works on the per-sample shape. forward caches whatever the
// matching backward needs.
template <class S>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual const char* kind() const = 0;
  virtual std::vector<int> output_shape(const std::vector<int>& input) const = 0;
  virtual Tensor<S> forward(const Tensor<S>& x, Mode mode, std::uint64_t seed) = 0;
  virtual Tensor<S> backward(const Tensor<S>& grad_out) = 0;
  virtual std::vector<Tensor<S>*> params() { return {}; }
  virtual std::vector<Tensor<S>*> grads() { return {}; }
};

// ---------------------------------------------------------------------------
// 2-D valid convolution (cross-correlation) via im2col + GEMM.
// Input [B, C, H, W], kernels [F, C, kh, kw], output [B, F, H-kh+1, W-kw+1].
template <class S>
class Conv2d : public Layer<S> {
 public:
  Conv2d(int in_channels, int out_channels, int kh, int kw)
      : c_(in_channels), f_(out_channels), kh_(kh), kw_(kw),
        kernels_({out_channels, in_channels, kh, kw}),
        bias_({out_channels}),
        gkernels_({out_channels, in_channels, kh, kw}),
        gbias_({out_channels}) {
    if (in_channels <= 0 || out_channels <= 0 || kh <= 0 || kw <= 0)
      throw std::invalid_argument("conv dimensions must be positive");
  }

  const char* kind() const override { return "conv"; }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    if (in.size() != 3)
      throw std::invalid_argument("conv expects [C,H,W] input, got " + shape_str(in));
    if (in[0] != c_)
      throw std::invalid_argument("conv channel mismatch: expected " +
                                  std::to_string(c_) + ", got " + std::to_string(in[0]));
    if (in[1] < kh_ || in[2] < kw_)
      throw std::invalid_argument("conv kernel larger than input " + shape_str(in));
    return {f_, in[1] - kh_ + 1, in[2] - kw_ + 1};
  }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    if (x.rank() != 4)
      throw std::invalid_argument("conv forward expects [B,C,H,W]");
    const std::vector<int> out_sample =
        output_shape({x.dim(1), x.dim(2), x.dim(3)});
    b_ = x.dim(0);
    h_ = x.dim(2);
    w_ = x.dim(3);
    oh_ = out_sample[1];
    ow_ = out_sample[2];
    const Eigen::Index ckk = static_cast<Eigen::Index>(c_) * kh_ * kw_;
    const Eigen::Index opos = static_cast<Eigen::Index>(oh_) * ow_;

    cols_.resize(ckk, static_cast<Eigen::Index>(b_) * opos);
    im2col(x);

    Tensor<S> y({b_, f_, oh_, ow_});
    ConstRowMap<S> k(kernels_.data.data(), f_, ckk);
    for (int b = 0; b < b_; ++b) {
      RowMap<S> yb(y.data.data() + static_cast<Eigen::Index>(b) * f_ * opos, f_, opos);
      yb.noalias() = k * cols_.middleCols(static_cast<Eigen::Index>(b) * opos, opos);
      yb.colwise() += bias_.data;
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    require_shape(gy, {b_, f_, oh_, ow_}, "conv backward");
    const Eigen::Index ckk = static_cast<Eigen::Index>(c_) * kh_ * kw_;
    const Eigen::Index opos = static_cast<Eigen::Index>(oh_) * ow_;
    ConstRowMap<S> k(kernels_.data.data(), f_, ckk);
    RowMap<S> gk(gkernels_.data.data(), f_, ckk);
    gk.setZero();
    gbias_.data.setZero();

    Tensor<S> gx({b_, c_, h_, w_});
    MatX<S> gcols(ckk, opos);
    for (int b = 0; b < b_; ++b) {
      ConstRowMap<S> gyb(gy.data.data() + static_cast<Eigen::Index>(b) * f_ * opos, f_, opos);
      const auto colsb = cols_.middleCols(static_cast<Eigen::Index>(b) * opos, opos);
      gk.noalias() += gyb * colsb.transpose();
      gbias_.data.noalias() += gyb.rowwise().sum();
      gcols.noalias() = k.transpose() * gyb;
      col2im(gcols, gx, b);
    }
    return gx;
  }

  std::vector<Tensor<S>*> params() override { return {&kernels_, &bias_}; }
  std::vector<Tensor<S>*> grads() override { return {&gkernels_, &gbias_}; }

  Tensor<S>& kernels() { return kernels_; }
  Tensor<S>& bias() { return bias_; }

 private:
  void im2col(const Tensor<S>& x) {
    const Eigen::Index opos = static_cast<Eigen::Index>(oh_) * ow_;
    const S* xd = x.data.data();
    for (int b = 0; b < b_; ++b) {
      const S* xb = xd + (static_cast<Eigen::Index>(b) * c_) * h_ * w_;
      for (int c = 0; c < c_; ++c) {
        const S* xc = xb + static_cast<Eigen::Index>(c) * h_ * w_;
        for (int ki = 0; ki < kh_; ++ki) {
          for (int kj = 0; kj < kw_; ++kj) {
            const Eigen::Index row = (static_cast<Eigen::Index>(c) * kh_ + ki) * kw_ + kj;
            for (int oh = 0; oh < oh_; ++oh) {
              const S* src = xc + static_cast<Eigen::Index>(oh + ki) * w_ + kj;
              S* dst = cols_.data() +
                       (static_cast<Eigen::Index>(b) * opos +
                        static_cast<Eigen::Index>(oh) * ow_) * cols_.rows() + row;
              for (int ow = 0; ow < ow_; ++ow) dst[static_cast<Eigen::Index>(ow) * cols_.rows()] = src[ow];
            }
          }
        }
      }
    }
  }

  void col2im(const MatX<S>& gcols, Tensor<S>& gx, int b) const {
    S* gb = gx.data.data() + (static_cast<Eigen::Index>(b) * c_) * h_ * w_;
    for (int c = 0; c < c_; ++c) {
      S* gc = gb + static_cast<Eigen::Index>(c) * h_ * w_;
      for (int ki = 0; ki < kh_; ++ki) {
        for (int kj = 0; kj < kw_; ++kj) {
          const Eigen::Index row = (static_cast<Eigen::Index>(c) * kh_ + ki) * kw_ + kj;
          for (int oh = 0; oh < oh_; ++oh) {
            S* dst = gc + static_cast<Eigen::Index>(oh + ki) * w_ + kj;
            const S* src = gcols.data() +
                           static_cast<Eigen::Index>(oh) * ow_ * gcols.rows() + row;
            for (int ow = 0; ow < ow_; ++ow)
              dst[ow] += src[static_cast<Eigen::Index>(ow) * gcols.rows()];
          }
        }
      }
    }
  }

  int c_, f_, kh_, kw_;
  int b_ = 0, h_ = 0, w_ = 0, oh_ = 0, ow_ = 0;
  Tensor<S> kernels_, bias_, gkernels_, gbias_;
  MatX<S> cols_;  // cached activations for the backward pass
};

// ---------------------------------------------------------------------------
// Affine map y = x W^T + b. Input [B, in], output [B, out].
template <class S>
class Dense : public Layer<S> {
 public:
  Dense(int in, int out)
      : in_(in), out_(out), w_({out, in}), b_({out}), gw_({out, in}), gb_({out}) {
    if (in <= 0 || out <= 0)
      throw std::invalid_argument("dense dimensions must be positive");
  }

  const char* kind() const override { return "dense"; }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    if (in.size() != 1)
      throw std::invalid_argument("dense expects flat input, got " + shape_str(in));
    if (in[0] != in_)
      throw std::invalid_argument("dense input mismatch: expected " +
                                  std::to_string(in_) + ", got " + std::to_string(in[0]));
    return {out_};
  }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    if (x.rank() != 2 || x.dim(1) != in_)
      throw std::invalid_argument("dense forward shape mismatch");
    x_ = x;
    const int batch = x.dim(0);
    Tensor<S> y({batch, out_});
    auto xm = x.as_matrix(batch, in_);
    auto wm = w_.as_matrix(out_, in_);
    auto ym = y.as_matrix(batch, out_);
    ym.noalias() = xm * wm.transpose();
    ym.rowwise() += b_.data.transpose();
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    const int batch = x_.dim(0);
    require_shape(gy, {batch, out_}, "dense backward");
    auto gym = gy.as_matrix(batch, out_);
    auto xm = x_.as_matrix(batch, in_);
    auto gwm = gw_.as_matrix(out_, in_);
    gwm.noalias() = gym.transpose() * xm;
    gb_.data.noalias() = gym.colwise().sum().transpose();
    Tensor<S> gx({batch, in_});
    gx.as_matrix(batch, in_).noalias() = gym * w_.as_matrix(out_, in_);
    return gx;
  }

  std::vector<Tensor<S>*> params() override { return {&w_, &b_}; }
  std::vector<Tensor<S>*> grads() override { return {&gw_, &gb_}; }

  Tensor<S>& weights() { return w_; }
  Tensor<S>& bias() { return b_; }

 private:
  int in_, out_;
  Tensor<S> w_, b_, gw_, gb_, x_;
};

// ---------------------------------------------------------------------------
template <class S>
class Relu : public Layer<S> {
 public:
  const char* kind() const override { return "relu"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override { return in; }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    mask_ = (x.data.array() > S(0)).template cast<S>();
    Tensor<S> y = x;
    y.data.array() *= mask_.array();
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    if (gy.size() != mask_.size())
      throw std::invalid_argument("relu backward shape mismatch");
    Tensor<S> gx = gy;
    gx.data.array() *= mask_.array();
    return gx;
  }

 private:
  VecX<S> mask_;
};

// ---------------------------------------------------------------------------
// Inverted dropout: units zeroed with probability p at train time, survivors
// scaled by 1/(1-p); identity in eval mode.
template <class S>
class Dropout : public Layer<S> {
 public:
  explicit Dropout(double p) : p_(p) {
    if (p < 0.0 || p >= 1.0)
      throw std::invalid_argument("dropout probability must lie in [0, 1)");
  }

  const char* kind() const override { return "dropout"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override { return in; }

  Tensor<S> forward(const Tensor<S>& x, Mode mode, std::uint64_t seed) override {
    if (mode == Mode::kEval || p_ == 0.0) {
      train_pass_ = false;
      return x;
    }
    train_pass_ = true;
    const S scale = static_cast<S>(1.0 / (1.0 - p_));
    factors_.resize(x.size());
    Rng rng(seed);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      factors_[i] = rng.uniform() < p_ ? S(0) : scale;
    Tensor<S> y = x;
    y.data.array() *= factors_.array();
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    if (!train_pass_) return gy;
    if (gy.size() != factors_.size())
      throw std::invalid_argument("dropout backward shape mismatch");
    Tensor<S> gx = gy;
    gx.data.array() *= factors_.array();
    return gx;
  }

  double probability() const { return p_; }

 private:
  double p_;
  bool train_pass_ = false;
  VecX<S> factors_;
};

// ---------------------------------------------------------------------------
template <class S>
class Sigmoid : public Layer<S> {
 public:
  const char* kind() const override { return "sigmoid"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override { return in; }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    Tensor<S> y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const S v = x.data[i];
      // Split by sign so exp never overflows.
      if (v >= S(0)) {
        y.data[i] = S(1) / (S(1) + std::exp(-v));
      } else {
        const S e = std::exp(v);
        y.data[i] = e / (S(1) + e);
      }
    }
    y_ = y.data;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    if (gy.size() != y_.size())
      throw std::invalid_argument("sigmoid backward shape mismatch");
    Tensor<S> gx = gy;
    gx.data.array() *= y_.array() * (S(1) - y_.array());
    return gx;
  }

 private:
  VecX<S> y_;
};

// ---------------------------------------------------------------------------
// Row-wise softmax over the last dimension of a [B, C] tensor.
template <class S>
class Softmax : public Layer<S> {
 public:
  const char* kind() const override { return "softmax"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override {
    if (in.size() != 1)
      throw std::invalid_argument("softmax expects flat input, got " + shape_str(in));
    return in;
  }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    if (x.rank() != 2) throw std::invalid_argument("softmax forward expects [B,C]");
    Tensor<S> y = x;
    auto ym = y.as_matrix(x.dim(0), x.dim(1));
    for (Eigen::Index r = 0; r < ym.rows(); ++r) {
      auto row = ym.row(r);
      row = (row.array() - row.maxCoeff()).exp();
      row /= row.sum();
    }
    y_ = y;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) override {
    require_shape(gy, y_.shape, "softmax backward");
    Tensor<S> gx = gy;
    auto gxm = gx.as_matrix(y_.dim(0), y_.dim(1));
    auto ym = y_.as_matrix(y_.dim(0), y_.dim(1));
    for (Eigen::Index r = 0; r < gxm.rows(); ++r) {
      const S dot = (gxm.row(r).array() * ym.row(r).array()).sum();
      gxm.row(r) = ym.row(r).array() * (gxm.row(r).array() - dot);
    }
    return gx;
  }

 private:
  Tensor<S> y_;
};

// ---------------------------------------------------------------------------
template <class S>
class Flatten : public Layer<S> {
 public:
  const char* kind() const override { return "flatten"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override {
    int n = 1;
    for (int d : in) n *= d;
    return {n};
  }

  Tensor<S> forward(const Tensor<S>& x, Mode, std::uint64_t) override {
    in_shape_ = x.shape;
    int n = 1;
    for (std::size_t i = 1; i < x.shape.size(); ++i) n *= x.shape[i];
    return x.reshaped({x.dim(0), n});
  }

  Tensor<S> backward(const Tensor<S>& gy) override { return gy.reshaped(in_shape_); }

 private:
  std::vector<int> in_shape_;
};

}  // namespace wii::nn
