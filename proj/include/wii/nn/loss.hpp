#pragma once

#include <cmath>
#include <stdexcept>

#include "wii/nn/tensor.hpp"

namespace wii::nn {

template <class S>
struct LossResult {
  double loss;
  Tensor<S> grad;  // w.r.t. the predictions
};

// Mean binary cross entropy over batch and classes. Predictions are clamped
// to [1e-7, 1 - 1e-7] so the loss stays finite for p in {0, 1}; the gradient
// is zero where the clamp saturates.
template <class S>
LossResult<S> bce_loss(const Tensor<S>& predictions, const Tensor<S>& targets) {
  if (!predictions.same_shape(targets))
    throw std::invalid_argument("bce: prediction/target shape mismatch");
  const double lo = 1e-7, hi = 1.0 - 1e-7;
  const double count = static_cast<double>(predictions.size());
  double loss = 0.0;
  LossResult<S> out{0.0, Tensor<S>(predictions.shape)};
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const double p = static_cast<double>(predictions.data[i]);
    const double t = static_cast<double>(targets.data[i]);
    const double pc = std::min(hi, std::max(lo, p));
    loss -= t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc);
    const double g = (p > lo && p < hi) ? (pc - t) / (pc * (1.0 - pc)) : 0.0;
    out.grad.data[i] = static_cast<S>(g / count);
  }
  out.loss = loss / count;
  return out;
}

// Mean categorical cross entropy over the batch for softmax outputs with
// one-hot (or soft) targets; same clamping policy as bce_loss.
template <class S>
LossResult<S> cce_loss(const Tensor<S>& predictions, const Tensor<S>& targets) {
  if (!predictions.same_shape(targets))
    throw std::invalid_argument("cce: prediction/target shape mismatch");
  if (predictions.rank() != 2)
    throw std::invalid_argument("cce expects [B,C] predictions");
  const double lo = 1e-7, hi = 1.0 - 1e-7;
  const double batch = static_cast<double>(predictions.dim(0));
  double loss = 0.0;
  LossResult<S> out{0.0, Tensor<S>(predictions.shape)};
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const double p = static_cast<double>(predictions.data[i]);
    const double t = static_cast<double>(targets.data[i]);
    const double pc = std::min(hi, std::max(lo, p));
    loss -= t * std::log(pc);
    const double g = (p > lo && p < hi) ? -t / pc : 0.0;
    out.grad.data[i] = static_cast<S>(g / batch);
  }
  out.loss = loss / batch;
  return out;
}

}  // namespace wii::nn
