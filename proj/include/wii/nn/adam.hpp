#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wii/nn/tensor.hpp"

namespace wii::nn {

// Adam with bias correction, default hyperparameters per Kingma & Ba
// (alpha overridable; the paper recipe keeps 0.001).
template <class S>
class AdamState {
 public:
  explicit AdamState(double alpha = 1e-3, double beta1 = 0.9,
                     double beta2 = 0.999, double eps = 1e-8)
      : alpha_(alpha), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void init(const std::vector<Tensor<S>*>& params) {
    m_.clear();
    v_.clear();
    for (const Tensor<S>* p : params) {
      m_.emplace_back(p->shape);
      v_.emplace_back(p->shape);
    }
    step_count_ = 0;
  }

  void step(const std::vector<Tensor<S>*>& params,
            const std::vector<Tensor<S>*>& grads) {
    if (params.size() != grads.size() || params.size() != m_.size())
      throw std::invalid_argument("adam: parameter/gradient list mismatch");
    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor<S>& p = *params[i];
      const Tensor<S>& g = *grads[i];
      if (!p.same_shape(g) || !p.same_shape(m_[i]))
        throw std::invalid_argument("adam: tensor shape mismatch");
      auto m = m_[i].data.array();
      auto v = v_[i].data.array();
      m = static_cast<S>(beta1_) * m + static_cast<S>(1.0 - beta1_) * g.data.array();
      v = static_cast<S>(beta2_) * v +
          static_cast<S>(1.0 - beta2_) * g.data.array().square();
      p.data.array() -= static_cast<S>(alpha_) *
                        (m / static_cast<S>(bc1)) /
                        ((v / static_cast<S>(bc2)).sqrt() + static_cast<S>(eps_));
    }
  }

  long step_count() const { return step_count_; }
  double alpha() const { return alpha_; }
  void set_alpha(double alpha) { alpha_ = alpha; }

 private:
  double alpha_, beta1_, beta2_, eps_;
  long step_count_ = 0;
  std::vector<Tensor<S>> m_, v_;
};

}  // namespace wii::nn
