#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "wii/dataset.hpp"
#include "wii/nn/adam.hpp"
#include "wii/nn/loss.hpp"
#include "wii/nn/network.hpp"

namespace wii::nn {

enum class LrSchedule { kConstant, kCosine };

inline const char* lr_schedule_name(LrSchedule s) {
  return s == LrSchedule::kConstant ? "constant" : "cosine";
}

inline LrSchedule lr_schedule_from_name(const std::string& name) {
  if (name == "constant") return LrSchedule::kConstant;
  if (name == "cosine") return LrSchedule::kCosine;
  throw std::invalid_argument("unknown lr_schedule: " + name);
}

struct TrainOptions {
  int epochs = 0;
  int batch_size = 256;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;
  // Cosine decays the step size from learning_rate to ~0 over the run;
  // constant keeps the plain recipe.
  LrSchedule lr_schedule = LrSchedule::kConstant;
  double val_threshold = 0.5;
  bool verbose = false;
};

namespace detail {

// Dataset -> network input tensor [N, C, H, W] plus 0/1 target matrix [N, 15].
template <class S>
void build_features(const Network<S>& net, const Dataset& ds,
                    Tensor<S>& inputs, Tensor<S>& targets) {
  const auto& in_shape = net.config().input_shape;
  const auto n = static_cast<int>(ds.records.size());
  inputs = Tensor<S>({n, in_shape[0], in_shape[1], in_shape[2]});
  targets = Tensor<S>({n, kNumClasses});
  for (int i = 0; i < n; ++i) {
    const DatasetRecord& rec = ds.records[static_cast<std::size_t>(i)];
    Network<S>::fill_input(inputs, i, net.features(rec.iq));
    for (int c = 0; c < kNumClasses; ++c)
      targets.data[static_cast<Eigen::Index>(i) * kNumClasses + c] =
          rec.labels.contains(c) ? S(1) : S(0);
  }
}

template <class S>
Tensor<S> gather_rows(const Tensor<S>& src, const std::vector<int>& order,
                      std::size_t begin, std::size_t end) {
  std::vector<int> shape = src.shape;
  shape[0] = static_cast<int>(end - begin);
  Tensor<S> out(shape);
  const Eigen::Index row = src.size() / src.dim(0);
  for (std::size_t i = begin; i < end; ++i) {
    out.data.segment(static_cast<Eigen::Index>(i - begin) * row, row) =
        src.data.segment(static_cast<Eigen::Index>(order[i]) * row, row);
  }
  return out;
}

}  // namespace detail

// Eval-mode scores for a whole dataset, batched; rows align with records.
template <class S>
Eigen::MatrixXd predict_scores(Network<S>& net, const Dataset& ds,
                               int batch_size = 256) {
  Tensor<S> inputs, targets;
  detail::build_features(net, ds, inputs, targets);
  const int n = inputs.dim(0);
  Eigen::MatrixXd scores(n, kNumClasses);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int start = 0; start < n; start += batch_size) {
    const int stop = std::min(n, start + batch_size);
    Tensor<S> xb = detail::gather_rows(inputs, order,
                                       static_cast<std::size_t>(start),
                                       static_cast<std::size_t>(stop));
    const Tensor<S> y = net.forward(xb, Mode::kEval);
    for (int i = start; i < stop; ++i)
      for (int c = 0; c < kNumClasses; ++c)
        scores(i, c) = static_cast<double>(
            y.data[static_cast<Eigen::Index>(i - start) * kNumClasses + c]);
  }
  return scores;
}

// Mean per-class true-positive rate at a threshold; records where the class
// is the utilized signal are excluded from that class's tally.
inline double mean_tpr_at(const Eigen::MatrixXd& scores, const Dataset& ds,
                          double threshold) {
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    long tp = 0, fn = 0;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      const DatasetRecord& r = ds.records[i];
      if (!r.labels.contains(c) || r.utilized == c) continue;
      if (scores(static_cast<Eigen::Index>(i), c) > threshold) ++tp; else ++fn;
    }
    if (tp + fn > 0) {
      sum += static_cast<double>(tp) / static_cast<double>(tp + fn);
      ++present;
    }
  }
  return present > 0 ? sum / present : 0.0;
}

// Mini-batch training: shuffle, forward, binary cross entropy, backward,
// Adam. Appends one EpochStats (train loss, validation mean TPR) per epoch.
// Deterministic per seed.
template <class S>
void train(Network<S>& net, const Dataset& train_ds, const Dataset& val_ds,
           const TrainOptions& opt) {
  if (train_ds.records.empty() || val_ds.records.empty())
    throw std::invalid_argument("train/validation datasets must be non-empty");
  if (opt.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (opt.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (opt.epochs == 0) return;

  Tensor<S> inputs, targets, val_inputs, val_targets;
  detail::build_features(net, train_ds, inputs, targets);

  AdamState<S> adam(opt.learning_rate);
  adam.init(net.params());

  const int n = inputs.dim(0);
  const long steps_per_epoch = (n + opt.batch_size - 1) / opt.batch_size;
  const long total_steps = steps_per_epoch * opt.epochs;
  long global_step = 0;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(opt.seed, 0xE70C, static_cast<std::uint64_t>(epoch)));
    for (std::size_t k = order.size(); k > 1; --k)
      std::swap(order[k - 1], order[shuffle_rng.uniform_int(k)]);

    double epoch_loss = 0.0;
    int step = 0;
    for (int start = 0; start < n; start += opt.batch_size, ++step) {
      const int stop = std::min(n, start + opt.batch_size);
      Tensor<S> xb = detail::gather_rows(inputs, order,
                                         static_cast<std::size_t>(start),
                                         static_cast<std::size_t>(stop));
      Tensor<S> tb = detail::gather_rows(targets, order,
                                         static_cast<std::size_t>(start),
                                         static_cast<std::size_t>(stop));
      const std::uint64_t batch_seed =
          derive_seed(opt.seed, 0xBA7C, static_cast<std::uint64_t>(epoch),
                      static_cast<std::uint64_t>(step));
      const Tensor<S> pred = net.forward(xb, Mode::kTrain, batch_seed);
      LossResult<S> loss = bce_loss(pred, tb);
      net.backward(loss.grad);
      if (opt.lr_schedule == LrSchedule::kCosine) {
        const double progress = static_cast<double>(global_step) /
                                static_cast<double>(total_steps);
        adam.set_alpha(opt.learning_rate * 0.5 *
                       (1.0 + std::cos(std::numbers::pi * progress)));
      }
      adam.step(net.params(), net.grads());
      ++global_step;
      epoch_loss += loss.loss * (stop - start);
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / n;
    const Eigen::MatrixXd val_scores = predict_scores(net, val_ds, opt.batch_size);
    stats.val_mean_tpr = mean_tpr_at(val_scores, val_ds, opt.val_threshold);
    net.training_log().push_back(stats);
    if (opt.verbose) {
      std::cerr << "epoch " << (epoch + 1) << "/" << opt.epochs
                << "  loss " << stats.train_loss
                << "  val mean TPR " << stats.val_mean_tpr << "\n";
    }
  }
}

}  // namespace wii::nn
