#pragma once

#include <fstream>
#include <string>

#include "wii/io.hpp"
#include "wii/nn/network.hpp"

namespace wii::nn {

// Model file, little-endian: magic "WIIM" | u16 version | u8 scalar bytes |
// config as canonical JSON | weight tensors (rank, dims, raw data) |
// training log. Round trips are bit-exact.

namespace detail {
constexpr char kModelMagic[4] = {'W', 'I', 'I', 'M'};
constexpr std::uint16_t kModelVersion = 1;
}  // namespace detail

template <class S>
void save_model(Network<S>& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  io::Writer w(f);
  w.bytes(detail::kModelMagic, 4);
  w.u16(detail::kModelVersion);
  w.u8(static_cast<std::uint8_t>(sizeof(S)));
  w.str(net.config().to_json().dump());
  const auto params = net.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const Tensor<S>* p : params) {
    w.u8(static_cast<std::uint8_t>(p->shape.size()));
    for (int d : p->shape) w.i32(d);
    w.bytes(p->data.data(), static_cast<std::size_t>(p->data.size()) * sizeof(S));
  }
  const auto& log = net.training_log();
  w.u32(static_cast<std::uint32_t>(log.size()));
  for (const EpochStats& e : log) {
    w.f64(e.train_loss);
    w.f64(e.val_mean_tpr);
  }
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

template <class S>
Network<S> load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  io::Reader r(f, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, detail::kModelMagic, 4) != 0)
    throw io::FormatError(path + ": bad magic, not a WIIM model file");
  const std::uint16_t version = r.u16();
  if (version != detail::kModelVersion)
    throw io::FormatError(path + ": unsupported model version " +
                          std::to_string(version));
  const std::uint8_t scalar = r.u8();
  if (scalar != sizeof(S))
    throw io::FormatError(path + ": model precision is " +
                          std::to_string(scalar) + "-byte scalars, expected " +
                          std::to_string(sizeof(S)));
  const NetworkConfig config =
      NetworkConfig::from_json(nlohmann::json::parse(r.str()));
  Network<S> net(config, 0);

  const std::uint32_t n_tensors = r.u32();
  const auto params = net.params();
  if (n_tensors != params.size())
    throw io::FormatError(path + ": model file has " + std::to_string(n_tensors) +
                          " weight tensors, config needs " +
                          std::to_string(params.size()));
  for (Tensor<S>* p : params) {
    const std::uint8_t rank = r.u8();
    if (rank != p->shape.size())
      throw io::FormatError(path + ": weight tensor rank mismatch");
    for (int d : p->shape) {
      const std::int32_t got = r.i32();
      if (got != d)
        throw io::FormatError(path + ": weight tensor dimension mismatch");
    }
    r.bytes(p->data.data(), static_cast<std::size_t>(p->data.size()) * sizeof(S));
  }
  const std::uint32_t n_epochs = r.u32();
  for (std::uint32_t i = 0; i < n_epochs; ++i) {
    EpochStats e;
    e.train_loss = r.f64();
    e.val_mean_tpr = r.f64();
    net.training_log().push_back(e);
  }
  return net;
}

// Scalar width recorded in a model file (4 = float32, 8 = float64).
inline int model_file_precision(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  io::Reader r(f, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, detail::kModelMagic, 4) != 0)
    throw io::FormatError(path + ": bad magic, not a WIIM model file");
  r.u16();
  return r.u8();
}

}  // namespace wii::nn
