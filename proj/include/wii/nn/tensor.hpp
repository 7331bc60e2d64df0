#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wii::nn {

template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using RowMajorMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using RowMap = Eigen::Map<RowMajorMat<S>>;
template <class S>
using ConstRowMap = Eigen::Map<const RowMajorMat<S>>;

inline std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
    os << (i ? "," : "") << shape[i];
  os << "]";
  return os.str();
}

// Dense n-dimensional array, row-major, flat Eigen storage.
template <class S>
struct Tensor {
  std::vector<int> shape;
  VecX<S> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> shp) : shape(std::move(shp)) {
    data = VecX<S>::Zero(size_of(shape));
  }

  static Eigen::Index size_of(const std::vector<int>& shp) {
    Eigen::Index n = 1;
    for (int d : shp) {
      if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
      n *= d;
    }
    return n;
  }

  Eigen::Index size() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  // View as a [rows x cols] row-major matrix over the flat data.
  RowMap<S> as_matrix(Eigen::Index rows, Eigen::Index cols) {
    if (rows * cols != data.size())
      throw std::invalid_argument("matrix view size mismatch");
    return RowMap<S>(data.data(), rows, cols);
  }
  ConstRowMap<S> as_matrix(Eigen::Index rows, Eigen::Index cols) const {
    if (rows * cols != data.size())
      throw std::invalid_argument("matrix view size mismatch");
    return ConstRowMap<S>(data.data(), rows, cols);
  }

  Tensor reshaped(std::vector<int> new_shape) const {
    if (size_of(new_shape) != data.size())
      throw std::invalid_argument("reshape size mismatch: " + shape_str(shape) +
                                  " -> " + shape_str(new_shape));
    Tensor t;
    t.shape = std::move(new_shape);
    t.data = data;
    return t;
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const { return data.allFinite(); }
};

template <class S>
void require_shape(const Tensor<S>& t, const std::vector<int>& shape,
                   const char* what) {
  if (t.shape != shape)
    throw std::invalid_argument(std::string(what) + ": expected shape " +
                                shape_str(shape) + ", got " + shape_str(t.shape));
}

}  // namespace wii::nn
