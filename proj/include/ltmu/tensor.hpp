#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace ltmu {

// Dense row-major tensor of doubles. Rank is dynamic; shapes used in this
// project are vectors [n], matrices [rows, cols], feature maps [h, w, c] and
// conv kernels [kh, kw, in_c, out_c].
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(count(shape)), 0.0);
  }

  Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != static_cast<std::size_t>(count(shape)))
      throw std::invalid_argument("tensor: data length does not match shape");
  }

  static Tensor vec(std::vector<double> d) {
    const int n = static_cast<int>(d.size());
    return Tensor({n}, std::move(d));
  }

  static long long count(const std::vector<int>& s) {
    long long n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  int rank() const { return static_cast<int>(shape.size()); }
  std::size_t size() const { return data.size(); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  // 2-D access, shape [rows, cols].
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * shape[1] + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * shape[1] + c]; }

  // 3-D access, shape [h, w, c].
  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * shape[1] + x) * shape[2] + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * shape[1] + x) * shape[2] + c];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  void fill(double v) { data.assign(data.size(), v); }
};

}  // namespace ltmu
