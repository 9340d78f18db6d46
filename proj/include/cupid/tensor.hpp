#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cupid/rng.hpp"

namespace cupid {

// Dense row-major tensor of doubles. Copies share storage; only parameter
// initialization and the optimizer mutate values in place, never while a
// tape referencing them is alive.
class Tensor {
 public:
  Tensor() : data_(std::make_shared<std::vector<double>>()) {}

  static Tensor zeros(std::vector<int64_t> shape) {
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::make_shared<std::vector<double>>(t.count(), 0.0);
    return t;
  }

  static Tensor full(std::vector<int64_t> shape, double v) {
    Tensor t = zeros(std::move(shape));
    for (auto& x : *t.data_) x = v;
    return t;
  }

  static Tensor scalar(double v) { return full({1}, v); }

  static Tensor from(std::vector<int64_t> shape, std::vector<double> vals) {
    Tensor t;
    t.shape_ = std::move(shape);
    if (static_cast<int64_t>(vals.size()) != t.count()) {
      throw std::invalid_argument("Tensor::from: value count does not match shape");
    }
    t.data_ = std::make_shared<std::vector<double>>(std::move(vals));
    return t;
  }

  static Tensor randn(std::vector<int64_t> shape, Rng& rng, double stddev) {
    Tensor t = zeros(std::move(shape));
    for (auto& x : *t.data_) x = stddev * rng.normal();
    return t;
  }

  // Uniform(-a, a) with a = 1/sqrt(fan_in); dense-layer default init.
  static Tensor uniform_fan_in(std::vector<int64_t> shape, Rng& rng, int64_t fan_in) {
    Tensor t = zeros(std::move(shape));
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
    for (auto& x : *t.data_) x = rng.uniform(-a, a);
    return t;
  }

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t ndim() const { return static_cast<int64_t>(shape_.size()); }
  int64_t dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  int64_t numel() const { return static_cast<int64_t>(data_->size()); }
  bool empty() const { return data_->empty(); }

  int64_t rows() const { return ndim() == 2 ? shape_[0] : (ndim() == 1 ? 1 : throw_rank()); }
  int64_t cols() const { return ndim() == 2 ? shape_[1] : (ndim() == 1 ? shape_[0] : throw_rank()); }

  double* data() { return data_->data(); }
  const double* data() const { return data_->data(); }

  double& operator[](int64_t i) { return (*data_)[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return (*data_)[static_cast<size_t>(i)]; }
  double& at(int64_t r, int64_t c) { return (*data_)[static_cast<size_t>(r * cols() + c)]; }
  double at(int64_t r, int64_t c) const { return (*data_)[static_cast<size_t>(r * cols() + c)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double x : *data_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  Tensor clone() const {
    Tensor t;
    t.shape_ = shape_;
    t.data_ = std::make_shared<std::vector<double>>(*data_);
    return t;
  }

  void fill(double v) {
    for (auto& x : *data_) x = v;
  }

  bool shares_storage(const Tensor& o) const { return data_ == o.data_; }

 private:
  int64_t count() const {
    int64_t n = 1;
    for (int64_t d : shape_) {
      if (d < 0) throw std::invalid_argument("negative tensor dim");
      n *= d;
    }
    return n;
  }
  [[noreturn]] static int64_t throw_rank() { throw std::logic_error("tensor rank mismatch"); }

  std::vector<int64_t> shape_;
  std::shared_ptr<std::vector<double>> data_;
};

// Dense kernels with a fixed ascending accumulation order per output element,
// independent of the other output dimension. The exact-causality and
// prefix-stability tests rely on row k of these products being bit-identical
// whether computed inside a tall or a short matrix.

// c = a[m,k] * b[k,n]  (+= when acc)
inline void mm(const double* a, int64_t m, int64_t k, const double* b, int64_t n, double* c,
               bool acc = false) {
  for (int64_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!acc) {
      for (int64_t j = 0; j < n; ++j) ci[j] = 0.0;
    }
    const double* ai = a + i * k;
    for (int64_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b + p * n;
      for (int64_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// c = a[m,k] * b[n,k]^T -> [m,n]
inline void mm_nt(const double* a, int64_t m, int64_t k, const double* b, int64_t n, double* c,
                  bool acc = false) {
  for (int64_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (int64_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (int64_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = acc ? ci[j] + s : s;
    }
  }
}

// c = a[m,k]^T * b[m,n] -> [k,n]
inline void mm_tn(const double* a, int64_t m, int64_t k, const double* b, int64_t n, double* c,
                  bool acc = false) {
  if (!acc) {
    for (int64_t i = 0; i < k * n; ++i) c[i] = 0.0;
  }
  for (int64_t r = 0; r < m; ++r) {
    const double* ar = a + r * k;
    const double* br = b + r * n;
    for (int64_t p = 0; p < k; ++p) {
      const double av = ar[p];
      double* cp = c + p * n;
      for (int64_t j = 0; j < n; ++j) cp[j] += av * br[j];
    }
  }
}

}  // namespace cupid
