#pragma once

#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cupid/tensor.hpp"

namespace cupid {

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;  // first moment
  Tensor v;  // second moment
};

class ParamStore {
 public:
  int add(const std::string& name, Tensor init) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
    Param p;
    p.name = name;
    p.grad = Tensor::zeros(init.shape());
    p.m = Tensor::zeros(init.shape());
    p.v = Tensor::zeros(init.shape());
    p.value = std::move(init);
    params_.push_back(std::move(p));
    const int id = static_cast<int>(params_.size()) - 1;
    index_[name] = id;
    return id;
  }

  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  int require(const std::string& name) const {
    const int id = find(name);
    if (id < 0) throw std::invalid_argument("unknown parameter: " + name);
    return id;
  }

  Param& at(int id) { return params_.at(static_cast<size_t>(id)); }
  const Param& at(int id) const { return params_.at(static_cast<size_t>(id)); }
  Param& at(const std::string& name) { return at(require(name)); }
  const Param& at(const std::string& name) const { return at(require(name)); }

  size_t size() const { return params_.size(); }

  void zero_grads() {
    for (auto& p : params_) p.grad.fill(0.0);
  }

  std::vector<int> all_ids() const {
    std::vector<int> ids(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) ids[i] = static_cast<int>(i);
    return ids;
  }

  std::vector<int> with_prefix(const std::string& prefix) const {
    std::vector<int> ids;
    for (size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name.rfind(prefix, 0) == 0) ids.push_back(static_cast<int>(i));
    }
    return ids;
  }

  // Bitwise fingerprint of the named values; used by freeze-integrity checks.
  uint64_t checksum(const std::vector<int>& ids) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (int id : ids) {
      const Param& p = at(id);
      const auto* bytes = reinterpret_cast<const unsigned char*>(p.value.data());
      const size_t n = static_cast<size_t>(p.value.numel()) * sizeof(double);
      for (size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
      }
    }
    return h;
  }

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, int> index_;
};

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

// Adaptive-moment update with decoupled weight decay.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg) : cfg_(cfg) {}

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  int64_t steps() const { return t_; }
  void set_steps(int64_t t) { t_ = t; }

  void step(ParamStore& store, const std::vector<int>& trainable) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (int id : trainable) {
      Param& p = store.at(id);
      double* w = p.value.data();
      const double* g = p.grad.data();
      double* m = p.m.data();
      double* v = p.v.data();
      const int64_t n = p.value.numel();
      for (int64_t i = 0; i < n; ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * w[i]);
      }
    }
  }

 private:
  AdamWConfig cfg_;
  int64_t t_ = 0;
};

}  // namespace cupid
