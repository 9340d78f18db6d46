#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cupid/optim.hpp"
#include "cupid/tensor.hpp"

namespace cupid {

using NodeId = int32_t;

// Reverse-mode tape. Nodes append in topological order during the forward
// pass; backward() walks the tape in reverse. Parameter leaves share storage
// with the ParamStore and flush their gradients back into it, so the same
// parameter requested twice yields one node and one accumulated gradient.
class Tape {
 public:
  explicit Tape(ParamStore* store = nullptr) : store_(store) {}

  NodeId constant(Tensor v);
  NodeId param(const std::string& name);

  NodeId matmul(NodeId a, NodeId b);     // [m,k] x [k,n]
  NodeId matmul_nt(NodeId a, NodeId b);  // [m,k] x [n,k]^T -> [m,n]
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId add_rowvec(NodeId x, NodeId bias);  // [m,n] + [n]
  NodeId relu(NodeId x);
  NodeId gelu(NodeId x);
  NodeId exp(NodeId x);
  NodeId layer_norm(NodeId x, NodeId gamma, NodeId beta);  // per row of [m,n]
  // Row i of [t,t] attends to columns <= i; softmax of scale*scores over the
  // allowed columns, exact zeros elsewhere.
  NodeId causal_softmax(NodeId scores, double scale);
  NodeId slice_rows(NodeId x, int64_t r0, int64_t r1);
  NodeId slice_cols(NodeId x, int64_t c0, int64_t c1);
  NodeId concat_rows(const std::vector<NodeId>& xs);
  NodeId concat_cols(const std::vector<NodeId>& xs);
  NodeId gather_rows(NodeId table, std::vector<int64_t> idx);
  NodeId row_dot(NodeId a, NodeId b);  // [m,n] . [m,n] -> [m,1]
  NodeId scale_mul(NodeId x, NodeId w);   // w: [1]
  NodeId shift_add(NodeId x, NodeId b);   // b: [1]
  NodeId affine_const(NodeId x, double a, double c);  // a*x + c
  NodeId sum(NodeId x);   // -> [1]
  NodeId mean(NodeId x);  // -> [1]
  NodeId sum_sq_err(NodeId pred, Tensor target);  // sum((pred-t)^2) -> [1]

  const Tensor& value(NodeId id) const { return nodes_[static_cast<size_t>(id)].val; }
  const Tensor& grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].grad; }
  size_t size() const { return nodes_.size(); }

  // Seeds d(loss)=1, runs the tape in reverse, then flushes parameter-leaf
  // gradients into the store. loss must be a [1] node.
  void backward(NodeId loss);

 private:
  struct Node {
    Tensor val;
    Tensor grad;  // allocated lazily during backward
    std::function<void(Tape&, NodeId)> back;
    int param_idx = -1;
  };

  NodeId push(Tensor val, std::function<void(Tape&, NodeId)> back);
  Tensor& ensure_grad(NodeId id);
  Node& node(NodeId id) { return nodes_[static_cast<size_t>(id)]; }

  static void check_2d(const Tensor& t, const char* who);

  ParamStore* store_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> param_nodes_;
};

// y = x W^T + b with x [m,in], W [out,in], b [out].
NodeId linear(Tape& t, NodeId x, NodeId w, NodeId b);

struct DenseLayerIds {
  NodeId w;
  NodeId b;
};

// Hidden layers apply ReLU; the final layer is linear.
NodeId mlp_relu(Tape& t, NodeId x, const std::vector<DenseLayerIds>& layers);

// Central finite differences of a scalar-valued rebuild function with respect
// to every parameter in `ids`; returns the max relative error against the
// tape gradient. `build` must construct a fresh tape over the store and
// return the loss node id paired with the tape.
double grad_check(ParamStore& store, const std::vector<int>& ids,
                  const std::function<double()>& loss_value,
                  const std::function<void()>& compute_grads, double eps = 1e-5);

}  // namespace cupid
