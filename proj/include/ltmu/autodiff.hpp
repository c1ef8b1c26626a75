#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ltmu/tensor.hpp"

namespace ltmu::ad {

// Reverse-mode differentiation over a recorded execution tape. Nodes are
// whole layers, not scalars; the backward pass dispatches on the op kind.
// Node ids are indices into the tape, so creation order is a topological
// order and the backward walk is a single reverse scan.
class Tape {
 public:
  enum class Act : int { Sigmoid = 0, Tanh = 1, None = 2 };

  int leaf(Tensor v);
  int external(const Tensor* v);  // caller keeps `v` alive and unchanged

  // act(W x + U h + b) — one LSTM gate.
  int gate_affine(int w, int x, int u, int h, int b, Act act);
  // act(W x + b)
  int dense(int w, int x, int b, Act act);
  int conv2d(int input, int kernels, int bias, int stride);
  int global_avg_pool(int input);
  int tanh(int a);
  int mul(int a, int b);  // elementwise
  int add(int a, int b);  // elementwise
  int concat(const std::vector<int>& parts);
  // Cue layout [conf, v_r(8), appear, box(4)] with v_r taken from a node.
  int pack_cue(int vr_node, double conf, double appear, const std::array<double, 4>& box);
  // Returns the scalar loss node; softmax probabilities are kept for backward.
  int softmax_xent(int logits, int label);

  const Tensor& value(int id) const;
  // Gradient accumulated for `id` by the last backward(); zeros if untouched.
  Tensor grad_of(int id) const;

  void backward(int node, double seed = 1.0);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  enum class Op : std::uint8_t {
    Leaf, GateAffine, Dense, Conv2d, Gap, Tanh, Mul, Add, Concat, PackCue, SoftmaxXent
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1, b = -1, c = -1, d = -1, e = -1;
    int i0 = 0;  // stride, label, or activation kind
    Tensor value;
    const Tensor* ext = nullptr;
    Tensor cache;                // SoftmaxXent: probabilities
    std::array<double, 6> aux{};  // PackCue constants
    std::vector<int> list;       // Concat parents
  };

  const Tensor& val(int id) const { return nodes_[id].ext ? *nodes_[id].ext : nodes_[id].value; }
  Tensor& grad_slot(int id);
  int push(Node n);
  void backward_node(int id);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

struct TapeLstmParams {
  int w_f, w_i, w_o, w_c;
  int u_f, u_i, u_o, u_c;
  int b_f, b_i, b_o, b_c;
};

// One LSTM cell step on the tape; returns (h, c) node ids.
std::pair<int, int> lstm_cell(Tape& t, int x, int h_prev, int c_prev, const TapeLstmParams& p);

// Central-difference check of `analytic` gradients against `loss`, which is
// evaluated at the current parameter values. Relative error is
// |a - n| / max(|a|, |n|, 1e-8). With max_coords >= 0 only that many
// coordinates per tensor are sampled (seeded), otherwise all are checked.
double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& params,
                  const std::vector<Tensor>& analytic, double epsilon, int max_coords = -1,
                  std::uint64_t seed = 0);

}  // namespace ltmu::ad
