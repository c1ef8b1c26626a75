#pragma once

#include <utility>
#include <vector>

#include "ltmu/rng.hpp"
#include "ltmu/tensor.hpp"

namespace ltmu::nn {

enum class Activation { None, Tanh };

// Gate weights for one LSTM cell. Input-to-gate matrices are
// [hidden, input], recurrent matrices [hidden, hidden], biases [hidden].
struct LstmParams {
  Tensor w_f, w_i, w_o, w_c;
  Tensor u_f, u_i, u_o, u_c;
  Tensor b_f, b_i, b_o, b_c;

  int hidden() const { return w_f.shape[0]; }
  int input_dim() const { return w_f.shape[1]; }

  static LstmParams zeros(int hidden, int input);
  static LstmParams init(int hidden, int input, Rng& rng, double scale, double forget_bias);
};

struct LstmState {
  Tensor h;
  Tensor c;

  static LstmState zeros(int hidden);
};

struct OptState {
  std::vector<Tensor> velocity;  // mirrors the parameter list
  double learning_rate = 1e-4;
  double momentum = 0.9;

  static OptState for_params(const std::vector<Tensor*>& params, double lr, double momentum = 0.9);
};

double sigmoid(double x);

LstmState lstm_cell_step(const Tensor& x, const LstmState& prev, const LstmParams& p);

// Unrolls the cell over a non-empty sequence; returns per-step states and the
// final state (equal to the last element).
std::pair<std::vector<LstmState>, LstmState> lstm_forward(const std::vector<Tensor>& seq,
                                                          const LstmParams& p,
                                                          const LstmState& init);

// Valid-padding cross-correlation. input [h, w, c], kernels [kh, kw, c, oc],
// bias [oc]; output [oh, ow, oc].
Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, const Tensor& bias);

// Per-channel mean; input [h, w, c] -> output [1, 1, c].
Tensor global_avg_pool(const Tensor& input);

// activation(W x + b); weights [out, in], bias [out].
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias, Activation act);

// Numerically stable cross-entropy over softmax(logits) for the given class.
// Returns the loss and d loss / d logits.
std::pair<double, Tensor> softmax_xent(const Tensor& logits, int label);

// Probabilities of softmax(logits), max-subtracted.
Tensor softmax(const Tensor& logits);

// v <- momentum * v + g; theta <- theta - lr * v.
void sgd_momentum_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                       OptState& opt);

// Scales grads in place so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

void uniform_init(Tensor& t, Rng& rng, double scale);

}  // namespace ltmu::nn
