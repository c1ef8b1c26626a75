#include "ltmu/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ltmu::nn {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// y += M v, M is [rows, cols], v is [cols].
void matvec_acc(const Tensor& m, const double* v, double* y) {
  const int rows = m.shape[0];
  const int cols = m.shape[1];
  const double* w = m.data.data();
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* wr = w + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += wr[c] * v[c];
    y[r] += acc;
  }
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmParams LstmParams::zeros(int hidden, int input) {
  LstmParams p;
  for (Tensor* w : {&p.w_f, &p.w_i, &p.w_o, &p.w_c}) *w = Tensor({hidden, input});
  for (Tensor* u : {&p.u_f, &p.u_i, &p.u_o, &p.u_c}) *u = Tensor({hidden, hidden});
  for (Tensor* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) *b = Tensor({hidden});
  return p;
}

LstmParams LstmParams::init(int hidden, int input, Rng& rng, double scale, double forget_bias) {
  LstmParams p = zeros(hidden, input);
  for (Tensor* w : {&p.w_f, &p.w_i, &p.w_o, &p.w_c, &p.u_f, &p.u_i, &p.u_o, &p.u_c})
    uniform_init(*w, rng, scale);
  p.b_f.fill(forget_bias);
  return p;
}

LstmState LstmState::zeros(int hidden) {
  LstmState s;
  s.h = Tensor({hidden});
  s.c = Tensor({hidden});
  return s;
}

OptState OptState::for_params(const std::vector<Tensor*>& params, double lr, double momentum) {
  OptState o;
  o.learning_rate = lr;
  o.momentum = momentum;
  o.velocity.reserve(params.size());
  for (const Tensor* p : params) o.velocity.emplace_back(p->shape);
  return o;
}

LstmState lstm_cell_step(const Tensor& x, const LstmState& prev, const LstmParams& p) {
  const int hidden = p.hidden();
  require(x.rank() == 1 && x.shape[0] == p.input_dim(), "lstm_cell_step: input dim mismatch");
  require(prev.h.shape == std::vector<int>{hidden} && prev.c.shape == std::vector<int>{hidden},
          "lstm_cell_step: state dim mismatch");

  Tensor af = p.b_f, ai = p.b_i, ao = p.b_o, ac = p.b_c;
  matvec_acc(p.w_f, x.data.data(), af.data.data());
  matvec_acc(p.u_f, prev.h.data.data(), af.data.data());
  matvec_acc(p.w_i, x.data.data(), ai.data.data());
  matvec_acc(p.u_i, prev.h.data.data(), ai.data.data());
  matvec_acc(p.w_o, x.data.data(), ao.data.data());
  matvec_acc(p.u_o, prev.h.data.data(), ao.data.data());
  matvec_acc(p.w_c, x.data.data(), ac.data.data());
  matvec_acc(p.u_c, prev.h.data.data(), ac.data.data());

  LstmState out = LstmState::zeros(hidden);
  for (int j = 0; j < hidden; ++j) {
    const double f = sigmoid(af[j]);
    const double i = sigmoid(ai[j]);
    const double o = sigmoid(ao[j]);
    const double g = std::tanh(ac[j]);
    const double c = f * prev.c[j] + i * g;
    out.c[j] = c;
    out.h[j] = o * std::tanh(c);
  }
  return out;
}

std::pair<std::vector<LstmState>, LstmState> lstm_forward(const std::vector<Tensor>& seq,
                                                          const LstmParams& p,
                                                          const LstmState& init) {
  require(!seq.empty(), "lstm_forward: empty sequence");
  std::vector<LstmState> states;
  states.reserve(seq.size());
  LstmState cur = init;
  for (const Tensor& x : seq) {
    cur = lstm_cell_step(x, cur, p);
    states.push_back(cur);
  }
  return {std::move(states), cur};
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, int stride, const Tensor& bias) {
  require(input.rank() == 3, "conv2d: input must be [h, w, c]");
  require(kernels.rank() == 4, "conv2d: kernels must be [kh, kw, c, oc]");
  require(stride >= 1, "conv2d: stride must be >= 1");
  const int h = input.shape[0], w = input.shape[1], c = input.shape[2];
  const int kh = kernels.shape[0], kw = kernels.shape[1];
  const int kc = kernels.shape[2], oc = kernels.shape[3];
  require(kc == c, "conv2d: channel mismatch");
  require(kh <= h && kw <= w, "conv2d: kernel larger than input");
  require(bias.rank() == 1 && bias.shape[0] == oc, "conv2d: bias dim mismatch");

  const int oh = (h - kh) / stride + 1;
  const int ow = (w - kw) / stride + 1;
  Tensor out({oh, ow, oc});
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int k = 0; k < oc; ++k) {
        double acc = bias[k];
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            const double* in = &input.data[((static_cast<std::size_t>(oy * stride + ky)) * w +
                                            (ox * stride + kx)) * c];
            const double* kn = &kernels.data[((static_cast<std::size_t>(ky) * kw + kx) * c) * oc + k];
            for (int ci = 0; ci < c; ++ci) acc += in[ci] * kn[static_cast<std::size_t>(ci) * oc];
          }
        }
        out.at(oy, ox, k) = acc;
      }
    }
  }
  return out;
}

Tensor global_avg_pool(const Tensor& input) {
  require(input.rank() == 3 && input.shape[0] >= 1 && input.shape[1] >= 1,
          "global_avg_pool: input must be [h, w, c]");
  const int h = input.shape[0], w = input.shape[1], c = input.shape[2];
  Tensor out({1, 1, c});
  const double inv = 1.0 / (static_cast<double>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) out.data[k] += input.at(y, x, k);
  for (int k = 0; k < c; ++k) out.data[k] *= inv;
  return out;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias, Activation act) {
  require(input.rank() == 1, "dense: input must be a vector");
  require(weights.rank() == 2 && weights.shape[1] == input.shape[0], "dense: weight dim mismatch");
  require(bias.rank() == 1 && bias.shape[0] == weights.shape[0], "dense: bias dim mismatch");
  Tensor out = bias;
  matvec_acc(weights, input.data.data(), out.data.data());
  if (act == Activation::Tanh)
    for (double& v : out.data) v = std::tanh(v);
  return out;
}

Tensor softmax(const Tensor& logits) {
  Tensor p(logits.shape);
  const double m = *std::max_element(logits.data.begin(), logits.data.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p.data[i] = std::exp(logits[i] - m);
    z += p.data[i];
  }
  for (double& v : p.data) v /= z;
  return p;
}

std::pair<double, Tensor> softmax_xent(const Tensor& logits, int label) {
  require(logits.rank() == 1 && label >= 0 && label < logits.shape[0],
          "softmax_xent: label out of range");
  const double m = *std::max_element(logits.data.begin(), logits.data.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += std::exp(logits[i] - m);
  const double loss = std::log(z) - (logits[label] - m);
  Tensor grad(logits.shape);
  for (std::size_t i = 0; i < logits.size(); ++i)
    grad.data[i] = std::exp(logits[i] - m) / z - (static_cast<int>(i) == label ? 1.0 : 0.0);
  return {loss, std::move(grad)};
}

void sgd_momentum_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                       OptState& opt) {
  require(params.size() == grads.size() && params.size() == opt.velocity.size(),
          "sgd_momentum_step: parameter list mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i]->same_shape(grads[i]) && params[i]->same_shape(opt.velocity[i]),
            "sgd_momentum_step: shape mismatch");
    Tensor& v = opt.velocity[i];
    Tensor& p = *params[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      v.data[j] = opt.momentum * v.data[j] + grads[i].data[j];
      p.data[j] -= opt.learning_rate * v.data[j];
    }
  }
}

double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : grads)
    for (double v : g.data) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (Tensor& g : grads)
      for (double& v : g.data) v *= scale;
  }
  return norm;
}

void uniform_init(Tensor& t, Rng& rng, double scale) {
  for (double& v : t.data) v = rng.uniform(-scale, scale);
}

}  // namespace ltmu::nn
