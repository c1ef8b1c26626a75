#include "ltmu/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltmu/nn.hpp"
#include "ltmu/rng.hpp"

namespace ltmu::ad {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double act_apply(Tape::Act a, double x) {
  switch (a) {
    case Tape::Act::Sigmoid: return nn::sigmoid(x);
    case Tape::Act::Tanh: return std::tanh(x);
    default: return x;
  }
}

// Derivative expressed through the activation output.
double act_deriv_from_out(Tape::Act a, double y) {
  switch (a) {
    case Tape::Act::Sigmoid: return y * (1.0 - y);
    case Tape::Act::Tanh: return 1.0 - y * y;
    default: return 1.0;
  }
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(Tensor v) {
  Node n;
  n.value = std::move(v);
  return push(std::move(n));
}

int Tape::external(const Tensor* v) {
  Node n;
  n.ext = v;
  return push(std::move(n));
}

Tensor& Tape::grad_slot(int id) {
  if (grads_[id].data.empty()) grads_[id] = Tensor(val(id).shape);
  return grads_[id];
}

const Tensor& Tape::value(int id) const { return val(id); }

Tensor Tape::grad_of(int id) const {
  if (grads_[id].data.empty()) return Tensor(val(id).shape);
  return grads_[id];
}

int Tape::gate_affine(int w, int x, int u, int h, int b, Act act) {
  const Tensor& wt = val(w);
  const Tensor& xt = val(x);
  const Tensor& ut = val(u);
  const Tensor& ht = val(h);
  const Tensor& bt = val(b);
  const int rows = wt.shape[0];
  require(wt.shape[1] == xt.shape[0] && ut.shape[1] == ht.shape[0] && ut.shape[0] == rows &&
              bt.shape[0] == rows,
          "gate_affine: shape mismatch");
  Node n;
  n.op = Op::GateAffine;
  n.a = w; n.b = x; n.c = u; n.d = h; n.e = b;
  n.i0 = static_cast<int>(act);
  n.value = bt;
  for (int r = 0; r < rows; ++r) {
    double acc = n.value[r];
    const double* wr = &wt.data[static_cast<std::size_t>(r) * wt.shape[1]];
    for (int k = 0; k < wt.shape[1]; ++k) acc += wr[k] * xt[k];
    const double* ur = &ut.data[static_cast<std::size_t>(r) * ut.shape[1]];
    for (int k = 0; k < ut.shape[1]; ++k) acc += ur[k] * ht[k];
    n.value[r] = act_apply(act, acc);
  }
  return push(std::move(n));
}

int Tape::dense(int w, int x, int b, Act act) {
  const Tensor& wt = val(w);
  const Tensor& xt = val(x);
  const Tensor& bt = val(b);
  require(wt.shape[1] == xt.shape[0] && bt.shape[0] == wt.shape[0], "dense: shape mismatch");
  Node n;
  n.op = Op::Dense;
  n.a = w; n.b = x; n.c = b;
  n.i0 = static_cast<int>(act);
  n.value = bt;
  for (int r = 0; r < wt.shape[0]; ++r) {
    double acc = n.value[r];
    const double* wr = &wt.data[static_cast<std::size_t>(r) * wt.shape[1]];
    for (int k = 0; k < wt.shape[1]; ++k) acc += wr[k] * xt[k];
    n.value[r] = act_apply(act, acc);
  }
  return push(std::move(n));
}

int Tape::conv2d(int input, int kernels, int bias, int stride) {
  Node n;
  n.op = Op::Conv2d;
  n.a = input; n.b = kernels; n.c = bias;
  n.i0 = stride;
  n.value = nn::conv2d(val(input), val(kernels), stride, val(bias));
  return push(std::move(n));
}

int Tape::global_avg_pool(int input) {
  Node n;
  n.op = Op::Gap;
  n.a = input;
  Tensor pooled = nn::global_avg_pool(val(input));
  n.value = Tensor({pooled.shape[2]}, std::move(pooled.data));  // flatten 1x1xC -> C
  return push(std::move(n));
}

int Tape::tanh(int a) {
  Node n;
  n.op = Op::Tanh;
  n.a = a;
  n.value = val(a);
  for (double& v : n.value.data) v = std::tanh(v);
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  require(val(a).same_shape(val(b)), "mul: shape mismatch");
  Node n;
  n.op = Op::Mul;
  n.a = a; n.b = b;
  n.value = val(a);
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data[i] *= val(b)[i];
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  require(val(a).same_shape(val(b)), "add: shape mismatch");
  Node n;
  n.op = Op::Add;
  n.a = a; n.b = b;
  n.value = val(a);
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data[i] += val(b)[i];
  return push(std::move(n));
}

int Tape::concat(const std::vector<int>& parts) {
  require(!parts.empty(), "concat: empty part list");
  Node n;
  n.op = Op::Concat;
  n.list = parts;
  std::vector<double> data;
  for (int p : parts) data.insert(data.end(), val(p).data.begin(), val(p).data.end());
  n.value = Tensor::vec(std::move(data));
  return push(std::move(n));
}

int Tape::pack_cue(int vr_node, double conf, double appear, const std::array<double, 4>& box) {
  require(val(vr_node).size() == 8, "pack_cue: response embedding must have 8 entries");
  Node n;
  n.op = Op::PackCue;
  n.a = vr_node;
  n.aux = {conf, appear, box[0], box[1], box[2], box[3]};
  std::vector<double> data(14);
  data[0] = conf;
  for (int i = 0; i < 8; ++i) data[1 + i] = val(vr_node)[i];
  data[9] = appear;
  for (int i = 0; i < 4; ++i) data[10 + i] = box[i];
  n.value = Tensor::vec(std::move(data));
  return push(std::move(n));
}

int Tape::softmax_xent(int logits, int label) {
  Node n;
  n.op = Op::SoftmaxXent;
  n.a = logits;
  n.i0 = label;
  auto [loss, grad] = nn::softmax_xent(val(logits), label);
  (void)grad;
  n.cache = nn::softmax(val(logits));
  n.value = Tensor({1}, {loss});
  return push(std::move(n));
}

void Tape::backward(int node, double seed) {
  require(node >= 0 && node < size(), "backward: bad node id");
  for (Tensor& g : grads_) g = Tensor();
  Tensor& s = grad_slot(node);
  for (double& v : s.data) v = seed;
  for (int id = node; id >= 0; --id) {
    if (grads_[id].data.empty()) continue;
    backward_node(id);
  }
}

void Tape::backward_node(int id) {
  const Node& n = nodes_[id];
  const Tensor& g = grads_[id];
  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::GateAffine: {
      const Tensor& wt = val(n.a);
      const Tensor& xt = val(n.b);
      const Tensor& ut = val(n.c);
      const Tensor& ht = val(n.d);
      const Act act = static_cast<Act>(n.i0);
      const int rows = wt.shape[0];
      const int xin = wt.shape[1];
      const int hin = ut.shape[1];
      Tensor& gw = grad_slot(n.a);
      Tensor& gx = grad_slot(n.b);
      Tensor& gu = grad_slot(n.c);
      Tensor& gh = grad_slot(n.d);
      Tensor& gb = grad_slot(n.e);
      for (int r = 0; r < rows; ++r) {
        const double da = g[r] * act_deriv_from_out(act, n.value[r]);
        if (da == 0.0) continue;
        gb[r] += da;
        double* gwr = &gw.data[static_cast<std::size_t>(r) * xin];
        const double* wr = &wt.data[static_cast<std::size_t>(r) * xin];
        for (int k = 0; k < xin; ++k) {
          gwr[k] += da * xt[k];
          gx[k] += da * wr[k];
        }
        double* gur = &gu.data[static_cast<std::size_t>(r) * hin];
        const double* ur = &ut.data[static_cast<std::size_t>(r) * hin];
        for (int k = 0; k < hin; ++k) {
          gur[k] += da * ht[k];
          gh[k] += da * ur[k];
        }
      }
      break;
    }
    case Op::Dense: {
      const Tensor& wt = val(n.a);
      const Tensor& xt = val(n.b);
      const Act act = static_cast<Act>(n.i0);
      const int rows = wt.shape[0];
      const int cols = wt.shape[1];
      Tensor& gw = grad_slot(n.a);
      Tensor& gx = grad_slot(n.b);
      Tensor& gb = grad_slot(n.c);
      for (int r = 0; r < rows; ++r) {
        const double da = g[r] * act_deriv_from_out(act, n.value[r]);
        if (da == 0.0) continue;
        gb[r] += da;
        double* gwr = &gw.data[static_cast<std::size_t>(r) * cols];
        const double* wr = &wt.data[static_cast<std::size_t>(r) * cols];
        for (int k = 0; k < cols; ++k) {
          gwr[k] += da * xt[k];
          gx[k] += da * wr[k];
        }
      }
      break;
    }
    case Op::Conv2d: {
      const Tensor& in = val(n.a);
      const Tensor& kn = val(n.b);
      const int stride = n.i0;
      const int w = in.shape[1], c = in.shape[2];
      const int kh = kn.shape[0], kw = kn.shape[1], oc = kn.shape[3];
      const int oh = n.value.shape[0], ow = n.value.shape[1];
      Tensor& gin = grad_slot(n.a);
      Tensor& gkn = grad_slot(n.b);
      Tensor& gbias = grad_slot(n.c);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          for (int k = 0; k < oc; ++k) {
            const double go = g.at(oy, ox, k);
            if (go == 0.0) continue;
            gbias[k] += go;
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const std::size_t ibase =
                    (static_cast<std::size_t>(oy * stride + ky) * w + (ox * stride + kx)) * c;
                const std::size_t kbase = (static_cast<std::size_t>(ky) * kw + kx) * c;
                for (int ci = 0; ci < c; ++ci) {
                  gkn.data[(kbase + ci) * oc + k] += go * in.data[ibase + ci];
                  gin.data[ibase + ci] += go * kn.data[(kbase + ci) * oc + k];
                }
              }
            }
          }
        }
      }
      break;
    }
    case Op::Gap: {
      const Tensor& in = val(n.a);
      const int h = in.shape[0], w = in.shape[1], c = in.shape[2];
      const double inv = 1.0 / (static_cast<double>(h) * w);
      Tensor& gin = grad_slot(n.a);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int k = 0; k < c; ++k) gin.at(y, x, k) += g[k] * inv;
      break;
    }
    case Op::Tanh: {
      Tensor& ga = grad_slot(n.a);
      for (std::size_t i = 0; i < g.size(); ++i)
        ga.data[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
      break;
    }
    case Op::Mul: {
      const Tensor& av = val(n.a);
      const Tensor& bv = val(n.b);
      Tensor& ga = grad_slot(n.a);
      Tensor& gb = grad_slot(n.b);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga.data[i] += g[i] * bv[i];
        gb.data[i] += g[i] * av[i];
      }
      break;
    }
    case Op::Add: {
      Tensor& ga = grad_slot(n.a);
      Tensor& gb = grad_slot(n.b);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga.data[i] += g[i];
        gb.data[i] += g[i];
      }
      break;
    }
    case Op::Concat: {
      std::size_t off = 0;
      for (int p : n.list) {
        Tensor& gp = grad_slot(p);
        for (std::size_t i = 0; i < gp.size(); ++i) gp.data[i] += g[off + i];
        off += gp.size();
      }
      break;
    }
    case Op::PackCue: {
      Tensor& gvr = grad_slot(n.a);
      for (int i = 0; i < 8; ++i) gvr[i] += g[1 + i];
      break;
    }
    case Op::SoftmaxXent: {
      Tensor& gl = grad_slot(n.a);
      for (std::size_t i = 0; i < gl.size(); ++i)
        gl.data[i] += g[0] * (n.cache[i] - (static_cast<int>(i) == n.i0 ? 1.0 : 0.0));
      break;
    }
  }
}

std::pair<int, int> lstm_cell(Tape& t, int x, int h_prev, int c_prev, const TapeLstmParams& p) {
  const int f = t.gate_affine(p.w_f, x, p.u_f, h_prev, p.b_f, Tape::Act::Sigmoid);
  const int i = t.gate_affine(p.w_i, x, p.u_i, h_prev, p.b_i, Tape::Act::Sigmoid);
  const int o = t.gate_affine(p.w_o, x, p.u_o, h_prev, p.b_o, Tape::Act::Sigmoid);
  const int gc = t.gate_affine(p.w_c, x, p.u_c, h_prev, p.b_c, Tape::Act::Tanh);
  const int c = t.add(t.mul(f, c_prev), t.mul(i, gc));
  const int h = t.mul(o, t.tanh(c));
  return {h, c};
}

double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& params,
                  const std::vector<Tensor>& analytic, double epsilon, int max_coords,
                  std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("grad_check: epsilon must be positive");
  if (params.size() != analytic.size())
    throw std::invalid_argument("grad_check: parameter/gradient list mismatch");
  Rng rng(seed);
  double max_rel = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& t = *params[pi];
    if (!t.same_shape(analytic[pi]))
      throw std::invalid_argument("grad_check: gradient shape mismatch");
    std::vector<std::size_t> coords;
    if (max_coords < 0 || static_cast<std::size_t>(max_coords) >= t.size()) {
      coords.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) coords[i] = i;
    } else {
      for (int i = 0; i < max_coords; ++i) coords.push_back(rng.uniform_index(t.size()));
    }
    for (std::size_t ci : coords) {
      const double orig = t.data[ci];
      t.data[ci] = orig + epsilon;
      const double lp = loss();
      t.data[ci] = orig - epsilon;
      const double lm = loss();
      t.data[ci] = orig;
      if (!std::isfinite(lp) || !std::isfinite(lm))
        throw std::runtime_error("grad_check: non-finite loss");
      const double numeric = (lp - lm) / (2.0 * epsilon);
      const double analytic_v = analytic[pi].data[ci];
      const double denom = std::max({std::abs(numeric), std::abs(analytic_v), 1e-8});
      max_rel = std::max(max_rel, std::abs(numeric - analytic_v) / denom);
    }
  }
  return max_rel;
}

}  // namespace ltmu::ad
