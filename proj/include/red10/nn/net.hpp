#ifndef RED10_NN_NET_HPP_
#define RED10_NN_NET_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "red10/random.hpp"

namespace red10::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class OutputActivation { kIdentity, kSigmoid };
enum class HiddenActivation { kReLU, kTanh };

class ShapeMismatch : public std::invalid_argument {
 public:
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// A recurrent history encoder feeding a perceptron. The encoder reads
// `history_steps` inputs of `history_width`; its final hidden state is
// concatenated in front of the flat features.
struct NetSpec {
  int history_steps = 5;
  int history_width = 208;
  int flat_width = 0;
  int lstm_hidden = 128;
  std::vector<int> layers;  // perceptron widths, last is the output width
  OutputActivation output = OutputActivation::kIdentity;
  HiddenActivation hidden = HiddenActivation::kReLU;

  int output_width() const { return layers.empty() ? 0 : layers.back(); }
  int mlp_input() const { return lstm_hidden + flat_width; }
  void validate() const;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

// Tensor order: lstm.w_input (4H x in), lstm.w_recurrent (4H x H),
// lstm.bias (4H x 1), then mlp.k.weight / mlp.k.bias per layer. LSTM gate
// rows are stacked input, forget, cell, output.
template <typename Scalar>
struct Params {
  NetSpec spec;
  std::vector<std::string> names;
  std::vector<Matrix<Scalar>> tensors;

  static constexpr int kInput = 0;
  static constexpr int kRecurrent = 1;
  static constexpr int kLstmBias = 2;
  static constexpr int weight_index(int layer) { return 3 + 2 * layer; }
  static constexpr int bias_index(int layer) { return 4 + 2 * layer; }

  int num_layers() const { return static_cast<int>(spec.layers.size()); }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += static_cast<std::size_t>(t.size());
    return n;
  }

  // Zero-valued parameters shaped by `spec`.
  static Params zeros(const NetSpec& spec) {
    spec.validate();
    Params p;
    p.spec = spec;
    const int h = spec.lstm_hidden;
    p.add("lstm.w_input", 4 * h, spec.history_width);
    p.add("lstm.w_recurrent", 4 * h, h);
    p.add("lstm.bias", 4 * h, 1);
    int in = spec.mlp_input();
    for (int k = 0; k < static_cast<int>(spec.layers.size()); ++k) {
      p.add("mlp." + std::to_string(k) + ".weight", spec.layers[k], in);
      p.add("mlp." + std::to_string(k) + ".bias", spec.layers[k], 1);
      in = spec.layers[k];
    }
    return p;
  }

  Params zeros_like() const { return zeros(spec); }

  template <typename Other>
  Params<Other> cast() const {
    Params<Other> out;
    out.spec = spec;
    out.names = names;
    for (const auto& t : tensors) out.tensors.push_back(t.template cast<Other>());
    return out;
  }

  Params& operator+=(const Params& o) {
    for (std::size_t i = 0; i < tensors.size(); ++i) tensors[i] += o.tensors[i];
    return *this;
  }
  Params& operator*=(Scalar s) {
    for (auto& t : tensors) t *= s;
    return *this;
  }
  Scalar squared_norm() const {
    Scalar n = 0;
    for (const auto& t : tensors) n += t.squaredNorm();
    return n;
  }
  Scalar dot(const Params& o) const {
    Scalar d = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i) d += tensors[i].cwiseProduct(o.tensors[i]).sum();
    return d;
  }
  bool is_zero() const {
    for (const auto& t : tensors) {
      if (!t.isZero(0)) return false;
    }
    return true;
  }

 private:
  void add(std::string name, int rows, int cols) {
    names.push_back(std::move(name));
    tensors.push_back(Matrix<Scalar>::Zero(rows, cols));
  }
};

// Weights uniform in (-k, k), k = 1/sqrt(fan_in); biases zero.
template <typename Scalar>
Params<Scalar> init(const NetSpec& spec, std::uint64_t seed) {
  Params<Scalar> p = Params<Scalar>::zeros(spec);
  Rng rng(seed);
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    const bool is_bias = p.tensors[i].cols() == 1 &&
                         (static_cast<int>(i) == Params<Scalar>::kLstmBias ||
                          (i >= 3 && (i - 3) % 2 == 1));
    if (is_bias) continue;
    auto& w = p.tensors[i];
    const double k = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        w(r, c) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * k);
      }
    }
  }
  return p;
}

// A batch of inputs, one sample per column.
template <typename Scalar>
struct Batch {
  std::vector<Matrix<Scalar>> history;  // history_steps matrices, width x B
  Matrix<Scalar> flat;                  // flat_width x B

  Eigen::Index size() const { return flat.cols(); }
};

template <typename Scalar>
struct ForwardCache {
  std::vector<Matrix<Scalar>> inputs;  // x_t
  std::vector<Matrix<Scalar>> gates;   // activated gates per step, 4H x B
  std::vector<Matrix<Scalar>> cells;   // c_t for t = 0..T (c_0 = 0)
  std::vector<Matrix<Scalar>> hidden;  // h_t for t = 0..T
  std::vector<Matrix<Scalar>> activations;  // perceptron inputs per layer, then output
};

namespace detail {

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) { return S(1) / (S(1) + std::exp(-v)); });
}

template <typename Scalar>
void check_batch(const NetSpec& spec, const Batch<Scalar>& batch) {
  if (static_cast<int>(batch.history.size()) != spec.history_steps) {
    throw ShapeMismatch("history steps " + std::to_string(batch.history.size()) + " != " +
                        std::to_string(spec.history_steps));
  }
  for (const auto& x : batch.history) {
    if (x.rows() != spec.history_width) throw ShapeMismatch("history width mismatch");
  }
  if (batch.flat.rows() != spec.flat_width) {
    throw ShapeMismatch("flat width " + std::to_string(batch.flat.rows()) + " != " +
                        std::to_string(spec.flat_width));
  }
}

// Runs the encoder over `history`; returns h_T (H x cols).
template <typename Scalar>
Matrix<Scalar> encode(const Params<Scalar>& p, const std::vector<Matrix<Scalar>>& history,
                      ForwardCache<Scalar>* cache) {
  using P = Params<Scalar>;
  const int h = p.spec.lstm_hidden;
  const Eigen::Index b = history.front().cols();
  Matrix<Scalar> hid = Matrix<Scalar>::Zero(h, b);
  Matrix<Scalar> cell = Matrix<Scalar>::Zero(h, b);
  if (cache) {
    cache->inputs = history;
    cache->gates.clear();
    cache->cells = {cell};
    cache->hidden = {hid};
  }
  Matrix<Scalar> z(4 * h, b);
  for (const auto& x : history) {
    z.noalias() = p.tensors[P::kInput] * x;
    z.noalias() += p.tensors[P::kRecurrent] * hid;
    z.colwise() += p.tensors[P::kLstmBias].col(0);
    z.topRows(2 * h) = sigmoid(z.topRows(2 * h));
    z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    z.bottomRows(h) = sigmoid(z.bottomRows(h));
    cell = z.middleRows(h, h).cwiseProduct(cell) + z.topRows(h).cwiseProduct(z.middleRows(2 * h, h));
    hid = z.bottomRows(h).cwiseProduct(cell.array().tanh().matrix());
    if (cache) {
      cache->gates.push_back(z);
      cache->cells.push_back(cell);
      cache->hidden.push_back(hid);
    }
  }
  return hid;
}

template <typename Scalar>
Matrix<Scalar> perceptron(const Params<Scalar>& p, Matrix<Scalar> a, ForwardCache<Scalar>* cache) {
  using P = Params<Scalar>;
  const int n = p.num_layers();
  if (cache) cache->activations.clear();
  for (int k = 0; k < n; ++k) {
    if (cache) cache->activations.push_back(a);
    Matrix<Scalar> z = p.tensors[P::weight_index(k)] * a;
    z.colwise() += p.tensors[P::bias_index(k)].col(0);
    if (k + 1 < n) {
      if (p.spec.hidden == HiddenActivation::kReLU) {
        a = z.cwiseMax(Scalar(0));
      } else {
        a = z.array().tanh().matrix();
      }
    } else if (p.spec.output == OutputActivation::kSigmoid) {
      a = sigmoid(z);
    } else {
      a = std::move(z);
    }
  }
  if (cache) cache->activations.push_back(a);
  return a;
}

}  // namespace detail

// Outputs (output_width x B). Fills `cache` for a later backward pass.
template <typename Scalar>
Matrix<Scalar> forward(const Params<Scalar>& p, const Batch<Scalar>& batch,
                       ForwardCache<Scalar>* cache = nullptr) {
  detail::check_batch(p.spec, batch);
  Matrix<Scalar> h = detail::encode(p, batch.history, cache);
  Matrix<Scalar> in(p.spec.mlp_input(), batch.size());
  in << h, batch.flat;
  return detail::perceptron(p, std::move(in), cache);
}

// Inference for many flat inputs sharing one history (a single column per
// step): the encoder runs once and its state is broadcast.
template <typename Scalar>
Matrix<Scalar> infer_shared_history(const Params<Scalar>& p,
                                    const std::vector<Matrix<Scalar>>& history,
                                    const Matrix<Scalar>& flat) {
  detail::check_batch(p.spec, Batch<Scalar>{history, flat});
  if (history.front().cols() != 1) throw ShapeMismatch("shared history must be one column");
  const Matrix<Scalar> h = detail::encode<Scalar>(p, history, nullptr);
  Matrix<Scalar> in(p.spec.mlp_input(), flat.cols());
  in.topRows(p.spec.lstm_hidden) = h.col(0).replicate(1, flat.cols());
  in.bottomRows(p.spec.flat_width) = flat;
  return detail::perceptron<Scalar>(p, std::move(in), nullptr);
}

// Reverse-mode gradients of sum(output_grad .* outputs) with respect to every
// parameter, given the cache of the matching forward pass.
template <typename Scalar>
Params<Scalar> backward(const Params<Scalar>& p, const ForwardCache<Scalar>& cache,
                        const Matrix<Scalar>& output_grad) {
  using P = Params<Scalar>;
  Params<Scalar> g = p.zeros_like();
  const int n = p.num_layers();
  const auto& acts = cache.activations;
  if (static_cast<int>(acts.size()) != n + 1 || output_grad.rows() != acts.back().rows() ||
      output_grad.cols() != acts.back().cols()) {
    throw ShapeMismatch("backward: cache does not match output gradient");
  }

  // Perceptron.
  Matrix<Scalar> delta = output_grad;
  if (p.spec.output == OutputActivation::kSigmoid) {
    const auto& y = acts.back();
    delta = delta.cwiseProduct(y.cwiseProduct((Scalar(1) - y.array()).matrix()));
  }
  for (int k = n - 1; k >= 0; --k) {
    g.tensors[P::weight_index(k)].noalias() = delta * acts[k].transpose();
    g.tensors[P::bias_index(k)] = delta.rowwise().sum();
    Matrix<Scalar> prev = p.tensors[P::weight_index(k)].transpose() * delta;
    if (k > 0) {
      const auto& a = acts[k];
      if (p.spec.hidden == HiddenActivation::kReLU) {
        prev = (a.array() > Scalar(0)).select(prev, Scalar(0));
      } else {
        prev = prev.cwiseProduct((Scalar(1) - a.array().square()).matrix());
      }
    }
    delta = std::move(prev);
  }

  // Encoder, back through time.
  const int h = p.spec.lstm_hidden;
  Matrix<Scalar> dh = delta.topRows(h);
  Matrix<Scalar> dc = Matrix<Scalar>::Zero(h, dh.cols());
  Matrix<Scalar> dz(4 * h, dh.cols());
  for (int t = static_cast<int>(cache.gates.size()) - 1; t >= 0; --t) {
    const auto& z = cache.gates[t];
    const auto i = z.topRows(h).array();
    const auto f = z.middleRows(h, h).array();
    const auto gg = z.middleRows(2 * h, h).array();
    const auto o = z.bottomRows(h).array();
    const auto c = cache.cells[t + 1].array();
    const auto c_prev = cache.cells[t].array();
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> tc = c.tanh();
    const auto dha = dh.array();
    dc.array() += dha * o * (Scalar(1) - tc.square());
    dz.bottomRows(h).array() = dha * tc * o * (Scalar(1) - o);
    dz.topRows(h).array() = dc.array() * gg * i * (Scalar(1) - i);
    dz.middleRows(h, h).array() = dc.array() * c_prev * f * (Scalar(1) - f);
    dz.middleRows(2 * h, h).array() = dc.array() * i * (Scalar(1) - gg.square());
    g.tensors[P::kInput].noalias() += dz * cache.inputs[t].transpose();
    g.tensors[P::kRecurrent].noalias() += dz * cache.hidden[t].transpose();
    g.tensors[P::kLstmBias] += dz.rowwise().sum();
    dh.noalias() = p.tensors[P::kRecurrent].transpose() * dz;
    dc.array() *= f;
  }
  return g;
}

inline void NetSpec::validate() const {
  if (history_steps <= 0 || history_width <= 0 || flat_width < 0 || lstm_hidden <= 0 ||
      layers.empty()) {
    throw ShapeMismatch("invalid network spec");
  }
  for (int w : layers) {
    if (w <= 0) throw ShapeMismatch("invalid layer width");
  }
}

}  // namespace red10::nn

#endif  // RED10_NN_NET_HPP_
