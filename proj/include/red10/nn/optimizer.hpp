#ifndef RED10_NN_OPTIMIZER_HPP_
#define RED10_NN_OPTIMIZER_HPP_

#include <cmath>
#include <cstdint>

#include "red10/nn/net.hpp"

namespace red10::nn {

enum class Direction { kDescend, kAscend };

struct RmsConfig {
  double decay = 0.99;
  double epsilon = 1e-5;
  double clip_norm = 1.0;
};

// Parameters plus optimizer state. Single writer; readers copy snapshots.
template <typename Scalar>
struct Store {
  Params<Scalar> params;
  Params<Scalar> square_avg;
  std::uint64_t version = 0;

  Store() = default;
  explicit Store(Params<Scalar> p) : params(std::move(p)), square_avg(params.zeros_like()) {}

  void reset_optimizer() { square_avg = params.zeros_like(); }
};
using ParamStore = Store<float>;

// Clips the gradient to a global norm, then scales each entry by the root of
// its running squared-gradient average. Ascend flips the sign.
template <typename Scalar>
void optimize_step(Store<Scalar>& store, Params<Scalar> grads, double rate, Direction direction,
                   const RmsConfig& cfg = {}) {
  const double norm = std::sqrt(static_cast<double>(grads.squared_norm()));
  if (norm > cfg.clip_norm) grads *= static_cast<Scalar>(cfg.clip_norm / norm);
  const Scalar decay = static_cast<Scalar>(cfg.decay);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);
  const Scalar step = static_cast<Scalar>(direction == Direction::kDescend ? -rate : rate);
  for (std::size_t i = 0; i < grads.tensors.size(); ++i) {
    auto& sq = store.square_avg.tensors[i];
    const auto& g = grads.tensors[i];
    sq = decay * sq + (Scalar(1) - decay) * g.cwiseAbs2();
    store.params.tensors[i].array() += step * g.array() / (sq.array().sqrt() + eps);
  }
  ++store.version;
}

}  // namespace red10::nn

#endif  // RED10_NN_OPTIMIZER_HPP_
