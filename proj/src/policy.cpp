#include "red10/policy.hpp"

#include <map>

namespace red10 {

void RLConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(gamma >= 0 && gamma <= 1, "gamma must be in [0,1]");
  require(gamma_cooperative >= 0 && gamma_cooperative <= 1, "gamma_cooperative must be in [0,1]");
  require(epsilon >= 0 && epsilon <= 1, "epsilon must be in [0,1]");
  require(learning_rate > 0, "learning_rate must be > 0");
  require(flush_size > 0, "flush_size must be > 0");
  require(batch_size >= flush_size, "batch_size must be >= flush_size");
  require(lambda >= 0, "lambda must be >= 0");
  require(temperature > 0, "temperature must be > 0");
  require(!constant_risk || (*constant_risk >= 0 && *constant_risk <= 1),
          "constant_risk must be in [0,1]");
}

nn::NetSpec default_q_spec(int lstm_hidden, int width) {
  nn::NetSpec spec;
  spec.history_steps = kHistoryRows;
  spec.history_width = kHistoryRowWidth;
  spec.flat_width = kQFlatWidth;
  spec.lstm_hidden = lstm_hidden;
  spec.layers = {width, width, width, width, width, 1};
  spec.output = nn::OutputActivation::kIdentity;
  return spec;
}

PolicyBank PolicyBank::init(const nn::NetSpec& spec, std::uint64_t seed) {
  PolicyBank bank;
  for (int m = 0; m < kNumMasks; ++m) bank.heads[m] = nn::init<float>(spec, mix_seed(seed, m));
  return bank;
}

PolicyBank PolicyBank::zeros(const nn::NetSpec& spec) {
  PolicyBank bank;
  for (auto& h : bank.heads) h = nn::Params<float>::zeros(spec);
  return bank;
}

void mc_returns(Trajectory& trajectory, double gamma) {
  if (!trajectory.complete) throw IncompleteTrajectory("trajectory has not reached a terminal state");
  auto& steps = trajectory.steps;
  const int n = static_cast<int>(steps.size());
  double g = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    g = steps[t].reward + gamma * g;
    steps[t].ret = g;
    steps[t].t = t;
    steps[t].T = n;
  }
}

Eigen::VectorXf q_values(const nn::Params<float>& net, const GameState& state, int seat,
                         const std::vector<Move>& moves) {
  return q_values(net, build_q_state(state, seat), moves);
}

Eigen::VectorXf q_values(const nn::Params<float>& net, const QStateFeatures& s,
                         const std::vector<Move>& moves) {
  // Moves differing only in suits encode identically.
  std::map<RankCounts, int> unique;
  std::vector<int> slot(moves.size());
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto key = moves[i].cards().rank_counts();
    const auto [it, inserted] = unique.emplace(key, static_cast<int>(unique.size()));
    slot[i] = it->second;
  }
  nn::Matrix<float> flat(kQFlatWidth, static_cast<Eigen::Index>(unique.size()));
  for (std::size_t i = 0; i < moves.size(); ++i) {
    auto col = flat.col(slot[i]);
    encode_cards_into(moves[i].cards(), col.head(kCardBlock));
    col.tail(kQStateWidth) = s.state;
  }
  std::vector<nn::Matrix<float>> history;
  for (int k = 0; k < kHistoryRows; ++k) history.emplace_back(s.history.col(k));
  const nn::Matrix<float> q = nn::infer_shared_history(net, history, flat);
  Eigen::VectorXf out(moves.size());
  for (std::size_t i = 0; i < moves.size(); ++i) out[i] = q(0, slot[i]);
  return out;
}

std::size_t greedy_index(const Eigen::VectorXf& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<std::size_t>(i);
  }
  return best;
}

std::size_t select_action(const nn::Params<float>& net, const GameState& state, int seat,
                          const std::vector<Move>& moves, double epsilon, Rng& rng) {
  const double u = uniform01(rng);
  if (u < epsilon) return uniform_index(rng, moves.size());
  if (moves.size() == 1) return 0;
  return greedy_index(q_values(net, state, seat, moves));
}

std::size_t select_action(const nn::Params<float>& net, const QStateFeatures& state,
                          const std::vector<Move>& moves, double epsilon, Rng& rng) {
  const double u = uniform01(rng);
  if (u < epsilon) return uniform_index(rng, moves.size());
  if (moves.size() == 1) return 0;
  return greedy_index(q_values(net, state, moves));
}

nn::Batch<float> make_q_batch(std::span<const Transition> batch) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  nn::Batch<float> out;
  out.history.assign(kHistoryRows, nn::Matrix<float>(kHistoryRowWidth, b));
  out.flat.resize(kQFlatWidth, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Transition& tr = batch[i];
    for (int k = 0; k < kHistoryRows; ++k) out.history[k].col(i) = tr.history.col(k);
    out.flat.col(i).head(kCardBlock) = tr.action;
    out.flat.col(i).tail(kQStateWidth) = tr.state;
  }
  return out;
}

float learner_update(nn::ParamStore& net, std::span<const Transition> batch, double rate) {
  const nn::Batch<float> in = make_q_batch(batch);
  nn::ForwardCache<float> cache;
  const nn::Matrix<float> q = nn::forward(net.params, in, &cache);
  nn::Matrix<float> target(1, q.cols());
  for (Eigen::Index i = 0; i < q.cols(); ++i) target(0, i) = static_cast<float>(batch[i].ret);
  const nn::Matrix<float> err = q - target;
  const float loss = err.squaredNorm() / static_cast<float>(q.cols());
  const nn::Matrix<float> grad = err * (2.0F / static_cast<float>(q.cols()));
  nn::optimize_step(net, nn::backward(net.params, cache, grad), rate, nn::Direction::kDescend);
  return loss;
}

float terminal_reward(const GameState& final_state, int seat) {
  return final_state.winner == final_state.layout.team_of(seat) ? 1.0F : -1.0F;
}

}  // namespace red10
