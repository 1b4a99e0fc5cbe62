#ifndef RED10_POLICY_HPP_
#define RED10_POLICY_HPP_

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "red10/features.hpp"
#include "red10/nn/optimizer.hpp"

namespace red10 {

struct RLConfig {
  double gamma = 1.0;               // competitive masks
  double gamma_cooperative = 0.99;  // the all-cooperative mask (1,1,1)
  double epsilon = 0.05;
  double learning_rate = 1e-4;
  int flush_size = 128;    // BS: actor flush threshold, in transitions
  int batch_size = 1024;   // M: learner batch, in transitions
  double lambda = 1.0;     // intrinsic-reward weight on the identification loss
  double temperature = 0.1;
  std::optional<double> constant_risk;

  void validate() const;
};

nn::NetSpec default_q_spec(int lstm_hidden = 128, int width = 512);

// One Q network per relative cooperation mask, indexed by TeamMask::index().
struct PolicyBank {
  std::array<nn::Params<float>, kNumMasks> heads;

  static PolicyBank init(const nn::NetSpec& spec, std::uint64_t seed);
  static PolicyBank zeros(const nn::NetSpec& spec);
  const nn::Params<float>& head(TeamMask m) const { return heads[m.index()]; }
};

struct Transition {
  Eigen::VectorXf state;   // 507
  HistoryWindow history;   // 208 x 5
  Eigen::VectorXf action;  // 52
  double reward = 0.0;
  double ret = 0.0;  // G, kept in double
  TeamMask mask;
  int seat = 0;
  int t = 0;  // index in the seat's trajectory
  int T = 0;  // trajectory length
};

struct Trajectory {
  std::vector<Transition> steps;
  bool complete = false;
};

class IncompleteTrajectory : public std::logic_error {
 public:
  explicit IncompleteTrajectory(const std::string& what) : std::logic_error(what) {}
};

// G^t = r^t + gamma * G^{t+1}, with G^T = 0. Also stamps t and T.
void mc_returns(Trajectory& trajectory, double gamma);

// Q(s, a) for every move. Moves with the same action encoding share one
// evaluation.
Eigen::VectorXf q_values(const nn::Params<float>& net, const GameState& state, int seat,
                         const std::vector<Move>& moves);
Eigen::VectorXf q_values(const nn::Params<float>& net, const QStateFeatures& state,
                         const std::vector<Move>& moves);

// Index of the first maximum.
std::size_t greedy_index(const Eigen::VectorXf& values);

// With probability epsilon a uniform move, otherwise the first move with the
// highest value. Returns an index into `moves`.
std::size_t select_action(const nn::Params<float>& net, const GameState& state, int seat,
                          const std::vector<Move>& moves, double epsilon, Rng& rng);
std::size_t select_action(const nn::Params<float>& net, const QStateFeatures& state,
                          const std::vector<Move>& moves, double epsilon, Rng& rng);

// Stacks transitions into a network batch ([action; state] flat input).
nn::Batch<float> make_q_batch(std::span<const Transition> batch);

// One MSE regression step of Q(s, a) towards G. Returns the pre-step loss.
float learner_update(nn::ParamStore& net, std::span<const Transition> batch, double rate);

// Terminal reward of a seat: +1 win, -1 loss.
float terminal_reward(const GameState& final_state, int seat);

}  // namespace red10

#endif  // RED10_POLICY_HPP_
