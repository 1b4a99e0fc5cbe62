#include <gtest/gtest.h>

#include "oracles.hpp"
#include "red10/policy.hpp"

namespace red10 {
namespace {

nn::NetSpec tiny_q(int hidden = 4, int width = 8) { return default_q_spec(hidden, width); }

Trajectory with_rewards(const std::vector<double>& r) {
  Trajectory tr;
  for (double v : r) {
    Transition t;
    t.reward = static_cast<float>(v);
    tr.steps.push_back(t);
  }
  tr.complete = true;
  return tr;
}

TEST(MonteCarlo, TerminalOnlyGammaOne) {
  Trajectory tr = with_rewards({0, 0, 0, 0, 1});
  mc_returns(tr, 1.0);
  for (int t = 0; t < 5; ++t) {
    EXPECT_FLOAT_EQ(tr.steps[t].ret, 1.0F);
    EXPECT_EQ(tr.steps[t].t, t);
    EXPECT_EQ(tr.steps[t].T, 5);
  }
}

TEST(MonteCarlo, HalfDiscount) {
  Trajectory tr = with_rewards({0, 0, 1});
  mc_returns(tr, 0.5);
  EXPECT_FLOAT_EQ(tr.steps[0].ret, 0.25F);
  EXPECT_FLOAT_EQ(tr.steps[1].ret, 0.5F);
  EXPECT_FLOAT_EQ(tr.steps[2].ret, 1.0F);
}

TEST(MonteCarlo, ForwardSumOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 40));
    const double gamma = uniform01(rng);
    std::vector<double> r(n);
    for (double& v : r) v = std::round((uniform01(rng) * 2 - 1) * 64) / 64;  // exact in float
    Trajectory tr = with_rewards(r);
    mc_returns(tr, gamma);
    for (int t = 0; t < n; ++t) {
      double g = 0.0;
      for (int k = t; k < n; ++k) g += std::pow(gamma, k - t) * r[k];
      EXPECT_NEAR(tr.steps[t].ret, g, 1e-9);
    }
  }
}

TEST(MonteCarlo, Incomplete) {
  Trajectory tr = with_rewards({1});
  tr.complete = false;
  EXPECT_THROW(mc_returns(tr, 1.0), IncompleteTrajectory);
}

TEST(QValues, ZeroNetAndPurity) {
  const GameState s = deal(2);
  const auto moves = s.legal();
  const auto zero = nn::Params<float>::zeros(tiny_q());
  EXPECT_TRUE(q_values(zero, s, 0, moves).isZero(0));

  const auto net = nn::init<float>(tiny_q(), 5);
  const Eigen::VectorXf q = q_values(net, s, 0, moves);
  ASSERT_EQ(q.size(), static_cast<Eigen::Index>(moves.size()));
  EXPECT_TRUE(q.allFinite());
  const std::vector<Move> twice = {moves[3], moves[3]};
  const Eigen::VectorXf q2 = q_values(net, s, 0, twice);
  EXPECT_EQ(q2[0], q2[1]);
  EXPECT_EQ(q_values(net, s, 0, {moves[0]}).size(), 1);
}

TEST(QValues, MatchesPerMoveForward) {
  const GameState s = testing::random_midgame(7, 9);
  const auto moves = s.legal();
  const auto net = nn::init<float>(tiny_q(), 6);
  const Eigen::VectorXf q = q_values(net, s, s.turn, moves);
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const QFeatures f = build_q_features(s, s.turn, moves[i]);
    nn::Batch<float> b;
    for (int k = 0; k < kHistoryRows; ++k) b.history.emplace_back(f.history.col(k));
    b.flat = f.flat();
    EXPECT_NEAR(nn::forward(net, b)(0, 0), q[i], 1e-5);
  }
}

TEST(SelectAction, GreedyAndTieBreak) {
  const GameState s = deal(4);
  const auto moves = s.legal();
  Rng rng(1);
  // A zero net values everything equally: the first move wins.
  const auto zero = nn::Params<float>::zeros(tiny_q());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_action(zero, s, 0, moves, 0.0, rng), 0U);

  const auto net = nn::init<float>(tiny_q(), 8);
  const std::size_t best = greedy_index(q_values(net, s, 0, moves));
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_action(net, s, 0, moves, 0.0, rng), best);
  EXPECT_EQ(greedy_index(Eigen::Vector3f(1, 2, 2)), 1U);
}

TEST(SelectAction, UniformAtEpsilonOne) {
  const GameState s = deal(4);
  std::vector<Move> moves = s.legal();
  moves.resize(3);
  const auto net = nn::init<float>(tiny_q(), 8);
  Rng rng(17);
  std::array<int, 3> hits{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++hits[select_action(net, s, 0, moves, 1.0, rng)];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / n, 1.0 / 3.0, 0.02);
}

TEST(SelectAction, ArgmaxInvariantUnderBiasShift) {
  const auto net = nn::init<float>(tiny_q(), 12);
  auto shifted = net;
  shifted.tensors[nn::Params<float>::bias_index(5)](0, 0) += 3.5F;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GameState s = testing::random_midgame(seed, 6);
    const auto moves = s.legal();
    Rng r1(seed), r2(seed);
    EXPECT_EQ(select_action(net, s, s.turn, moves, 0.0, r1),
              select_action(shifted, s, s.turn, moves, 0.0, r2));
  }
}

std::vector<Transition> sample_transitions(int n, std::uint64_t seed, float target) {
  std::vector<Transition> out;
  for (int i = 0; out.size() < static_cast<std::size_t>(n); ++i) {
    const GameState s = testing::random_midgame(seed + i, i % 15);
    const QStateFeatures f = build_q_state(s, s.turn);
    Transition t;
    t.state = f.state;
    t.history = f.history;
    t.action = encode_cards(s.legal().front().cards());
    t.ret = target;
    out.push_back(t);
  }
  return out;
}

TEST(Learner, LossMatchesTwoPassMse) {
  nn::ParamStore store(nn::init<float>(tiny_q(), 3));
  auto batch = sample_transitions(16, 100, 0.0F);
  Rng rng(4);
  for (auto& t : batch) t.ret = static_cast<float>(uniform01(rng) * 2 - 1);
  // Reference: evaluate each sample separately, then average.
  double sum = 0.0;
  for (const Transition& t : batch) {
    nn::Batch<float> b;
    for (int k = 0; k < kHistoryRows; ++k) b.history.emplace_back(t.history.col(k));
    b.flat.resize(kQFlatWidth, 1);
    b.flat.col(0) << t.action, t.state;
    const double q = nn::forward(store.params, b)(0, 0);
    sum += (q - t.ret) * (q - t.ret);
  }
  const double expected = sum / static_cast<double>(batch.size());
  const float loss = learner_update(store, batch, 1e-3);
  EXPECT_NEAR(loss, expected, 1e-6);
  EXPECT_EQ(store.version, 1U);
}

TEST(Learner, ExactFitLeavesParamsUnchanged) {
  nn::ParamStore store(nn::Params<float>::zeros(tiny_q()));
  const auto batch = sample_transitions(8, 3, 0.0F);
  const auto before = store.params;
  EXPECT_FLOAT_EQ(learner_update(store, batch, 1e-2), 0.0F);
  for (std::size_t i = 0; i < before.tensors.size(); ++i) EXPECT_EQ(before.tensors[i], store.params.tensors[i]);
}

TEST(Learner, ConstantTargetConverges) {
  nn::ParamStore store(nn::init<float>(tiny_q(), 9));
  const auto batch = sample_transitions(32, 50, 0.7F);
  float loss = 0.0F;
  for (int i = 0; i < 500; ++i) loss = learner_update(store, batch, 1e-3);
  EXPECT_LT(loss, 1e-3F);
}

TEST(Config, Validation) {
  RLConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epsilon = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RLConfig{};
  c.temperature = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RLConfig{};
  c.lambda = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Rewards, TerminalRewardByTeam) {
  GameState s = testing::random_midgame(1, 500);
  Rng rng(1);
  while (!s.terminal()) {
    const auto moves = s.legal();
    s = step(s, moves[uniform_index(rng, moves.size())]);
  }
  int sum = 0;
  for (int seat = 0; seat < 4; ++seat) {
    const float r = terminal_reward(s, seat);
    EXPECT_EQ(r, s.layout.team_of(seat) == *s.winner ? 1.0F : -1.0F);
    sum += static_cast<int>(r);
  }
  EXPECT_NE(sum, 4);  // a real deal always has two teams
}

}  // namespace
}  // namespace red10
