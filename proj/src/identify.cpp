#include "red10/identify.hpp"

namespace red10 {
namespace {

nn::NetSpec identify_spec(int lstm_hidden, int width, int outputs) {
  nn::NetSpec spec;
  spec.history_steps = kHistoryRows;
  spec.history_width = kHistoryRowWidth;
  spec.flat_width = kIdentifyStateWidth;
  spec.lstm_hidden = lstm_hidden;
  spec.layers = {width, width, width, width, width, outputs};
  spec.output = nn::OutputActivation::kSigmoid;
  return spec;
}

nn::Batch<float> single(const IdentifyFeatures& f) {
  nn::Batch<float> b;
  for (int k = 0; k < kHistoryRows; ++k) b.history.emplace_back(f.history.col(k));
  b.flat = f.state;
  return b;
}

}  // namespace

nn::NetSpec default_relation_spec(int lstm_hidden, int width) {
  return identify_spec(lstm_hidden, width, 3);
}
nn::NetSpec default_danger_spec(int lstm_hidden, int width) {
  return identify_spec(lstm_hidden, width, 1);
}

IdentifyNets IdentifyNets::init(const nn::NetSpec& relation, const nn::NetSpec& danger,
                                std::uint64_t seed) {
  return {nn::init<float>(relation, mix_seed(seed, 100)), nn::init<float>(danger, mix_seed(seed, 101))};
}

ConfidenceVector relation_forward(const nn::Params<float>& relation, const IdentifyFeatures& f) {
  return nn::forward(relation, single(f)).col(0);
}

float danger_forward(const nn::Params<float>& danger, const IdentifyFeatures& f) {
  return nn::forward(danger, single(f))(0, 0);
}

TeamMask decide_mask(const ConfidenceVector& c, float d) {
  return {c[0] > d, c[1] > d, c[2] > d};
}

IdentificationTargets make_targets(const GameState& final_state, int seat) {
  IdentificationTargets out;
  const TeamMask truth = ground_truth_mask(final_state.layout, seat);
  out.target_r = {truth.up ? 1.0F : 0.0F, truth.front ? 1.0F : 0.0F, truth.down ? 1.0F : 0.0F};
  const int total = final_state.t();
  for (int t = 0; t < total; ++t) {
    if (final_state.history[t].seat != seat) continue;
    out.turns.push_back(t);
    out.target_d.push_back(static_cast<float>(t) / static_cast<float>(total));
  }
  return out;
}

std::vector<IdentifySample> identify_samples(const GameState& final_state) {
  std::array<IdentificationTargets, kNumSeats> targets;
  for (int s = 0; s < kNumSeats; ++s) targets[s] = make_targets(final_state, s);
  std::array<std::size_t, kNumSeats> next{};
  std::vector<IdentifySample> out;
  out.reserve(final_state.history.size());
  GameState replay = rewind(final_state);
  for (const Turn& turn : final_state.history) {
    const int s = turn.seat;
    IdentifySample sample;
    sample.features = build_identify_features(replay, s);
    sample.target_r = targets[s].target_r;
    sample.target_d = targets[s].target_d[next[s]++];
    out.push_back(std::move(sample));
    replay = step(replay, turn.move);
  }
  return out;
}

RdBatch<float> make_rd_batch(std::span<const IdentifySample> samples) {
  const auto b = static_cast<Eigen::Index>(samples.size());
  RdBatch<float> out;
  out.inputs.history.assign(kHistoryRows, nn::Matrix<float>(kHistoryRowWidth, b));
  out.inputs.flat.resize(kIdentifyStateWidth, b);
  out.target_r.resize(3, b);
  out.target_d.resize(1, b);
  out.head_values.resize(kNumMasks, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const IdentifySample& s = samples[i];
    for (int k = 0; k < kHistoryRows; ++k) out.inputs.history[k].col(i) = s.features.history.col(k);
    out.inputs.flat.col(i) = s.features.state;
    out.target_r.col(i) = s.target_r;
    out.target_d(0, i) = s.target_d;
    out.head_values.col(i) = s.head_values;
  }
  return out;
}

}  // namespace red10
