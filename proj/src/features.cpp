#include "red10/features.hpp"

#include <sstream>

namespace red10 {
namespace {

// Last non-pass move of each seat.
std::array<CardSet, kNumSeats> last_plays(const std::vector<Turn>& history) {
  std::array<CardSet, kNumSeats> out{};
  std::array<bool, kNumSeats> seen{};
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->move.is_pass() || seen[it->seat]) continue;
    seen[it->seat] = true;
    out[it->seat] = it->move.cards();
  }
  return out;
}

void encode_count(int count, Eigen::Ref<Eigen::VectorXf> out) {
  out.setZero();
  if (count > 0) out[count - 1] = 1.0F;
}

// Zones shared by both encoders, written in order starting at `out`:
// own hand, others' union, [lead], up/front/down last plays, up/front/down
// histories, up/front/down hand counts.
int write_common(const GameState& s, int seat, bool with_lead, Eigen::Ref<Eigen::VectorXf> out) {
  int at = 0;
  auto block = [&](CardSet cards) {
    encode_cards_into(cards, out.segment(at, kCardBlock));
    at += kCardBlock;
  };
  const CardSet played = s.played();
  block(s.hands[seat]);
  block(s.deck - s.hands[seat] - played);
  if (with_lead) block(s.lead ? s.lead->combination.cards : CardSet());
  const auto last = last_plays(s.history);
  for (Relative r : kRelatives) block(last[seat_at(seat, r)]);
  for (Relative r : kRelatives) block(s.played_by(seat_at(seat, r)));
  for (Relative r : kRelatives) {
    encode_count(s.hands[seat_at(seat, r)].size(), out.segment(at, kCountWidth));
    at += kCountWidth;
  }
  return at;
}

}  // namespace

void encode_cards_into(CardSet cards, Eigen::Ref<Eigen::VectorXf> out) {
  out.setZero();
  for (int r = 0; r < kNumRanks; ++r) {
    const int n = cards.count(static_cast<Rank>(r));
    for (int row = 0; row < n; ++row) out[r * kNumSuits + row] = 1.0F;
  }
}

Eigen::VectorXf encode_cards(CardSet cards) {
  Eigen::VectorXf out(kCardBlock);
  encode_cards_into(cards, out);
  return out;
}

Eigen::Vector4f encode_suits10(CardSet cards) {
  const unsigned tens = cards.suits_of(Rank::k10);
  Eigen::Vector4f out;
  for (int s = 0; s < kNumSuits; ++s) out[s] = (tens >> s) & 1U ? 1.0F : 0.0F;
  return out;
}

HistoryWindow history_window(const std::vector<Turn>& history) {
  HistoryWindow window = HistoryWindow::Zero(kHistoryRowWidth, kHistoryRows);
  const int n = static_cast<int>(history.size());
  const int kept = std::min(n, kHistoryMoves);
  for (int i = 0; i < kept; ++i) {
    const int slot = kHistoryMoves - kept + i;
    const Turn& turn = history[n - kept + i];
    Eigen::VectorXf block(kCardBlock);
    encode_cards_into(turn.move.cards(), block);
    window.col(slot / 4).segment((slot % 4) * kCardBlock, kCardBlock) = block;
  }
  return window;
}

Eigen::VectorXf QFeatures::flat() const {
  Eigen::VectorXf out(kQFlatWidth);
  out << action, state;
  return out;
}

QStateFeatures build_q_state(const GameState& state, int seat) {
  QStateFeatures f;
  f.state.resize(kQStateWidth);
  write_common(state, seat, true, f.state);
  f.history = history_window(state.history);
  return f;
}

QFeatures build_q_features(const GameState& state, int seat, const Move& action) {
  QStateFeatures s = build_q_state(state, seat);
  return {encode_cards(action.cards()), std::move(s.state), std::move(s.history)};
}

IdentifyFeatures build_identify_features(const GameState& state, int seat) {
  IdentifyFeatures f;
  f.state.resize(kIdentifyStateWidth);
  int at = write_common(state, seat, false, f.state);
  for (Relative r : kRelatives) {
    f.state.segment<kSuitWidth>(at) = encode_suits10(state.played_by(seat_at(seat, r)));
    at += kSuitWidth;
  }
  f.state.segment<kSuitWidth>(at) = encode_suits10(state.initial_hands[seat]);
  at += kSuitWidth;
  f.state.segment<kSuitWidth>(at) =
      encode_suits10(state.deck - state.hands[seat] - state.played());
  f.history = history_window(state.history);
  return f;
}

std::vector<Zone> q_layout() {
  const std::vector<std::pair<std::string, int>> widths = {
      {"action", kCardBlock},
      {"hand", kCardBlock},
      {"others_union", kCardBlock},
      {"last_lead", kCardBlock},
      {"up_last_play", kCardBlock},
      {"front_last_play", kCardBlock},
      {"down_last_play", kCardBlock},
      {"up_played", kCardBlock},
      {"front_played", kCardBlock},
      {"down_played", kCardBlock},
      {"up_count", kCountWidth},
      {"front_count", kCountWidth},
      {"down_count", kCountWidth},
      {"history", kHistoryRows * kHistoryRowWidth},
  };
  std::vector<Zone> out;
  int at = 0;
  for (const auto& [name, w] : widths) {
    out.push_back({name, at, w});
    at += w;
  }
  return out;
}

std::vector<Zone> identify_layout() {
  const std::vector<std::pair<std::string, int>> widths = {
      {"hand", kCardBlock},
      {"others_union", kCardBlock},
      {"up_last_play", kCardBlock},
      {"front_last_play", kCardBlock},
      {"down_last_play", kCardBlock},
      {"up_played", kCardBlock},
      {"front_played", kCardBlock},
      {"down_played", kCardBlock},
      {"up_count", kCountWidth},
      {"front_count", kCountWidth},
      {"down_count", kCountWidth},
      {"up_tens_played", kSuitWidth},
      {"front_tens_played", kSuitWidth},
      {"down_tens_played", kSuitWidth},
      {"own_tens_dealt", kSuitWidth},
      {"others_tens_held", kSuitWidth},
      {"history", kHistoryRows * kHistoryRowWidth},
  };
  std::vector<Zone> out;
  int at = 0;
  for (const auto& [name, w] : widths) {
    out.push_back({name, at, w});
    at += w;
  }
  return out;
}

std::string format_layout(const std::vector<Zone>& zones) {
  std::ostringstream out;
  out << "zone,offset,width\n";
  for (const Zone& z : zones) out << z.name << ',' << z.offset << ',' << z.width << '\n';
  return out.str();
}

}  // namespace red10
