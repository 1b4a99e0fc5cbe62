#include "red10/game.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "red10/random.hpp"

namespace red10 {

std::string TeamMask::bits() const {
  return {up ? '1' : '0', front ? '1' : '0', down ? '1' : '0'};
}

std::optional<TeamMask> TeamMask::parse(const std::string& bits) {
  if (bits.size() != 3) return std::nullopt;
  for (char c : bits) {
    if (c != '0' && c != '1') return std::nullopt;
  }
  return TeamMask{bits[0] == '1', bits[1] == '1', bits[2] == '1'};
}

std::string_view pattern_name(PatternId p) {
  switch (p) {
    case PatternId::k1100: return "1100";
    case PatternId::k1010: return "1010";
    case PatternId::k1000: return "1000";
    case PatternId::k0000: return "0000";
  }
  return "?";
}

PatternId TeamLayout::pattern() const {
  switch (std::popcount(static_cast<unsigned>(landlords))) {
    case 0: return PatternId::k0000;
    case 1: return PatternId::k1000;
    case 2: return (landlords == 0b0101 || landlords == 0b1010) ? PatternId::k1010
                                                                : PatternId::k1100;
    default: return PatternId::k1000;  // three landlords mirror one lone peasant
  }
}

TeamMask ground_truth_mask(const TeamLayout& layout, int seat) {
  return {layout.teammates(seat, seat_at(seat, Relative::kUp)),
          layout.teammates(seat, seat_at(seat, Relative::kFront)),
          layout.teammates(seat, seat_at(seat, Relative::kDown))};
}

CardSet GameState::played() const {
  CardSet out;
  for (const Turn& t : history) out |= t.move.cards();
  return out;
}

CardSet GameState::played_by(int seat) const {
  return initial_hands[seat] - hands[seat];
}

TeamLayout layout_from_hands(const std::array<CardSet, kNumSeats>& hands) {
  TeamLayout layout;
  for (int s = 0; s < kNumSeats; ++s) {
    if (!(hands[s] & kRedTens).empty()) layout.landlords |= static_cast<std::uint8_t>(1U << s);
  }
  return layout;
}

GameState deal(std::uint64_t seed, CardSet deck) {
  Rng rng(seed);
  std::vector<Card> cards = deck.cards();
  for (std::size_t i = cards.size(); i > 1; --i) {
    std::swap(cards[i - 1], cards[uniform_index(rng, i)]);
  }
  GameState state;
  state.deck = deck;
  for (std::size_t i = 0; i < cards.size(); ++i) state.hands[i % kNumSeats].insert(cards[i]);
  state.initial_hands = state.hands;
  state.layout = layout_from_hands(state.hands);
  return state;
}

void check_legal(const GameState& state, const Move& move) {
  if (state.terminal()) throw GameOver("game is over");
  if (move.is_pass()) {
    if (!state.lead) throw IllegalMove("cannot pass while leading");
    return;
  }
  const Combination& c = *move.play;
  if (!state.hands[state.turn].contains(c.cards)) {
    throw IllegalMove("cards not in hand: " + c.cards.to_string());
  }
  const auto actual = try_classify(c.cards);
  if (!actual || !(*actual == c)) throw IllegalMove("not a combination: " + to_string(move));
  if (state.lead && !beats(c, state.lead->combination)) {
    throw IllegalMove("does not beat lead: " + to_string(move));
  }
}

GameState step(const GameState& state, const Move& move) {
  check_legal(state, move);
  GameState next = state;
  const int seat = state.turn;
  next.history.push_back({seat, move});
  if (move.is_pass()) {
    if (++next.consecutive_passes == kNumSeats - 1) {
      next.lead.reset();
      next.consecutive_passes = 0;
    }
  } else {
    next.hands[seat] -= move.play->cards;
    next.lead = Lead{seat, *move.play};
    next.consecutive_passes = 0;
    if (next.hands[seat].empty()) next.winner = next.layout.team_of(seat);
  }
  next.turn = (seat + 1) % kNumSeats;
  return next;
}

void write_replay(std::ostream& out, std::uint64_t seed, const std::vector<Turn>& history) {
  out << "seed=" << seed << '\n';
  for (const Turn& t : history) {
    out << t.seat << ','
        << (t.move.is_pass() ? std::string_view("Pass") : category_name(t.move.play->category))
        << ',' << t.move.cards().to_string() << '\n';
  }
}

Replay read_replay(std::istream& in) {
  Replay replay;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("replay line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) fail("missing header");
  ++line_no;
  if (line.rfind("seed=", 0) != 0) fail("expected seed=<u64>");
  try {
    replay.seed = std::stoull(line.substr(5));
  } catch (const std::exception&) {
    fail("bad seed");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) fail("expected seat,category,cards");
    Turn turn;
    try {
      turn.seat = std::stoi(line.substr(0, c1));
    } catch (const std::exception&) {
      fail("bad seat");
    }
    const std::string cat = line.substr(c1 + 1, c2 - c1 - 1);
    const auto cards = CardSet::parse(line.substr(c2 + 1));
    if (!cards) fail("bad cards");
    if (cat == "Pass") {
      if (!cards->empty()) fail("pass with cards");
      turn.move = Move::pass();
    } else {
      const auto category = parse_category(cat);
      const auto combo = try_classify(*cards);
      if (!category || !combo || combo->category != *category) fail("category mismatch");
      turn.move = Move::of(*combo);
    }
    replay.turns.push_back(std::move(turn));
  }
  return replay;
}

GameState reconstruct(const Replay& replay) {
  GameState state = deal(replay.seed);
  for (std::size_t i = 0; i < replay.turns.size(); ++i) {
    const Turn& t = replay.turns[i];
    if (t.seat != state.turn) {
      throw IllegalMove("move " + std::to_string(i + 1) + " by seat " + std::to_string(t.seat) +
                        " out of turn");
    }
    state = step(state, t.move);
  }
  return state;
}

GameState rewind(const GameState& state) {
  GameState s = state;
  s.hands = state.initial_hands;
  s.history.clear();
  s.lead.reset();
  s.consecutive_passes = 0;
  s.turn = 0;
  s.winner.reset();
  return s;
}

}  // namespace red10
