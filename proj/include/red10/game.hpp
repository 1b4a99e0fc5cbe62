#ifndef RED10_GAME_HPP_
#define RED10_GAME_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "red10/moves.hpp"

namespace red10 {

enum class Team : std::uint8_t { kPeasant, kLandlord };
inline std::string_view team_name(Team t) { return t == Team::kLandlord ? "Landlord" : "Peasant"; }

// Seats play 0 -> 1 -> 2 -> 3. From seat i the "up" player is i-1, the
// "front" player i+2 and the "down" player i+1 (mod 4).
enum class Relative : std::uint8_t { kUp, kFront, kDown };
inline constexpr std::array<Relative, 3> kRelatives = {Relative::kUp, Relative::kFront,
                                                       Relative::kDown};
inline constexpr int seat_at(int seat, Relative rel) {
  return (seat + (rel == Relative::kUp ? 3 : rel == Relative::kFront ? 2 : 1)) % kNumSeats;
}

// Cooperate (1) / compete (0) towards up, front and down. Indexes the policy
// bank as up*4 + front*2 + down.
struct TeamMask {
  bool up = false;
  bool front = false;
  bool down = false;

  constexpr int index() const { return (up ? 4 : 0) | (front ? 2 : 0) | (down ? 1 : 0); }
  static constexpr TeamMask from_index(int i) { return {(i & 4) != 0, (i & 2) != 0, (i & 1) != 0}; }
  constexpr bool operator[](Relative r) const {
    return r == Relative::kUp ? up : r == Relative::kFront ? front : down;
  }
  std::string bits() const;  // "101" = up, front, down
  static std::optional<TeamMask> parse(const std::string& bits);

  friend constexpr bool operator==(TeamMask, TeamMask) = default;
};
inline constexpr int kNumMasks = 8;

enum class PatternId : std::uint8_t { k1100, k1010, k1000, k0000 };

std::string_view pattern_name(PatternId p);

// Which seats sit on the Landlord team; bit i set for seat i. A bitmap of 0
// is the training-only all-cooperative layout.
struct TeamLayout {
  std::uint8_t landlords = 0;

  Team team_of(int seat) const { return (landlords >> seat) & 1U ? Team::kLandlord : Team::kPeasant; }
  bool teammates(int a, int b) const { return team_of(a) == team_of(b); }
  PatternId pattern() const;
  static TeamLayout all_cooperative() { return {0}; }
};

TeamMask ground_truth_mask(const TeamLayout& layout, int seat);

struct Turn {
  int seat = 0;
  Move move;
};

struct Lead {
  int seat = 0;
  Combination combination;
};

class IllegalMove : public std::invalid_argument {
 public:
  explicit IllegalMove(const std::string& what) : std::invalid_argument(what) {}
};
class GameOver : public std::logic_error {
 public:
  explicit GameOver(const std::string& what) : std::logic_error(what) {}
};

struct GameState {
  CardSet deck;  // every card in play
  std::array<CardSet, kNumSeats> initial_hands;
  std::array<CardSet, kNumSeats> hands;
  std::vector<Turn> history;
  std::optional<Lead> lead;
  int consecutive_passes = 0;
  int turn = 0;
  TeamLayout layout;
  std::optional<Team> winner;

  int t() const { return static_cast<int>(history.size()); }
  bool terminal() const { return winner.has_value(); }
  CardSet played() const;
  // Cards played so far by one seat.
  CardSet played_by(int seat) const;
  std::optional<Combination> lead_combination() const {
    if (!lead) return std::nullopt;
    return lead->combination;
  }
  std::vector<Move> legal() const { return legal_moves(hands[turn], lead_combination()); }
};

// The same deal rewound to its first turn.
GameState rewind(const GameState& state);

// Shuffles `deck` with the seed and deals it round-robin from seat 0.
GameState deal(std::uint64_t seed, CardSet deck = CardSet::full_deck());

// Team layout implied by who holds the red tens.
TeamLayout layout_from_hands(const std::array<CardSet, kNumSeats>& hands);

// Checks legality and returns the successor state. Throws GameOver or
// IllegalMove.
GameState step(const GameState& state, const Move& move);
void check_legal(const GameState& state, const Move& move);

// Replay files: "seed=<u64>" header then one "seat,category,cards" line per
// move (category "Pass" with empty cards).
void write_replay(std::ostream& out, std::uint64_t seed, const std::vector<Turn>& history);
struct Replay {
  std::uint64_t seed = 0;
  std::vector<Turn> turns;
};
Replay read_replay(std::istream& in);
// Re-deals and re-applies every move, verifying legality and seat order.
GameState reconstruct(const Replay& replay);

}  // namespace red10

#endif  // RED10_GAME_HPP_
