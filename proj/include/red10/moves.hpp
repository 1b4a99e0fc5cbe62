#ifndef RED10_MOVES_HPP_
#define RED10_MOVES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "red10/combination.hpp"

namespace red10 {

// Either a pass or a played combination.
struct Move {
  std::optional<Combination> play;

  static Move pass() { return {}; }
  static Move of(Combination c) { return {std::move(c)}; }

  bool is_pass() const { return !play.has_value(); }
  CardSet cards() const { return play ? play->cards : CardSet(); }

  friend bool operator==(const Move&, const Move&) = default;
};

std::string to_string(const Move& m);

// Canonical move order: (category, key_rank, ascending card list); Pass last.
bool canonical_less(const Move& a, const Move& b);

// Rank-level patterns (per-rank counts) formable from `hand`, each tagged
// with its shape. When `lead` is given only patterns beating it are produced.
struct Pattern {
  Shape shape;
  RankCounts counts{};
};
std::vector<Pattern> patterns(CardSet hand, const std::optional<Shape>& lead);

// Every distinct card group that forms a combination from `hand` (and beats
// `lead` when present), plus Pass when following. Canonically sorted.
std::vector<Move> legal_moves(CardSet hand, const std::optional<Combination>& lead);

// Distinct rank-level combinations formable from `pool` (no lead).
std::vector<Pattern> combination_census(CardSet pool);

}  // namespace red10

#endif  // RED10_MOVES_HPP_
