#ifndef RED10_COMBINATION_HPP_
#define RED10_COMBINATION_HPP_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "red10/card.hpp"

namespace red10 {

enum class Category : std::uint8_t {
  kSolo,
  kPair,
  kTrio,
  kTrioSolo,
  kTrioPair,
  kSoloChain,
  kPairChain,
  kAirplane,
  kAirplaneSmall,
  kAirplaneLarge,
  kFourTwoSingles,
  kFourTwoPairs,
  kBomb,
};
inline constexpr int kNumCategories = 13;

std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view name);

// Per-rank card counts of a combination, independent of suits.
using RankCounts = std::array<int, kNumRanks>;

// Shape of a card group: what it is, the rank it is ranked by, and how many
// chain links it has (1 for non-chain categories; number of trios for
// airplanes).
struct Shape {
  Category category = Category::kSolo;
  Rank key_rank = Rank::k3;
  int length = 1;

  friend bool operator==(const Shape&, const Shape&) = default;
};

struct Combination {
  Category category = Category::kSolo;
  Rank key_rank = Rank::k3;
  int length = 1;
  CardSet cards;

  Shape shape() const { return {category, key_rank, length}; }
  friend bool operator==(const Combination&, const Combination&) = default;
};

class NotACombination : public std::invalid_argument {
 public:
  explicit NotACombination(const std::string& what) : std::invalid_argument(what) {}
};

// Highest rank allowed inside a chain or airplane (2s never chain).
inline constexpr int kMaxChainRank = rank_index(Rank::kA);

std::optional<Shape> classify_counts(const RankCounts& counts);
std::optional<Combination> try_classify(CardSet cards);
// Throws NotACombination when the cards form no category.
Combination classify(CardSet cards);

bool beats(const Shape& challenger, const Shape& lead);
inline bool beats(const Combination& challenger, const Combination& lead) {
  return beats(challenger.shape(), lead.shape());
}

}  // namespace red10

#endif  // RED10_COMBINATION_HPP_
