#include "red10/combination.hpp"

#include <algorithm>

namespace red10 {
namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "Solo",      "Pair",          "Trio",          "TrioSolo",       "TrioPair",
    "SoloChain", "PairChain",     "Airplane",      "AirplaneSmall",  "AirplaneLarge",
    "FourTwoSingles", "FourTwoPairs", "Bomb",
};

// True when the ranks with count == `want` form one consecutive run that stays
// below rank 2. Writes the run's lowest rank and length.
bool consecutive_run(const RankCounts& counts, int want, int* low, int* len) {
  int first = -1;
  int last = -1;
  int n = 0;
  for (int r = 0; r < kNumRanks; ++r) {
    if (counts[r] != want) continue;
    if (first < 0) first = r;
    last = r;
    ++n;
  }
  if (n == 0 || last - first + 1 != n || last > kMaxChainRank) return false;
  *low = first;
  *len = n;
  return true;
}

}  // namespace

std::string_view category_name(Category c) { return kCategoryNames[static_cast<int>(c)]; }

std::optional<Category> parse_category(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::optional<Shape> classify_counts(const RankCounts& counts) {
  int total = 0;
  // histogram[k] = number of ranks holding exactly k cards
  std::array<int, 5> histogram{};
  int rank_of[5] = {-1, -1, -1, -1, -1};
  for (int r = 0; r < kNumRanks; ++r) {
    const int c = counts[r];
    if (c < 0 || c > 4) return std::nullopt;
    total += c;
    ++histogram[c];
    if (rank_of[c] < 0) rank_of[c] = r;
  }
  if (total == 0) return std::nullopt;
  const int distinct = kNumRanks - histogram[0];
  auto shape = [](Category cat, int key, int len = 1) {
    return Shape{cat, static_cast<Rank>(key), len};
  };

  if (distinct == 1) {
    switch (total) {
      case 1: return shape(Category::kSolo, rank_of[1]);
      case 2: return shape(Category::kPair, rank_of[2]);
      case 3: return shape(Category::kTrio, rank_of[3]);
      case 4: return shape(Category::kBomb, rank_of[4]);
    }
  }
  if (total == 4 && histogram[3] == 1 && histogram[1] == 1) {
    return shape(Category::kTrioSolo, rank_of[3]);
  }
  if (total == 5 && histogram[3] == 1 && histogram[2] == 1) {
    return shape(Category::kTrioPair, rank_of[3]);
  }

  int low = 0;
  int len = 0;
  if (histogram[1] == distinct && distinct >= 5 && consecutive_run(counts, 1, &low, &len)) {
    return shape(Category::kSoloChain, low, len);
  }
  if (histogram[2] == distinct && distinct >= 3 && consecutive_run(counts, 2, &low, &len)) {
    return shape(Category::kPairChain, low, len);
  }
  if (histogram[3] == distinct && distinct >= 2 && consecutive_run(counts, 3, &low, &len)) {
    return shape(Category::kAirplane, low, len);
  }

  if (histogram[4] == 1) {
    if (total == 6) return shape(Category::kFourTwoSingles, rank_of[4]);
    if (total == 8 && histogram[2] == 2 && distinct == 3) {
      return shape(Category::kFourTwoPairs, rank_of[4]);
    }
  }
  if (histogram[4] > 0) return std::nullopt;

  // Airplanes with wings: the trio ranks form the chain; every other rank is a
  // wing holding at most two cards.
  if (histogram[3] >= 2 && consecutive_run(counts, 3, &low, &len)) {
    const int wings = total - 3 * len;
    if (wings == len) return shape(Category::kAirplaneSmall, low, len);
    if (wings == 2 * len && histogram[1] == 0) return shape(Category::kAirplaneLarge, low, len);
  }
  return std::nullopt;
}

std::optional<Combination> try_classify(CardSet cards) {
  const auto shape = classify_counts(cards.rank_counts());
  if (!shape) return std::nullopt;
  return Combination{shape->category, shape->key_rank, shape->length, cards};
}

Combination classify(CardSet cards) {
  auto combo = try_classify(cards);
  if (!combo) throw NotACombination("not a combination: " + cards.to_string());
  return *combo;
}

bool beats(const Shape& challenger, const Shape& lead) {
  const bool cb = challenger.category == Category::kBomb;
  const bool lb = lead.category == Category::kBomb;
  if (cb != lb) return cb;
  return challenger.category == lead.category && challenger.length == lead.length &&
         challenger.key_rank > lead.key_rank;
}

}  // namespace red10
