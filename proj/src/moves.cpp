#include "red10/moves.hpp"

#include <algorithm>
#include <functional>

namespace red10 {
namespace {

using Emit = std::function<void(const Pattern&)>;

class PatternGenerator {
 public:
  PatternGenerator(const RankCounts& have, const Emit& emit) : have_(have), emit_(emit) {}

  void all() {
    singles();
    trios_with_kickers();
    chains(Category::kSoloChain, 1, 5);
    chains(Category::kPairChain, 2, 3);
    airplanes();
    fours_with_kickers();
  }

  // Only the categories that could beat `lead`.
  void beating(const Shape& lead) {
    switch (lead.category) {
      case Category::kSolo:
      case Category::kPair:
      case Category::kTrio:
        singles_of(lead.category);
        break;
      case Category::kTrioSolo:
      case Category::kTrioPair:
        trios_with_kickers();
        break;
      case Category::kSoloChain:
        chains(Category::kSoloChain, 1, 5);
        break;
      case Category::kPairChain:
        chains(Category::kPairChain, 2, 3);
        break;
      case Category::kAirplane:
      case Category::kAirplaneSmall:
      case Category::kAirplaneLarge:
        airplanes();
        break;
      case Category::kFourTwoSingles:
      case Category::kFourTwoPairs:
        fours_with_kickers();
        break;
      case Category::kBomb:
        break;
    }
    singles_of(Category::kBomb);
  }

 private:
  void put(Category cat, int key, int len, const RankCounts& counts) {
    emit_(Pattern{Shape{cat, static_cast<Rank>(key), len}, counts});
  }

  void singles() {
    for (Category c : {Category::kSolo, Category::kPair, Category::kTrio, Category::kBomb}) {
      singles_of(c);
    }
  }

  void singles_of(Category cat) {
    const int need = cat == Category::kSolo ? 1 : cat == Category::kPair ? 2
                   : cat == Category::kTrio ? 3 : 4;
    for (int r = 0; r < kNumRanks; ++r) {
      if (have_[r] < need) continue;
      RankCounts counts{};
      counts[r] = need;
      put(cat, r, 1, counts);
    }
  }

  void trios_with_kickers() {
    for (int t = 0; t < kNumRanks; ++t) {
      if (have_[t] < 3) continue;
      for (int k = 0; k < kNumRanks; ++k) {
        if (k == t || have_[k] < 1) continue;
        RankCounts counts{};
        counts[t] = 3;
        counts[k] = 1;
        put(Category::kTrioSolo, t, 1, counts);
        if (have_[k] >= 2) {
          counts[k] = 2;
          put(Category::kTrioPair, t, 1, counts);
        }
      }
    }
  }

  void chains(Category cat, int width, int min_len) {
    for (int low = 0; low <= kMaxChainRank; ++low) {
      RankCounts counts{};
      for (int high = low; high <= kMaxChainRank && have_[high] >= width; ++high) {
        counts[high] = width;
        const int len = high - low + 1;
        if (len >= min_len) put(cat, low, len, counts);
      }
    }
  }

  void airplanes() {
    for (int low = 0; low <= kMaxChainRank; ++low) {
      RankCounts body{};
      for (int high = low; high <= kMaxChainRank && have_[high] >= 3; ++high) {
        body[high] = 3;
        const int len = high - low + 1;
        if (len < 2) continue;
        put(Category::kAirplane, low, len, body);
        // Small wings: `len` extra cards, at most two per rank, off the chain.
        RankCounts wings = body;
        small_wings(low, high, len, 0, wings);
        // Large wings: `len` pairs of distinct ranks off the chain.
        wings = body;
        large_wings(low, high, len, 0, wings);
      }
    }
  }

  void small_wings(int low, int high, int remaining, int from, RankCounts& counts) {
    if (remaining == 0) {
      put(Category::kAirplaneSmall, low, high - low + 1, counts);
      return;
    }
    for (int r = from; r < kNumRanks; ++r) {
      if (r >= low && r <= high) continue;
      for (int take = 1; take <= std::min({2, have_[r], remaining}); ++take) {
        counts[r] = take;
        small_wings(low, high, remaining - take, r + 1, counts);
        counts[r] = 0;
      }
    }
  }

  void large_wings(int low, int high, int remaining, int from, RankCounts& counts) {
    if (remaining == 0) {
      put(Category::kAirplaneLarge, low, high - low + 1, counts);
      return;
    }
    for (int r = from; r < kNumRanks; ++r) {
      if ((r >= low && r <= high) || have_[r] < 2) continue;
      counts[r] = 2;
      large_wings(low, high, remaining - 1, r + 1, counts);
      counts[r] = 0;
    }
  }

  void fours_with_kickers() {
    for (int f = 0; f < kNumRanks; ++f) {
      if (have_[f] < 4) continue;
      RankCounts counts{};
      counts[f] = 4;
      for (int a = 0; a < kNumRanks; ++a) {
        if (a == f || have_[a] < 1) continue;
        if (have_[a] >= 2) {
          counts[a] = 2;
          put(Category::kFourTwoSingles, f, 1, counts);
          counts[a] = 0;
        }
        for (int b = a + 1; b < kNumRanks; ++b) {
          if (b == f || have_[b] < 1) continue;
          counts[a] = 1;
          counts[b] = 1;
          put(Category::kFourTwoSingles, f, 1, counts);
          if (have_[a] >= 2 && have_[b] >= 2) {
            counts[a] = 2;
            counts[b] = 2;
            put(Category::kFourTwoPairs, f, 1, counts);
          }
          counts[a] = 0;
          counts[b] = 0;
        }
      }
    }
  }

  const RankCounts& have_;
  const Emit& emit_;
};

// All size-k subsets of a 4-bit suit mask.
void suit_subsets(unsigned mask, int k, std::vector<unsigned>& out) {
  out.clear();
  for (unsigned sub = mask;; sub = (sub - 1) & mask) {
    if (std::popcount(sub) == k) out.push_back(sub);
    if (sub == 0) break;
  }
}

// Expands a rank-level pattern into every concrete card group drawn from hand.
void expand(CardSet hand, const Pattern& p, std::vector<Move>& out) {
  std::vector<std::pair<int, std::vector<unsigned>>> choices;
  for (int r = 0; r < kNumRanks; ++r) {
    if (p.counts[r] == 0) continue;
    std::vector<unsigned> subs;
    suit_subsets(hand.suits_of(static_cast<Rank>(r)), p.counts[r], subs);
    choices.emplace_back(r, std::move(subs));
  }
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      bits |= std::uint64_t{choices[i].second[idx[i]]} << (choices[i].first * kNumSuits);
    }
    out.push_back(Move::of(Combination{p.shape.category, p.shape.key_rank, p.shape.length,
                                       CardSet(bits)}));
    std::size_t i = 0;
    for (; i < choices.size(); ++i) {
      if (++idx[i] < choices[i].second.size()) break;
      idx[i] = 0;
    }
    if (i == choices.size()) break;
  }
}

}  // namespace

std::string to_string(const Move& m) {
  if (m.is_pass()) return "Pass";
  return std::string(category_name(m.play->category)) + "(" + m.play->cards.to_string() + ")";
}

bool canonical_less(const Move& a, const Move& b) {
  if (a.is_pass() || b.is_pass()) return !a.is_pass() && b.is_pass();
  const auto& x = *a.play;
  const auto& y = *b.play;
  if (x.category != y.category) return x.category < y.category;
  if (x.key_rank != y.key_rank) return x.key_rank < y.key_rank;
  return lexicographic_less(x.cards, y.cards);
}

std::vector<Pattern> patterns(CardSet hand, const std::optional<Shape>& lead) {
  std::vector<Pattern> out;
  const RankCounts have = hand.rank_counts();
  const Emit emit = [&](const Pattern& p) {
    if (!lead || beats(p.shape, *lead)) out.push_back(p);
  };
  PatternGenerator gen(have, emit);
  if (lead) {
    gen.beating(*lead);
  } else {
    gen.all();
  }
  return out;
}

std::vector<Move> legal_moves(CardSet hand, const std::optional<Combination>& lead) {
  std::optional<Shape> lead_shape;
  if (lead) lead_shape = lead->shape();
  std::vector<Move> out;
  for (const Pattern& p : patterns(hand, lead_shape)) expand(hand, p, out);
  std::sort(out.begin(), out.end(), canonical_less);
  if (lead) out.push_back(Move::pass());
  return out;
}

std::vector<Pattern> combination_census(CardSet pool) { return patterns(pool, std::nullopt); }

}  // namespace red10
