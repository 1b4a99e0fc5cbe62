#include "red10/card.hpp"

#include <sstream>

namespace red10 {

std::string to_code(Card c) {
  return {kRankChars[rank_index(c.rank)], kSuitChars[suit_index(c.suit)]};
}

std::optional<Card> parse_card(std::string_view code) {
  if (code.size() != 2) return std::nullopt;
  const std::string_view ranks(kRankChars);
  const std::string_view suits(kSuitChars);
  const auto r = ranks.find(code[0]);
  const auto s = suits.find(code[1]);
  if (r == std::string_view::npos || s == std::string_view::npos) return std::nullopt;
  return Card{static_cast<Rank>(r), static_cast<Suit>(s)};
}

CardSet CardSet::of_ranks(const std::vector<Rank>& ranks) {
  CardSet out;
  for (Rank r : ranks) out |= CardSet(std::uint64_t{0xF} << (rank_index(r) * kNumSuits));
  return out;
}

std::array<int, kNumRanks> CardSet::rank_counts() const {
  std::array<int, kNumRanks> counts{};
  for (int r = 0; r < kNumRanks; ++r) counts[r] = count(static_cast<Rank>(r));
  return counts;
}

std::vector<Card> CardSet::cards() const {
  std::vector<Card> out;
  out.reserve(size());
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(Card::from_index(std::countr_zero(b)));
  }
  return out;
}

std::string CardSet::to_string() const {
  std::string out;
  for (Card c : cards()) {
    if (!out.empty()) out += ' ';
    out += to_code(c);
  }
  return out;
}

std::optional<CardSet> CardSet::parse(std::string_view text) {
  CardSet out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto card = parse_card(token);
    if (!card || out.contains(*card)) return std::nullopt;
    out.insert(*card);
  }
  return out;
}

bool lexicographic_less(CardSet a, CardSet b) {
  const std::uint64_t diff = a.bits_ ^ b.bits_;
  if (diff == 0) return false;
  const int lowest = std::countr_zero(diff);
  // Both lists agree below `lowest`. The side holding `lowest` is smaller
  // unless the other side has nothing left (and so is a prefix).
  const std::uint64_t above = lowest == 63 ? 0 : (~std::uint64_t{0} << (lowest + 1));
  if (a.contains(Card::from_index(lowest))) return (b.bits_ & above) != 0;
  return (a.bits_ & above) == 0;
}

}  // namespace red10
