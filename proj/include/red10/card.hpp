#ifndef RED10_CARD_HPP_
#define RED10_CARD_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace red10 {

// Ranks in ascending strength: 3 < 4 < ... < K < A < 2.
enum class Rank : std::uint8_t {
  k3, k4, k5, k6, k7, k8, k9, k10, kJ, kQ, kK, kA, k2
};
enum class Suit : std::uint8_t { kHeart, kDiamond, kClub, kSpade };

inline constexpr int kNumRanks = 13;
inline constexpr int kNumSuits = 4;
inline constexpr int kDeckSize = 52;
inline constexpr int kNumSeats = 4;

inline constexpr char kRankChars[] = "3456789TJQKA2";
inline constexpr char kSuitChars[] = "HDCS";

struct Card {
  Rank rank = Rank::k3;
  Suit suit = Suit::kHeart;

  constexpr int index() const {
    return static_cast<int>(rank) * kNumSuits + static_cast<int>(suit);
  }
  static constexpr Card from_index(int i) {
    return Card{static_cast<Rank>(i / kNumSuits), static_cast<Suit>(i % kNumSuits)};
  }
  constexpr bool is_ten() const { return rank == Rank::k10; }
  constexpr bool is_red_ten() const {
    return rank == Rank::k10 && (suit == Suit::kHeart || suit == Suit::kDiamond);
  }

  friend constexpr bool operator==(Card, Card) = default;
  friend constexpr auto operator<=>(Card a, Card b) { return a.index() <=> b.index(); }
};

inline constexpr int rank_index(Rank r) { return static_cast<int>(r); }
inline constexpr int suit_index(Suit s) { return static_cast<int>(s); }

// Two-character code, rank then suit: "TH" is the ten of hearts.
std::string to_code(Card c);
std::optional<Card> parse_card(std::string_view code);

// A set of distinct cards from one deck, stored as a 52-bit mask indexed by
// Card::index(). Iteration order is ascending (rank, suit).
class CardSet {
 public:
  constexpr CardSet() = default;
  constexpr explicit CardSet(std::uint64_t bits) : bits_(bits) {}
  CardSet(std::initializer_list<Card> cards) {
    for (Card c : cards) insert(c);
  }

  static constexpr CardSet full_deck() { return CardSet((std::uint64_t{1} << kDeckSize) - 1); }
  // All four suits of each listed rank.
  static CardSet of_ranks(const std::vector<Rank>& ranks);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(Card c) const { return (bits_ >> c.index()) & 1U; }
  constexpr bool contains(CardSet o) const { return (bits_ & o.bits_) == o.bits_; }
  constexpr void insert(Card c) { bits_ |= std::uint64_t{1} << c.index(); }
  constexpr void erase(Card c) { bits_ &= ~(std::uint64_t{1} << c.index()); }

  // Cards of one rank as a 4-bit suit mask.
  constexpr unsigned suits_of(Rank r) const {
    return static_cast<unsigned>(bits_ >> (rank_index(r) * kNumSuits)) & 0xFU;
  }
  constexpr int count(Rank r) const { return std::popcount(suits_of(r)); }
  std::array<int, kNumRanks> rank_counts() const;

  std::vector<Card> cards() const;
  std::string to_string() const;  // space-separated codes
  static std::optional<CardSet> parse(std::string_view text);

  constexpr CardSet operator|(CardSet o) const { return CardSet(bits_ | o.bits_); }
  constexpr CardSet operator&(CardSet o) const { return CardSet(bits_ & o.bits_); }
  constexpr CardSet operator-(CardSet o) const { return CardSet(bits_ & ~o.bits_); }
  constexpr CardSet& operator|=(CardSet o) { bits_ |= o.bits_; return *this; }
  constexpr CardSet& operator-=(CardSet o) { bits_ &= ~o.bits_; return *this; }

  friend constexpr bool operator==(CardSet, CardSet) = default;

  // Orders by the ascending card list (lexicographic on indices).
  friend bool lexicographic_less(CardSet a, CardSet b);

 private:
  std::uint64_t bits_ = 0;
};

inline constexpr CardSet kRedTens = CardSet((std::uint64_t{0b0011}) << (7 * kNumSuits));
inline constexpr CardSet kAllTens = CardSet((std::uint64_t{0b1111}) << (7 * kNumSuits));

}  // namespace red10

#endif  // RED10_CARD_HPP_
