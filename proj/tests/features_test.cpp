#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "red10/features.hpp"

#ifndef RED10_TEST_DATA
#error "RED10_TEST_DATA must point at tests/data"
#endif

namespace red10 {
namespace {

CardSet cards(const char* text) { return *CardSet::parse(text); }

std::string read_file(const std::string& name) {
  std::ifstream in(std::string(RED10_TEST_DATA) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Zone lookup by name in a layout.
Eigen::VectorXf zone(const Eigen::VectorXf& v, const std::vector<Zone>& layout,
                     const std::string& name, int base = 0) {
  for (const Zone& z : layout) {
    if (z.name == name) return v.segment(z.offset - base, z.width);
  }
  ADD_FAILURE() << "no zone " << name;
  return {};
}

TEST(EncodeCards, ColumnSumsAreRankCounts) {
  EXPECT_TRUE(encode_cards(CardSet()).isZero());
  const Eigen::VectorXf m = encode_cards(cards("3H 3D"));
  EXPECT_FLOAT_EQ(m.segment(0, 4).sum(), 2.0F);
  EXPECT_FLOAT_EQ(m.sum(), 2.0F);
  // top-down fill
  EXPECT_FLOAT_EQ(m[0], 1.0F);
  EXPECT_FLOAT_EQ(m[1], 1.0F);
  EXPECT_FLOAT_EQ(m[2], 0.0F);
  const GameState s = deal(123);
  for (int seat = 0; seat < 4; ++seat) {
    const Eigen::VectorXf h = encode_cards(s.hands[seat]);
    EXPECT_FLOAT_EQ(h.sum(), 13.0F);
    for (int r = 0; r < kNumRanks; ++r) {
      EXPECT_FLOAT_EQ(h.segment(r * 4, 4).sum(),
                      static_cast<float>(s.hands[seat].count(static_cast<Rank>(r))));
    }
  }
}

TEST(EncodeSuits10, Indicator) {
  EXPECT_EQ(encode_suits10(cards("TH")), Eigen::Vector4f(1, 0, 0, 0));
  EXPECT_EQ(encode_suits10(CardSet()), Eigen::Vector4f(0, 0, 0, 0));
  EXPECT_EQ(encode_suits10(cards("TH TD TC TS 3H")), Eigen::Vector4f(1, 1, 1, 1));
  EXPECT_EQ(encode_suits10(cards("TS 9H")), Eigen::Vector4f(0, 0, 0, 1));
}

// Independent packer: place move k of the last 20 at flat slot
// 20 - kept + k, then cut the 1040-vector into 5 rows of 208.
HistoryWindow reference_window(const std::vector<Turn>& history) {
  std::vector<float> flat(kHistoryRows * kHistoryRowWidth, 0.0F);
  const int n = static_cast<int>(history.size());
  const int kept = n < 20 ? n : 20;
  for (int k = 0; k < kept; ++k) {
    const CardSet c = history[n - kept + k].move.cards();
    const int base = (20 - kept + k) * 52;
    for (int r = 0; r < 13; ++r) {
      for (int i = 0; i < c.count(static_cast<Rank>(r)); ++i) flat[base + r * 4 + i] = 1.0F;
    }
  }
  HistoryWindow w(kHistoryRowWidth, kHistoryRows);
  for (int row = 0; row < kHistoryRows; ++row) {
    for (int i = 0; i < kHistoryRowWidth; ++i) w(i, row) = flat[row * kHistoryRowWidth + i];
  }
  return w;
}

TEST(HistoryWindow, Packing) {
  EXPECT_TRUE(history_window({}).isZero());

  const std::vector<Turn> one = {{0, Move::of(classify(cards("5H")))}};
  const HistoryWindow w1 = history_window(one);
  EXPECT_FLOAT_EQ(w1.sum(), 1.0F);
  EXPECT_FLOAT_EQ(w1.col(4).segment(3 * 52, 52).sum(), 1.0F);
  EXPECT_EQ(w1, reference_window(one));

  std::vector<Turn> many;
  for (int i = 0; i < 25; ++i) {
    many.push_back({i % 4, Move::of(classify(CardSet{Card::from_index(i)}))});
  }
  const HistoryWindow w25 = history_window(many);
  EXPECT_EQ(w25, reference_window(many));
  // Oldest kept move is the 6th (index 5, card 4D -> rank 4 row 0).
  EXPECT_FLOAT_EQ(w25(1 * 4 + 0, 0), 1.0F);
  EXPECT_FLOAT_EQ(w25.sum(), 20.0F);
}

TEST(HistoryWindow, MatchesReferenceOnRandomGames) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GameState s = testing::random_midgame(seed, static_cast<int>(seed * 2));
    EXPECT_EQ(history_window(s.history), reference_window(s.history));
  }
}

TEST(Layout, GoldenFiles) {
  EXPECT_EQ(format_layout(q_layout()), read_file("q_layout.golden"));
  EXPECT_EQ(format_layout(identify_layout()), read_file("identify_layout.golden"));
  const auto q = q_layout();
  EXPECT_EQ(q.back().offset, kQFlatWidth);
  EXPECT_EQ(identify_layout().back().offset, kIdentifyStateWidth);
}

TEST(QFeatures, InitialState) {
  const GameState s = deal(31);
  const Move a = s.legal().front();
  const QFeatures f = build_q_features(s, 0, a);
  const Eigen::VectorXf flat = f.flat();
  const auto layout = q_layout();
  EXPECT_FLOAT_EQ(zone(flat, layout, "hand").sum(), 13.0F);
  EXPECT_FLOAT_EQ(zone(flat, layout, "others_union").sum(), 39.0F);
  EXPECT_FLOAT_EQ(zone(flat, layout, "last_lead").sum(), 0.0F);
  EXPECT_EQ(zone(flat, layout, "action"), encode_cards(a.cards()));
  for (const char* c : {"up_count", "front_count", "down_count"}) {
    const Eigen::VectorXf oh = zone(flat, layout, c);
    EXPECT_FLOAT_EQ(oh.sum(), 1.0F);
    EXPECT_FLOAT_EQ(oh[12], 1.0F);
  }
  EXPECT_TRUE(f.history.isZero());
}

TEST(QFeatures, OneCardLeftAndPurity) {
  GameState s = deal(8);
  Rng rng(2);
  while (!s.terminal() && s.hands[s.turn].size() != 1) {
    const auto moves = s.legal();
    s = step(s, moves[uniform_index(rng, moves.size())]);
  }
  if (s.terminal()) GTEST_SKIP() << "no one-card state in this deal";
  const Move a = s.legal().front();
  const QFeatures f1 = build_q_features(s, s.turn, a);
  const QFeatures f2 = build_q_features(s, s.turn, a);
  EXPECT_FLOAT_EQ(zone(f1.flat(), q_layout(), "hand").sum(), 1.0F);
  EXPECT_EQ(f1.flat(), f2.flat());
  EXPECT_EQ(f1.history, f2.history);
}

TEST(QFeatures, LastPlaysPersistThroughPasses) {
  GameState s = deal(4);
  const Move first = s.legal().front();
  s = step(s, first);       // seat 0 plays
  s = step(s, Move::pass());  // seat 1
  // Seat 1's view: its up player is seat 0.
  const QStateFeatures f = build_q_state(s, 2);
  const auto layout = q_layout();
  // seat 2: up = 1 (passed, nothing), front = 0
  Eigen::VectorXf flat(kQFlatWidth);
  flat << Eigen::VectorXf::Zero(52), f.state;
  EXPECT_EQ(zone(flat, layout, "front_last_play"), encode_cards(first.cards()));
  EXPECT_FLOAT_EQ(zone(flat, layout, "up_last_play").sum(), 0.0F);
  EXPECT_EQ(zone(flat, layout, "last_lead"), encode_cards(first.cards()));
  EXPECT_EQ(zone(flat, layout, "front_played"), encode_cards(first.cards()));
}

TEST(QFeatures, DeckPartitionPerRank) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GameState s = testing::random_midgame(seed, 10 + static_cast<int>(seed));
    const int seat = s.turn;
    const QStateFeatures f = build_q_state(s, seat);
    Eigen::VectorXf flat(kQFlatWidth);
    flat << Eigen::VectorXf::Zero(52), f.state;
    const auto layout = q_layout();
    const Eigen::VectorXf own = zone(flat, layout, "hand");
    const Eigen::VectorXf others = zone(flat, layout, "others_union");
    // Played cards from the history, not from the feature builder.
    CardSet played;
    for (const Turn& t : s.history) played |= t.move.cards();
    const Eigen::VectorXf pl = encode_cards(played);
    for (int r = 0; r < kNumRanks; ++r) {
      EXPECT_FLOAT_EQ(own.segment(r * 4, 4).sum() + others.segment(r * 4, 4).sum() +
                          pl.segment(r * 4, 4).sum(),
                      4.0F);
    }
  }
}

TEST(IdentifyFeatures, TenSuitZones) {
  // Find a deal where seat 0 holds the ten of hearts.
  std::uint64_t seed = 0;
  while (!deal(seed).hands[0].contains(Card{Rank::k10, Suit::kHeart})) ++seed;
  GameState s = deal(seed);
  const auto layout = identify_layout();
  IdentifyFeatures f = build_identify_features(s, 0);
  const Eigen::Vector4f own = zone(f.state, layout, "own_tens_dealt");
  EXPECT_FLOAT_EQ(own[0], 1.0F);
  const Eigen::Vector4f others = zone(f.state, layout, "others_tens_held");
  EXPECT_FLOAT_EQ(others[0], 0.0F);
  EXPECT_EQ(others, encode_suits10(s.hands[1] | s.hands[2] | s.hands[3]));

  // Front player (seat 2) plays the ten of spades.
  GameState t = s;
  t.hands[2].insert(Card{Rank::k10, Suit::kSpade});
  for (int k = 0; k < 4; ++k) t.hands[k].erase(Card{Rank::k10, Suit::kSpade});
  t.hands[2].insert(Card{Rank::k10, Suit::kSpade});
  t.initial_hands = t.hands;
  t = step(t, t.legal().front());
  t = step(t, Move::pass());
  if (t.lead && t.lead->combination.category == Category::kSolo &&
      t.lead->combination.key_rank < Rank::k10) {
    t = step(t, Move::of(classify(cards("TS"))));
    const IdentifyFeatures g = build_identify_features(t, 0);
    EXPECT_EQ(Eigen::Vector4f(zone(g.state, layout, "front_tens_played")),
              Eigen::Vector4f(0, 0, 0, 1));
  }
}

TEST(IdentifyFeatures, AllTensPlayedExhaustsOthers) {
  GameState s = deal(5);
  for (int k = 0; k < 4; ++k) {
    s.hands[k] -= kAllTens;
    s.initial_hands[k] = s.hands[k];
  }
  s.history.push_back({1, Move::of(classify(kAllTens))});
  s.initial_hands[1] |= kAllTens;
  const IdentifyFeatures f = build_identify_features(s, 0);
  EXPECT_TRUE(zone(f.state, identify_layout(), "others_tens_held").isZero());
  EXPECT_EQ(Eigen::Vector4f(zone(f.state, identify_layout(), "down_tens_played")),
            Eigen::Vector4f(1, 1, 1, 1));
}

}  // namespace
}  // namespace red10
