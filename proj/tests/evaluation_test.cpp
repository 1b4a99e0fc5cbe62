#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "red10/evaluation.hpp"

#ifndef RED10_TEST_DATA
#error "RED10_TEST_DATA must point at tests/data"
#endif

namespace red10 {
namespace {

std::shared_ptr<const Models> tiny_models(std::uint64_t seed) {
  auto m = std::make_shared<Models>();
  m->bank = PolicyBank::init(default_q_spec(4, 8), seed);
  m->identify = IdentifyNets::init(default_relation_spec(4, 8), default_danger_spec(4, 8), seed);
  return m;
}

MatchResult fake(bool x_first, Team seat0, Team winner) {
  MatchResult r;
  r.x_at_seat0 = x_first;
  r.seat0_team = seat0;
  r.winner = winner;
  return r;
}

TEST(WinRate, Examples) {
  std::vector<MatchResult> all_x;
  for (int k = 0; k < 10; ++k) {
    all_x.push_back(fake(true, Team::kPeasant, Team::kPeasant));
    all_x.push_back(fake(false, Team::kPeasant, Team::kLandlord));
  }
  EXPECT_DOUBLE_EQ(normalized_win_rate(all_x).rate, 1.0);

  std::vector<MatchResult> alt;
  for (int k = 0; k < 10; ++k) {
    alt.push_back(fake(true, Team::kLandlord, k % 2 ? Team::kLandlord : Team::kPeasant));
    alt.push_back(fake(false, Team::kLandlord, k % 2 ? Team::kLandlord : Team::kPeasant));
  }
  EXPECT_DOUBLE_EQ(normalized_win_rate(alt).rate, 0.5);
  EXPECT_THROW(normalized_win_rate({}), std::invalid_argument);
}

TEST(Match, RandomSelfPlayIsEven) {
  const auto r = normalized_win_rate(play_match(AgentKind::random(), AgentKind::random(), nullptr,
                                                nullptr, 2000, 1));
  EXPECT_EQ(r.decks, 2000);
  EXPECT_NEAR(r.rate, 0.5, 0.03);
}

TEST(Match, PairedDeals) {
  const auto results = play_match(AgentKind::rule_based(), AgentKind::random(), nullptr, nullptr, 40, 3);
  ASSERT_EQ(results.size(), 40U);
  for (std::size_t i = 0; i < results.size(); i += 2) {
    EXPECT_TRUE(results[i].x_at_seat0);
    EXPECT_FALSE(results[i + 1].x_at_seat0);
    EXPECT_EQ(results[i].deck_seed, results[i + 1].deck_seed);
    EXPECT_EQ(results[i].pattern, results[i + 1].pattern);
    EXPECT_EQ(std::string(results[i].controllers.begin(), results[i].controllers.end()), "XYYY");
    EXPECT_EQ(std::string(results[i + 1].controllers.begin(), results[i + 1].controllers.end()), "YXXX");
  }
  // An odd budget rounds up to whole pairs.
  EXPECT_EQ(play_match(AgentKind::random(), AgentKind::random(), nullptr, nullptr, 3, 3).size(), 4U);
}

TEST(Match, RuleBasedBeatsRandomGolden) {
  const auto results = play_match(AgentKind::rule_based(), AgentKind::random(), nullptr, nullptr, 2000, 7);
  const auto r = normalized_win_rate(results);
  EXPECT_GT(r.rate, 0.5);
  std::ifstream golden(std::string(RED10_TEST_DATA) + "/rule_vs_random.golden");
  int expected = -1;
  golden >> expected;
  EXPECT_EQ(r.x_score, expected);
  int by_pattern = 0;
  for (const auto& [k, t] : r.by_pattern) by_pattern += t.decks;
  EXPECT_EQ(by_pattern, r.decks);
}

TEST(Match, LabelSwapComplements) {
  const auto a = normalized_win_rate(play_match(AgentKind::rule_based(), AgentKind::random(), nullptr, nullptr, 400, 11));
  const auto b = normalized_win_rate(play_match(AgentKind::random(), AgentKind::rule_based(), nullptr, nullptr, 400, 11));
  EXPECT_EQ(a.x_score + b.x_score, a.decks);
}

TEST(Match, ThreadedEqualsSequential) {
  const auto models = tiny_models(2);
  MatchOptions threaded;
  threaded.threads = 3;
  const auto a = play_match(AgentKind::idrl(), AgentKind::random(), models, nullptr, 20, 5);
  const auto b = play_match(AgentKind::idrl(), AgentKind::random(), models, nullptr, 20, 5, threaded);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].winner, b[i].winner);
}

TEST(Match, IndependentTallyOfResultFile) {
  const auto results = play_match(AgentKind::rule_based(), AgentKind::random(), nullptr, nullptr, 300, 13);
  std::stringstream file;
  write_results(file, results);
  // Re-tally from the text alone.
  std::string line;
  std::getline(file, line);
  EXPECT_EQ(line, "pair,deck_seed,x_at_seat0,pattern,seat0_team,winner,controllers");
  int decks = 0, score = 0;
  while (std::getline(file, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 7U);
    const bool seat0_won = f[4] == f[5];
    const bool x_first = f[2] == "1";
    score += (x_first ? seat0_won : !seat0_won) ? 1 : 0;
    ++decks;
  }
  const auto r = normalized_win_rate(results);
  EXPECT_EQ(decks, r.decks);
  EXPECT_EQ(score, r.x_score);
}

TEST(Curves, FormatAndEvents) {
  const auto models = tiny_models(4);
  const auto rows = export_curves(models, 3, 21);
  std::stringstream out;
  write_curves(out, rows);
  std::string header;
  std::getline(out, header);
  std::ifstream golden(std::string(RED10_TEST_DATA) + "/curves_header.golden");
  std::string expected;
  std::getline(golden, expected);
  EXPECT_EQ(header, expected);
  std::string line;
  std::size_t n = 0;
  while (std::getline(out, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
    ++n;
  }
  EXPECT_EQ(n, rows.size());

  // Replay deck 0 and compare red-ten events to its history.
  std::array<std::unique_ptr<Agent>, 4> owned;
  std::array<Agent*, 4> seats{};
  for (int s = 0; s < 4; ++s) {
    owned[s] = make_agent(AgentKind::idrl(), models);
    seats[s] = owned[s].get();
  }
  const std::uint64_t seed0 = mix_seed(21, 0);
  Rng rng(seed0);
  const GameState g = play_deck(deal(seed0), seats, rng);
  std::size_t flagged = 0;
  for (const CurveRow& r : rows) {
    if (r.deck != 0) continue;
    const bool red = (g.history[r.record.t].move.cards() & kRedTens).size() > 0;
    if (r.event.find("red10") != std::string::npos) {
      ++flagged;
      EXPECT_TRUE(red);
      EXPECT_EQ(r.record.seat, g.history[r.record.t].seat);
    }
    if (r.record.move) {
      EXPECT_EQ(r.record.seat, g.history[r.record.t].seat);
      EXPECT_EQ(*r.record.move, g.history[r.record.t].move);
    }
  }
  std::size_t red_turns = 0;
  for (const Turn& t : g.history) red_turns += (t.move.cards() & kRedTens).size() > 0;
  EXPECT_EQ(flagged, red_turns);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const CurveRow& r) { return r.deck == 0; }),
            static_cast<long>(4 * g.history.size()));
}

TEST(Ablation, KindsAndSmoke) {
  EXPECT_EQ(ablated_kind(DangerConstant{0.4}).to_string(), "const:0.4");
  EXPECT_EQ(ablated_kind(NoIdentification{}).to_string(), "mc:000");
  const auto r = run_ablation(NoIdentification{}, tiny_models(1), 10, 1);
  EXPECT_EQ(r.decks, 10);
  EXPECT_GE(r.rate, 0.0);
  EXPECT_LE(r.rate, 1.0);
}

TEST(Metrics, Smoke) {
  const auto models = tiny_models(3);
  const auto m = identification_metrics(*models, 5, 1);
  EXPECT_GT(m.decisions, 0U);
  EXPECT_GE(m.danger_mae, 0.0);
  EXPECT_LE(m.danger_mae, 1.0);
}

}  // namespace
}  // namespace red10
