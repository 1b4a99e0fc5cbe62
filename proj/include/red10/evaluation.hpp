#ifndef RED10_EVALUATION_HPP_
#define RED10_EVALUATION_HPP_

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "red10/agents.hpp"

namespace red10 {

struct MatchResult {
  int pair = 0;                 // paired deck index
  std::uint64_t deck_seed = 0;  // identical across the two assignments
  bool x_at_seat0 = true;
  PatternId pattern = PatternId::k1100;
  Team seat0_team = Team::kPeasant;
  Team winner = Team::kPeasant;
  std::array<char, kNumSeats> controllers{};  // 'X' or 'Y'

  // X scores iff the seat-0 team wins while X holds seat 0, or loses while
  // X holds seats 1-3.
  bool x_scores() const { return (winner == seat0_team) == x_at_seat0; }
};

struct MatchOptions {
  int threads = 1;
  double epsilon = 0.0;
};

// Plays ceil(decks / 2) paired deals, each once with X at seat 0 against Y
// at seats 1-3 and once swapped. Results are ordered by pair, X-first.
std::vector<MatchResult> play_match(const AgentKind& x, const AgentKind& y,
                                    std::shared_ptr<const Models> x_models,
                                    std::shared_ptr<const Models> y_models, int decks,
                                    std::uint64_t seed, const MatchOptions& options = {});

struct Tally {
  int decks = 0;
  int x_score = 0;
  double rate() const { return decks ? static_cast<double>(x_score) / decks : 0.0; }
};

struct WinRateReport {
  int decks = 0;
  int x_score = 0;
  double rate = 0.0;
  double ci95 = 0.0;  // normal-approximation half width
  std::map<std::string, Tally> by_pattern;        // "P1100", ...
  std::map<std::string, Tally> by_seat0_identity;  // "Landlord" / "Peasant"

  nlohmann::json to_json() const;
};

WinRateReport normalized_win_rate(const std::vector<MatchResult>& results);

// One line per result: pair,deck_seed,x_at_seat0,pattern,seat0_team,winner,controllers
void write_results(std::ostream& out, const std::vector<MatchResult>& results);

struct DangerConstant {
  double nu = 0.5;
};
struct NoIdentification {};
using Ablation = std::variant<DangerConstant, NoIdentification>;

AgentKind ablated_kind(const Ablation& a);
// Full IDRL against the ablated variant, both on the same models.
WinRateReport run_ablation(const Ablation& a, std::shared_ptr<const Models> models, int decks,
                           std::uint64_t seed, const MatchOptions& options = {});

// Identification outputs of every seat before every turn of a deck, the
// acting seat's row carrying its move.
struct CurveRow {
  int deck = 0;
  InsightRecord record;
  std::string event;  // "red10" / "black10" when the acting seat plays a ten
};

std::vector<CurveRow> deck_curves(const IdentifyNets& nets, const GameState& final_state,
                                  int deck, std::optional<double> constant_risk = std::nullopt);

inline constexpr const char* kCurveHeader = "deck,turn,seat,c_up,c_front,c_down,d,mask,move,event";
void write_curves(std::ostream& out, const std::vector<CurveRow>& rows);

// Plays `decks` seeded decks with IDRL at every seat and exports their curves.
std::vector<CurveRow> export_curves(std::shared_ptr<const Models> models, int decks,
                                    std::uint64_t seed);

struct IdentificationMetrics {
  double danger_mae = 0.0;
  std::size_t decisions = 0;
  double teammate_confidence = 0.0;  // mean after both red tens are out
  double opponent_confidence = 0.0;
  std::size_t exposed_pairs = 0;
};

// Held-out decks played by the bank under ground-truth masks.
IdentificationMetrics identification_metrics(const Models& models, int decks, std::uint64_t seed);

// Decks per second of an IDRL-vs-Random match.
double tournament_throughput(std::shared_ptr<const Models> models, int decks, std::uint64_t seed);

}  // namespace red10

#endif  // RED10_EVALUATION_HPP_
