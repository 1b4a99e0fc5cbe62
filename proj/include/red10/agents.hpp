#ifndef RED10_AGENTS_HPP_
#define RED10_AGENTS_HPP_

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "red10/identify.hpp"
#include "red10/policy.hpp"

namespace red10 {

// Everything a trained agent needs: the policy bank and the identification
// networks.
struct Models {
  PolicyBank bank;
  IdentifyNets identify;
};

struct InsightRecord {
  int t = 0;
  int seat = 0;
  ConfidenceVector c = ConfidenceVector::Zero();
  float d = 0.0F;
  TeamMask mask;
  std::optional<Move> move;  // set for the acting seat once it has moved
};

// Identification outputs for `seat` at `state`. A constant risk replaces the
// danger network.
InsightRecord identify(const IdentifyNets& nets, const GameState& state, int seat,
                       std::optional<double> constant_risk = std::nullopt);

struct IdrlOptions {
  double epsilon = 0.0;
  std::optional<double> constant_risk;
  // When set and returning a mask, replaces the identified mask.
  std::function<std::optional<TeamMask>(const GameState&, int)> mask_override;
};

// identify -> pick the policy head for the decided mask -> epsilon-greedy move.
Move idrl_act(const Models& models, const GameState& state, int seat, const IdrlOptions& options,
              Rng& rng, InsightRecord* insight = nullptr);
Move random_act(const GameState& state, Rng& rng);
// Leads the lowest-ranked smallest combination; follows with the lowest
// beating non-bomb, then the lowest bomb, else passes.
Move rule_act(const GameState& state);

enum class AgentType { kIdrl, kMonteCarloOnly, kRandom, kRuleBased, kConstantRisk };

struct AgentKind {
  AgentType type = AgentType::kRandom;
  TeamMask mask;      // MonteCarloOnly
  double nu = 0.5;    // ConstantRisk

  static AgentKind idrl() { return {AgentType::kIdrl, {}, 0.5}; }
  static AgentKind monte_carlo(TeamMask m) { return {AgentType::kMonteCarloOnly, m, 0.5}; }
  static AgentKind random() { return {AgentType::kRandom, {}, 0.5}; }
  static AgentKind rule_based() { return {AgentType::kRuleBased, {}, 0.5}; }
  static AgentKind constant_risk(double nu);

  bool needs_models() const { return type != AgentType::kRandom && type != AgentType::kRuleBased; }
  bool needs_identify() const { return type == AgentType::kIdrl || type == AgentType::kConstantRisk; }
  // "idrl", "random", "rule", "mc:010", "const:0.4"
  static AgentKind parse(const std::string& text);
  std::string to_string() const;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Move act(const GameState& state, Rng& rng) = 0;
  const std::vector<InsightRecord>& insights() const { return insights_; }
  void clear_insights() { insights_.clear(); }

 protected:
  std::vector<InsightRecord> insights_;
};

std::unique_ptr<Agent> make_agent(const AgentKind& kind, std::shared_ptr<const Models> models,
                                  IdrlOptions options = {});

// Plays `state` to the end with one agent per seat.
GameState play_deck(GameState state, const std::array<Agent*, kNumSeats>& agents, Rng& rng);

}  // namespace red10

#endif  // RED10_AGENTS_HPP_
