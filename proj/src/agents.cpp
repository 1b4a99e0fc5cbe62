#include "red10/agents.hpp"

#include <algorithm>
#include <sstream>

namespace red10 {

InsightRecord identify(const IdentifyNets& nets, const GameState& state, int seat,
                       std::optional<double> constant_risk) {
  const IdentifyFeatures f = build_identify_features(state, seat);
  InsightRecord rec;
  rec.t = state.t();
  rec.seat = seat;
  rec.c = relation_forward(nets.relation, f);
  rec.d = constant_risk ? static_cast<float>(*constant_risk) : danger_forward(nets.danger, f);
  rec.mask = decide_mask(rec.c, rec.d);
  return rec;
}

Move idrl_act(const Models& models, const GameState& state, int seat, const IdrlOptions& options,
              Rng& rng, InsightRecord* insight) {
  InsightRecord rec = identify(models.identify, state, seat, options.constant_risk);
  if (options.mask_override) {
    if (auto m = options.mask_override(state, seat)) rec.mask = *m;
  }
  const std::vector<Move> moves = state.legal();
  const std::size_t pick =
      select_action(models.bank.head(rec.mask), state, seat, moves, options.epsilon, rng);
  rec.move = moves[pick];
  if (insight) *insight = rec;
  return moves[pick];
}

Move random_act(const GameState& state, Rng& rng) {
  const std::vector<Move> moves = state.legal();
  return moves[uniform_index(rng, moves.size())];
}

Move rule_act(const GameState& state) {
  const std::vector<Move> moves = state.legal();
  const Move* best = nullptr;
  auto key = [](const Move& m) {
    return std::make_tuple(m.play->category == Category::kBomb, m.play->key_rank,
                           m.play->cards.size());
  };
  for (const Move& m : moves) {
    if (m.is_pass()) continue;
    // Leading holds bombs back; following takes the lowest-ranked beat.
    if (!best) {
      best = &m;
      continue;
    }
    if (state.lead) {
      if (key(m) < key(*best)) best = &m;
    } else if (std::make_pair(m.play->key_rank, m.play->cards.size()) <
               std::make_pair(best->play->key_rank, best->play->cards.size())) {
      best = &m;
    }
  }
  return best ? *best : Move::pass();
}

AgentKind AgentKind::constant_risk(double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("constant risk must be in [0,1]");
  return {AgentType::kConstantRisk, {}, nu};
}

AgentKind AgentKind::parse(const std::string& text) {
  if (text == "idrl") return idrl();
  if (text == "random") return random();
  if (text == "rule" || text == "rulebased") return rule_based();
  if (text.rfind("mc:", 0) == 0) {
    const auto mask = TeamMask::parse(text.substr(3));
    if (!mask) throw std::invalid_argument("bad mask in agent kind: " + text);
    return monte_carlo(*mask);
  }
  if (text.rfind("const:", 0) == 0) {
    try {
      return constant_risk(std::stod(text.substr(6)));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("bad constant risk in agent kind: " + text);
    }
  }
  throw std::invalid_argument("unknown agent kind: " + text);
}

std::string AgentKind::to_string() const {
  switch (type) {
    case AgentType::kIdrl: return "idrl";
    case AgentType::kRandom: return "random";
    case AgentType::kRuleBased: return "rule";
    case AgentType::kMonteCarloOnly: return "mc:" + mask.bits();
    case AgentType::kConstantRisk: {
      std::ostringstream s;
      s << "const:" << nu;
      return s.str();
    }
  }
  return "?";
}

namespace {

class IdrlAgent : public Agent {
 public:
  IdrlAgent(std::shared_ptr<const Models> models, IdrlOptions options)
      : models_(std::move(models)), options_(std::move(options)) {}

  Move act(const GameState& state, Rng& rng) override {
    InsightRecord rec;
    Move m = idrl_act(*models_, state, state.turn, options_, rng, &rec);
    insights_.push_back(std::move(rec));
    return m;
  }

 private:
  std::shared_ptr<const Models> models_;
  IdrlOptions options_;
};

class MonteCarloAgent : public Agent {
 public:
  MonteCarloAgent(std::shared_ptr<const Models> models, TeamMask mask, double epsilon)
      : models_(std::move(models)), mask_(mask), epsilon_(epsilon) {}

  Move act(const GameState& state, Rng& rng) override {
    const std::vector<Move> moves = state.legal();
    return moves[select_action(models_->bank.head(mask_), state, state.turn, moves, epsilon_, rng)];
  }

 private:
  std::shared_ptr<const Models> models_;
  TeamMask mask_;
  double epsilon_;
};

class RandomAgent : public Agent {
 public:
  Move act(const GameState& state, Rng& rng) override { return random_act(state, rng); }
};

class RuleAgent : public Agent {
 public:
  Move act(const GameState& state, Rng&) override { return rule_act(state); }
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentKind& kind, std::shared_ptr<const Models> models,
                                  IdrlOptions options) {
  if (kind.needs_models() && !models) {
    throw std::invalid_argument("agent " + kind.to_string() + " needs trained models");
  }
  switch (kind.type) {
    case AgentType::kIdrl:
      return std::make_unique<IdrlAgent>(std::move(models), std::move(options));
    case AgentType::kConstantRisk:
      options.constant_risk = kind.nu;
      return std::make_unique<IdrlAgent>(std::move(models), std::move(options));
    case AgentType::kMonteCarloOnly:
      return std::make_unique<MonteCarloAgent>(std::move(models), kind.mask, options.epsilon);
    case AgentType::kRandom:
      return std::make_unique<RandomAgent>();
    case AgentType::kRuleBased:
      return std::make_unique<RuleAgent>();
  }
  return nullptr;
}

GameState play_deck(GameState state, const std::array<Agent*, kNumSeats>& agents, Rng& rng) {
  while (!state.terminal()) {
    const Move m = agents[state.turn]->act(state, rng);
    state = step(state, m);
  }
  return state;
}

}  // namespace red10
