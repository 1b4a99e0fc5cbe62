#include "red10/evaluation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "red10/training.hpp"

namespace red10 {

namespace {

MatchResult play_one(const AgentKind& x, const AgentKind& y,
                     const std::shared_ptr<const Models>& x_models,
                     const std::shared_ptr<const Models>& y_models, int pair, bool x_first,
                     std::uint64_t seed, const MatchOptions& options) {
  MatchResult r;
  r.pair = pair;
  r.deck_seed = mix_seed(seed, static_cast<std::uint64_t>(pair));
  r.x_at_seat0 = x_first;
  const GameState start = deal(r.deck_seed);
  r.pattern = start.layout.pattern();
  r.seat0_team = start.layout.team_of(0);

  IdrlOptions opts;
  opts.epsilon = options.epsilon;
  std::array<std::unique_ptr<Agent>, kNumSeats> owned;
  std::array<Agent*, kNumSeats> seats{};
  for (int s = 0; s < kNumSeats; ++s) {
    const bool is_x = (s == 0) == x_first;
    r.controllers[s] = is_x ? 'X' : 'Y';
    owned[s] = is_x ? make_agent(x, x_models, opts) : make_agent(y, y_models, opts);
    seats[s] = owned[s].get();
  }
  Rng rng(mix_seed(r.deck_seed, 1));
  r.winner = *play_deck(start, seats, rng).winner;
  return r;
}

std::string format_float(double v) {
  std::ostringstream s;
  s << std::setprecision(9) << v;
  return s.str();
}

}  // namespace

std::vector<MatchResult> play_match(const AgentKind& x, const AgentKind& y,
                                    std::shared_ptr<const Models> x_models,
                                    std::shared_ptr<const Models> y_models, int decks,
                                    std::uint64_t seed, const MatchOptions& options) {
  if (decks < 1) throw std::invalid_argument("decks must be >= 1");
  const int pairs = (decks + 1) / 2;
  std::vector<MatchResult> out(static_cast<std::size_t>(2 * pairs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int g = next++; g < 2 * pairs; g = next++) {
      out[g] = play_one(x, y, x_models, y_models, g / 2, g % 2 == 0, seed, options);
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

nlohmann::json WinRateReport::to_json() const {
  auto tallies = [](const std::map<std::string, Tally>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, t] : m) j[k] = {{"decks", t.decks}, {"x_score", t.x_score}, {"rate", t.rate()}};
    return j;
  };
  return {{"decks", decks},
          {"x_score", x_score},
          {"rate", rate},
          {"ci95", ci95},
          {"by_pattern", tallies(by_pattern)},
          {"by_seat0_identity", tallies(by_seat0_identity)}};
}

WinRateReport normalized_win_rate(const std::vector<MatchResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results");
  WinRateReport r;
  for (const MatchResult& m : results) {
    const int s = m.x_scores() ? 1 : 0;
    ++r.decks;
    r.x_score += s;
    auto& p = r.by_pattern["P" + std::string(pattern_name(m.pattern))];
    ++p.decks;
    p.x_score += s;
    auto& i = r.by_seat0_identity[std::string(team_name(m.seat0_team))];
    ++i.decks;
    i.x_score += s;
  }
  r.rate = static_cast<double>(r.x_score) / r.decks;
  r.ci95 = 1.96 * std::sqrt(r.rate * (1.0 - r.rate) / r.decks);
  return r;
}

void write_results(std::ostream& out, const std::vector<MatchResult>& results) {
  out << "pair,deck_seed,x_at_seat0,pattern,seat0_team,winner,controllers\n";
  for (const MatchResult& m : results) {
    out << m.pair << ',' << m.deck_seed << ',' << (m.x_at_seat0 ? 1 : 0) << ','
        << pattern_name(m.pattern) << ',' << team_name(m.seat0_team) << ',' << team_name(m.winner)
        << ',' << std::string(m.controllers.begin(), m.controllers.end()) << '\n';
  }
}

AgentKind ablated_kind(const Ablation& a) {
  if (const auto* c = std::get_if<DangerConstant>(&a)) return AgentKind::constant_risk(c->nu);
  return AgentKind::monte_carlo(TeamMask{});
}

WinRateReport run_ablation(const Ablation& a, std::shared_ptr<const Models> models, int decks,
                           std::uint64_t seed, const MatchOptions& options) {
  return normalized_win_rate(
      play_match(AgentKind::idrl(), ablated_kind(a), models, models, decks, seed, options));
}

std::vector<CurveRow> deck_curves(const IdentifyNets& nets, const GameState& final_state, int deck,
                                  std::optional<double> constant_risk) {
  std::vector<CurveRow> rows;
  GameState s = rewind(final_state);
  for (const Turn& turn : final_state.history) {
    for (int seat = 0; seat < kNumSeats; ++seat) {
      CurveRow row;
      row.deck = deck;
      row.record = identify(nets, s, seat, constant_risk);
      if (seat == turn.seat) {
        row.record.move = turn.move;
        const CardSet tens = turn.move.cards() & kAllTens;
        if ((tens & kRedTens).size() > 0) row.event = "red10";
        if ((tens - kRedTens).size() > 0) row.event += row.event.empty() ? "black10" : ";black10";
      }
      rows.push_back(std::move(row));
    }
    s = step(s, turn.move);
  }
  return rows;
}

void write_curves(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kCurveHeader << '\n';
  for (const CurveRow& r : rows) {
    const InsightRecord& x = r.record;
    out << r.deck << ',' << x.t << ',' << x.seat << ',' << format_float(x.c[0]) << ','
        << format_float(x.c[1]) << ',' << format_float(x.c[2]) << ',' << format_float(x.d) << ','
        << x.mask.bits() << ',';
    if (x.move) out << (x.move->is_pass() ? "pass" : x.move->cards().to_string());
    out << ',' << r.event << '\n';
  }
}

std::vector<CurveRow> export_curves(std::shared_ptr<const Models> models, int decks,
                                    std::uint64_t seed) {
  std::vector<CurveRow> rows;
  for (int k = 0; k < decks; ++k) {
    std::array<std::unique_ptr<Agent>, kNumSeats> owned;
    std::array<Agent*, kNumSeats> seats{};
    for (int s = 0; s < kNumSeats; ++s) {
      owned[s] = make_agent(AgentKind::idrl(), models);
      seats[s] = owned[s].get();
    }
    const std::uint64_t deck_seed = mix_seed(seed, static_cast<std::uint64_t>(k));
    Rng rng(deck_seed);
    const GameState final_state = play_deck(deal(deck_seed), seats, rng);
    auto part = deck_curves(models->identify, final_state, k);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

IdentificationMetrics identification_metrics(const Models& models, int decks, std::uint64_t seed) {
  IdentificationMetrics m;
  double abs_err = 0.0;
  double mate = 0.0;
  double opp = 0.0;
  std::size_t mates = 0;
  std::size_t opps = 0;
  for (int k = 0; k < decks; ++k) {
    DeckPlan plan;
    plan.phase = Phase::kIdentify;
    plan.start = deal(mix_seed(seed, static_cast<std::uint64_t>(k)));
    plan.policy_transitions = false;
    Rng rng(mix_seed(seed ^ 0xd1ce, static_cast<std::uint64_t>(k)));
    const DeckData d = play_training_deck(models, plan, RLConfig{}, rng);
    int red_out = 0;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
      const IdentifySample& s = d.samples[i];
      abs_err += std::abs(danger_forward(models.identify.danger, s.features) - s.target_d);
      ++m.decisions;
      if (red_out == 2) {
        const ConfidenceVector c = relation_forward(models.identify.relation, s.features);
        for (int j = 0; j < 3; ++j) {
          if (s.target_r[j] > 0.5F) {
            mate += c[j];
            ++mates;
          } else {
            opp += c[j];
            ++opps;
          }
        }
      }
      red_out += (d.final_state.history[i].move.cards() & kRedTens).size();
    }
  }
  m.danger_mae = m.decisions ? abs_err / static_cast<double>(m.decisions) : 0.0;
  m.teammate_confidence = mates ? mate / static_cast<double>(mates) : 0.0;
  m.opponent_confidence = opps ? opp / static_cast<double>(opps) : 0.0;
  m.exposed_pairs = mates + opps;
  return m;
}

double tournament_throughput(std::shared_ptr<const Models> models, int decks, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = play_match(AgentKind::idrl(), AgentKind::random(), models, nullptr, decks, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return static_cast<double>(results.size()) / secs;
}

}  // namespace red10
