#include "red10/training.hpp"

#include <memory>
#include <thread>

namespace red10 {
namespace fs = std::filesystem;

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kPolicy: return "policy";
    case Phase::kIdentify: return "identify";
    case Phase::kFinetune: return "finetune";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (Phase p : {Phase::kPolicy, Phase::kIdentify, Phase::kFinetune}) {
    if (phase_name(p) == name) return p;
  }
  return std::nullopt;
}

void TrainRun::validate() const {
  rl.validate();
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid training run: ") + what);
  };
  require(actors >= 1, "actors must be >= 1");
  require(decks >= 0, "decks must be >= 0");
  require(!dir.empty(), "checkpoint directory is required");
  require(cooperative_fraction >= 0 && cooperative_fraction <= 1,
          "cooperative_fraction must be in [0,1]");
  require(buffer_batches >= 1, "buffer_batches must be >= 1");
  require(net.lstm_hidden > 0 && net.width > 0, "network widths must be > 0");
  require(deck.size() > 0 && deck.size() % kNumSeats == 0, "deck must split evenly");
  require(!(rule_seats[0] && rule_seats[1] && rule_seats[2] && rule_seats[3]),
          "at least one seat must learn");
}

nlohmann::json LogRecord::to_json() const {
  return {{"step", step},       {"phase", phase_name(phase)}, {"channel", channel},
          {"loss", loss},       {"decks", decks},             {"buffer_depth", buffer_depth}};
}

Eigen::Matrix<float, kNumMasks, 1> head_values(const PolicyBank& bank, const GameState& state,
                                               int seat) {
  const QStateFeatures s = build_q_state(state, seat);
  const std::vector<Move> moves = state.legal();
  Eigen::Matrix<float, kNumMasks, 1> out;
  for (int m = 0; m < kNumMasks; ++m) out[m] = q_values(bank.heads[m], s, moves).maxCoeff();
  return out;
}

DeckData play_training_deck(const Models& models, const DeckPlan& plan, const RLConfig& rl,
                            Rng& rng) {
  DeckData out;
  GameState s = plan.start;
  std::array<std::vector<Transition>, kNumSeats> seat_steps;
  std::vector<int> sample_turns;
  const bool want_samples = plan.phase != Phase::kPolicy;
  while (!s.terminal()) {
    const int seat = s.turn;
    Move move;
    if (plan.rule_seats[seat]) {
      move = rule_act(s);
    } else {
      const TeamMask mask = plan.phase == Phase::kFinetune
                                ? identify(models.identify, s, seat, rl.constant_risk).mask
                                : ground_truth_mask(s.layout, seat);
      const std::vector<Move> moves = s.legal();
      QStateFeatures q = build_q_state(s, seat);
      move = moves[select_action(models.bank.head(mask), q, moves, plan.epsilon, rng)];
      if (plan.policy_transitions) {
        Transition tr;
        tr.state = std::move(q.state);
        tr.history = std::move(q.history);
        tr.action = encode_cards(move.cards());
        tr.mask = mask;
        tr.seat = seat;
        seat_steps[seat].push_back(std::move(tr));
      }
      if (want_samples) {
        IdentifySample sample;
        sample.features = build_identify_features(s, seat);
        if (plan.head_values) sample.head_values = head_values(models.bank, s, seat);
        out.samples.push_back(std::move(sample));
        sample_turns.push_back(s.t());
      }
      ++out.decisions;
    }
    s = step(s, move);
  }

  const double gamma = s.layout.landlords == 0 ? rl.gamma_cooperative : rl.gamma;
  for (int seat = 0; seat < kNumSeats; ++seat) {
    if (seat_steps[seat].empty()) continue;
    Trajectory tr{std::move(seat_steps[seat]), true};
    tr.steps.back().reward = terminal_reward(s, seat);
    mc_returns(tr, gamma);
    for (Transition& t : tr.steps) out.transitions[t.mask.index()].push_back(std::move(t));
  }
  if (want_samples) {
    const float total = static_cast<float>(s.t());
    std::size_t k = 0;
    for (IdentifySample& sample : out.samples) {
      const int t = sample_turns[k++];
      const int seat = s.history[t].seat;
      const TeamMask truth = ground_truth_mask(s.layout, seat);
      sample.target_r = {truth.up ? 1.0F : 0.0F, truth.front ? 1.0F : 0.0F, truth.down ? 1.0F : 0.0F};
      sample.target_d = static_cast<float>(t) / total;
    }
  }
  out.final_state = std::move(s);
  return out;
}

fs::path head_dir(const fs::path& dir, TeamMask m) { return dir / ("q_" + m.bits()); }

void save_models(const fs::path& dir, const Models& models, const nlohmann::json& metadata,
                 bool bank, bool identify) {
  if (bank) {
    for (int m = 0; m < kNumMasks; ++m) {
      nlohmann::json meta = metadata;
      meta["mask"] = TeamMask::from_index(m).bits();
      nn::ParamStore store(models.bank.heads[m]);
      nn::save_checkpoint(head_dir(dir, TeamMask::from_index(m)), store, meta);
    }
  }
  if (identify) {
    nn::save_checkpoint(dir / "relation", nn::ParamStore(models.identify.relation), metadata);
    nn::save_checkpoint(dir / "danger", nn::ParamStore(models.identify.danger), metadata);
  }
}

namespace {

nn::ParamStore require(const fs::path& dir) {
  if (!nn::has_checkpoint(dir)) throw nn::MissingCheckpoint("missing checkpoint " + dir.string());
  return nn::load_checkpoint(dir);
}

}  // namespace

PolicyBank load_bank(const fs::path& dir) {
  PolicyBank bank;
  for (int m = 0; m < kNumMasks; ++m) bank.heads[m] = require(head_dir(dir, TeamMask::from_index(m))).params;
  return bank;
}

IdentifyNets load_identify(const fs::path& dir) {
  return {require(dir / "relation").params, require(dir / "danger").params};
}

Models load_models(const fs::path& dir) { return {load_bank(dir), load_identify(dir)}; }

namespace {

constexpr int kIdentifyChannel = kNumMasks;

// Learner-side state for one phase: the parameter stores, their buffers and
// a versioned snapshot board the actors read from.
class Trainer {
 public:
  using Versions = std::array<std::uint64_t, kNumMasks + 2>;

  Trainer(const TrainRun& run, Models start, const Versions& versions)
      : run_(run), models_(std::move(start)) {
    const std::size_t cap = static_cast<std::size_t>(run.buffer_batches) * run.rl.batch_size;
    train_bank_ = run.phase == Phase::kPolicy || run.finetune_policy;
    train_identify_ = run.phase != Phase::kPolicy;
    for (int m = 0; m < kNumMasks; ++m) {
      heads_[m] = nn::ParamStore(models_.bank.heads[m]);
      qbuf_[m] = std::make_unique<SharedBuffer<Transition>>(cap);
    }
    relation_ = nn::ParamStore(models_.identify.relation);
    danger_ = nn::ParamStore(models_.identify.danger);
    for (int m = 0; m < kNumMasks; ++m) heads_[m].version = versions[m];
    relation_.version = versions[kNumMasks];
    danger_.version = versions[kNumMasks + 1];
    ibuf_ = std::make_unique<SharedBuffer<IdentifySample>>(cap);
    snapshot_ = std::make_shared<const Models>(models_);
    if (run.keep_finals) finals_.resize(static_cast<std::size_t>(run.decks));
  }

  PhaseResult run() {
    if (run_.deterministic) {
      run_sequential();
    } else {
      run_threaded();
    }
    PhaseResult out;
    out.decks = decks_done_;
    out.log = std::move(log_);
    for (int m = 0; m < kNumMasks; ++m) {
      out.pushed[m] = qbuf_[m]->pushed();
      out.popped[m] = qbuf_[m]->popped();
      out.transitions += out.pushed[m];
    }
    out.samples_pushed = ibuf_->pushed();
    out.samples_popped = ibuf_->popped();
    out.finals = std::move(finals_);
    return out;
  }

  void save(const fs::path& dir, const nlohmann::json& meta, bool bank, bool identify) const {
    if (bank) {
      for (int m = 0; m < kNumMasks; ++m) {
        nlohmann::json head_meta = meta;
        head_meta["mask"] = TeamMask::from_index(m).bits();
        nn::save_checkpoint(head_dir(dir, TeamMask::from_index(m)), heads_[m], head_meta);
      }
    }
    if (identify) {
      nn::save_checkpoint(dir / "relation", relation_, meta);
      nn::save_checkpoint(dir / "danger", danger_, meta);
    }
  }

 private:
  struct Local {
    std::array<std::vector<Transition>, kNumMasks> q;
    std::vector<IdentifySample> samples;
  };

  DeckPlan plan(long long k, Rng& rng) const {
    DeckPlan p;
    p.phase = run_.phase;
    const std::uint64_t deal_seed = run_.fixed_deal ? *run_.fixed_deal : mix_seed(run_.seed, k);
    p.start = deal(deal_seed, run_.deck);
    if (run_.phase == Phase::kPolicy && uniform01(rng) < run_.cooperative_fraction) {
      p.start.layout = TeamLayout::all_cooperative();
    }
    p.epsilon = run_.rl.epsilon;
    p.rule_seats = run_.rule_seats;
    p.policy_transitions = train_bank_;
    p.head_values = run_.phase == Phase::kFinetune;
    return p;
  }

  Rng deck_rng(long long k) const { return Rng(mix_seed(mix_seed(run_.seed, 0x5eed), k)); }

  void collect(Local& local, long long k, DeckData&& d) {
    if (run_.keep_finals) {
      std::lock_guard lock(log_mu_);
      finals_[static_cast<std::size_t>(k)] = std::move(d.final_state);
    }
    const std::size_t bs = static_cast<std::size_t>(run_.rl.flush_size);
    for (int m = 0; m < kNumMasks; ++m) {
      if (!train_bank_) break;
      auto& dst = local.q[m];
      for (auto& t : d.transitions[m]) dst.push_back(std::move(t));
      if (dst.size() >= bs) {
        qbuf_[m]->push(std::move(dst));
        dst.clear();
      }
    }
    if (train_identify_) {
      for (auto& s : d.samples) local.samples.push_back(std::move(s));
      if (local.samples.size() >= bs) {
        ibuf_->push(std::move(local.samples));
        local.samples.clear();
      }
    }
  }

  void flush(Local& local) {
    for (int m = 0; m < kNumMasks; ++m) {
      if (!local.q[m].empty()) qbuf_[m]->push(std::move(local.q[m]));
      local.q[m].clear();
    }
    if (!local.samples.empty()) ibuf_->push(std::move(local.samples));
    local.samples.clear();
  }

  // One learner update on channel `c`.
  void update(int c, std::vector<Transition>* q, std::vector<IdentifySample>* samples) {
    LogRecord rec;
    rec.phase = run_.phase;
    if (c < kNumMasks) {
      rec.channel = "q_" + TeamMask::from_index(c).bits();
      rec.loss = learner_update(heads_[c], *q, run_.rl.learning_rate);
      rec.step = static_cast<long long>(heads_[c].version);
      rec.buffer_depth = qbuf_[c]->resident();
      publish_head(c);
    } else {
      rec.channel = "identify";
      const RdBatch<float> batch = make_rd_batch(*samples);
      if (run_.phase == Phase::kIdentify) {
        const RdLoss<float> l = loss_rd(relation_.params, danger_.params, batch);
        nn::optimize_step(relation_, l.relation_grad, run_.rl.learning_rate, nn::Direction::kDescend);
        nn::optimize_step(danger_, l.danger_grad, run_.rl.learning_rate, nn::Direction::kDescend);
        rec.loss = l.loss;
      } else {
        const IntrinsicGradient<float> g = intrinsic_gradient(
            relation_.params, danger_.params, batch, static_cast<float>(run_.rl.lambda),
            static_cast<float>(run_.rl.temperature));
        nn::optimize_step(relation_, g.relation, run_.rl.learning_rate, nn::Direction::kAscend);
        nn::optimize_step(danger_, g.danger, run_.rl.learning_rate, nn::Direction::kAscend);
        rec.loss = g.loss_rd;
      }
      rec.step = static_cast<long long>(relation_.version);
      rec.buffer_depth = ibuf_->resident();
      publish_identify();
    }
    rec.decks = decks_done_;
    std::lock_guard lock(log_mu_);
    if (run_.log) *run_.log << rec.to_json().dump() << '\n';
    log_.push_back(std::move(rec));
  }

  void publish_head(int m) {
    std::lock_guard lock(board_mu_);
    auto next = std::make_shared<Models>(*snapshot_);
    next->bank.heads[m] = heads_[m].params;
    snapshot_ = std::move(next);
  }

  void publish_identify() {
    std::lock_guard lock(board_mu_);
    auto next = std::make_shared<Models>(*snapshot_);
    next->identify.relation = relation_.params;
    next->identify.danger = danger_.params;
    snapshot_ = std::move(next);
  }

  std::shared_ptr<const Models> snapshot() const {
    std::lock_guard lock(board_mu_);
    return snapshot_;
  }

  void run_sequential() {
    const std::size_t m = static_cast<std::size_t>(run_.rl.batch_size);
    Local local;
    for (long long k = 0; k < run_.decks; ++k) {
      const auto models = snapshot();
      Rng rng = deck_rng(k);
      collect(local, k, play_training_deck(*models, plan(k, rng), run_.rl, rng));
      ++decks_done_;
      for (int c = 0; c < kNumMasks; ++c) {
        while (auto batch = qbuf_[c]->try_pop(m)) update(c, &*batch, nullptr);
      }
      while (auto batch = ibuf_->try_pop(m)) update(kIdentifyChannel, nullptr, &*batch);
    }
    flush(local);
  }

  void run_threaded() {
    const std::size_t m = static_cast<std::size_t>(run_.rl.batch_size);
    std::atomic<long long> next{0};
    std::vector<std::thread> learners;
    for (int c = 0; c < kNumMasks && train_bank_; ++c) {
      learners.emplace_back([this, c, m] {
        while (auto batch = qbuf_[c]->pop(m)) update(c, &*batch, nullptr);
      });
    }
    if (train_identify_) {
      learners.emplace_back([this, m] {
        while (auto batch = ibuf_->pop(m)) update(kIdentifyChannel, nullptr, &*batch);
      });
    }
    std::vector<std::thread> actors;
    for (int a = 0; a < run_.actors; ++a) {
      actors.emplace_back([this, &next] {
        Local local;
        for (long long k = next++; k < run_.decks; k = next++) {
          const auto models = snapshot();
          Rng rng = deck_rng(k);
          collect(local, k, play_training_deck(*models, plan(k, rng), run_.rl, rng));
          ++decks_done_;
        }
        flush(local);
      });
    }
    for (auto& t : actors) t.join();
    for (auto& b : qbuf_) b->close();
    ibuf_->close();
    for (auto& t : learners) t.join();
  }

  const TrainRun& run_;
  Models models_;
  bool train_bank_ = true;
  bool train_identify_ = false;
  std::array<nn::ParamStore, kNumMasks> heads_;
  nn::ParamStore relation_;
  nn::ParamStore danger_;
  std::array<std::unique_ptr<SharedBuffer<Transition>>, kNumMasks> qbuf_;
  std::unique_ptr<SharedBuffer<IdentifySample>> ibuf_;
  mutable std::mutex board_mu_;
  std::shared_ptr<const Models> snapshot_;
  std::mutex log_mu_;
  std::vector<LogRecord> log_;
  std::vector<GameState> finals_;
  std::atomic<long long> decks_done_{0};
};

nlohmann::json run_metadata(const TrainRun& run, long long decks) {
  return {{"phase", phase_name(run.phase)},
          {"seed", run.seed},
          {"decks", decks},
          {"config", run.config_echo}};
}

}  // namespace

PhaseResult run_phase(const TrainRun& run) {
  run.validate();
  Models start;
  Trainer::Versions versions{};
  const nn::NetSpec q_spec = default_q_spec(run.net.lstm_hidden, run.net.width);
  const nn::NetSpec r_spec = default_relation_spec(run.net.lstm_hidden, run.net.width);
  const nn::NetSpec d_spec = default_danger_spec(run.net.lstm_hidden, run.net.width);
  if (run.phase == Phase::kPolicy) {
    start.bank = PolicyBank::init(q_spec, run.seed);
  } else {
    for (int m = 0; m < kNumMasks; ++m) {
      nn::ParamStore head = require(head_dir(run.dir, TeamMask::from_index(m)));
      start.bank.heads[m] = std::move(head.params);
      versions[m] = head.version;
    }
  }
  if (run.phase == Phase::kFinetune) {
    nn::ParamStore relation = require(run.dir / "relation");
    nn::ParamStore danger = require(run.dir / "danger");
    start.identify = {std::move(relation.params), std::move(danger.params)};
    versions[kNumMasks] = relation.version;
    versions[kNumMasks + 1] = danger.version;
    const fs::path pre = run.dir / "pre_finetune";
    fs::create_directories(pre);
    for (const char* net : {"relation", "danger"}) {
      fs::remove_all(pre / net);
      fs::copy(run.dir / net, pre / net, fs::copy_options::recursive);
    }
  } else {
    start.identify = IdentifyNets::init(r_spec, d_spec, run.seed);
  }
  Trainer trainer(run, std::move(start), versions);
  PhaseResult result = trainer.run();
  const nlohmann::json meta = run_metadata(run, result.decks);
  switch (run.phase) {
    case Phase::kPolicy:
      trainer.save(run.dir, meta, true, false);
      break;
    case Phase::kIdentify:
      trainer.save(run.dir, meta, false, true);
      break;
    case Phase::kFinetune:
      trainer.save(run.dir, meta, run.finetune_policy, true);
      break;
  }
  return result;
}

}  // namespace red10
