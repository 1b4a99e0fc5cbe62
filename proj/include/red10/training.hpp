#ifndef RED10_TRAINING_HPP_
#define RED10_TRAINING_HPP_

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "red10/agents.hpp"
#include "red10/nn/checkpoint.hpp"

namespace red10 {

class BufferClosed : public std::runtime_error {
 public:
  BufferClosed() : std::runtime_error("buffer closed") {}
};

// Bounded multi-producer queue of item batches. Capacity counts items.
// Producers block while a batch would overflow it; the consumer pops exactly
// `m` items, splitting batches as needed.
template <typename T>
class SharedBuffer {
 public:
  explicit SharedBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(std::vector<T> batch) {
    if (batch.empty()) return;
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || resident_ == 0 || resident_ + batch.size() <= capacity_; });
    if (closed_) throw BufferClosed();
    resident_ += batch.size();
    pushed_ += batch.size();
    queue_.push_back(std::move(batch));
    not_empty_.notify_all();
  }

  // Blocks until `m` items are resident; returns nullopt once closed with
  // fewer than `m` left.
  std::optional<std::vector<T>> pop(std::size_t m) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || resident_ >= m; });
    if (resident_ < m) return std::nullopt;
    return take(m);
  }

  std::optional<std::vector<T>> try_pop(std::size_t m) {
    std::lock_guard lock(mu_);
    if (resident_ < m) return std::nullopt;
    return take(m);
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

  std::size_t pushed() const {
    std::lock_guard lock(mu_);
    return pushed_;
  }
  std::size_t popped() const {
    std::lock_guard lock(mu_);
    return popped_;
  }
  std::size_t resident() const {
    std::lock_guard lock(mu_);
    return resident_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  std::vector<T> take(std::size_t m) {
    std::vector<T> out;
    out.reserve(m);
    while (out.size() < m) {
      auto& front = queue_.front();
      const std::size_t want = m - out.size();
      if (front.size() <= want) {
        for (auto& x : front) out.push_back(std::move(x));
        queue_.pop_front();
      } else {
        for (std::size_t i = 0; i < want; ++i) out.push_back(std::move(front[i]));
        front.erase(front.begin(), front.begin() + static_cast<std::ptrdiff_t>(want));
      }
    }
    resident_ -= m;
    popped_ += m;
    not_full_.notify_all();
    return out;
  }

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<std::vector<T>> queue_;
  std::size_t resident_ = 0;
  std::size_t pushed_ = 0;
  std::size_t popped_ = 0;
  bool closed_ = false;
};

enum class Phase { kPolicy, kIdentify, kFinetune };
std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

struct NetShape {
  int lstm_hidden = 128;
  int width = 512;
};

struct TrainRun {
  Phase phase = Phase::kPolicy;
  RLConfig rl;
  NetShape net;
  int actors = 1;
  long long decks = 1000;  // budget of self-play decks
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  bool deterministic = true;  // one actor interleaved with the learners
  double cooperative_fraction = 0.1;  // decks forced to the all-cooperative layout
  bool finetune_policy = false;       // also regress the bank during fine-tuning
  int buffer_batches = 8;             // buffer capacity, in learner batches

  // Game variant: the cards in play, an optional fixed deal, and seats played
  // by the rule-based agent (never recorded).
  CardSet deck = CardSet::full_deck();
  std::optional<std::uint64_t> fixed_deal;
  std::array<bool, kNumSeats> rule_seats{};

  bool keep_finals = false;     // return every finished deck
  std::ostream* log = nullptr;  // JSON lines
  nlohmann::json config_echo = nlohmann::json::object();

  void validate() const;
};

struct LogRecord {
  long long step = 0;  // learner update index within the channel
  Phase phase = Phase::kPolicy;
  std::string channel;  // "q_<bits>" or "identify"
  double loss = 0.0;
  long long decks = 0;
  std::size_t buffer_depth = 0;

  nlohmann::json to_json() const;
};

struct PhaseResult {
  long long decks = 0;
  std::size_t transitions = 0;
  std::vector<LogRecord> log;
  std::array<std::size_t, kNumMasks> pushed{};
  std::array<std::size_t, kNumMasks> popped{};
  std::size_t samples_pushed = 0;
  std::size_t samples_popped = 0;
  std::vector<GameState> finals;  // in deck order, when requested
};

// Everything one self-play deck produced.
struct DeckData {
  GameState final_state;
  std::array<std::vector<Transition>, kNumMasks> transitions;
  std::vector<IdentifySample> samples;
  std::size_t decisions = 0;  // recorded decisions across learning seats
};

struct DeckPlan {
  Phase phase = Phase::kPolicy;
  GameState start;
  double epsilon = 0.0;
  std::array<bool, kNumSeats> rule_seats{};
  bool policy_transitions = true;
  bool head_values = false;
};

// Plays one deck. Policy phase: every learning seat follows its ground-truth
// head. Identify phase: same, recording identification samples. Finetune:
// seats follow the identified head and samples carry per-head values.
DeckData play_training_deck(const Models& models, const DeckPlan& plan, const RLConfig& rl,
                            Rng& rng);

// Greedy value of every policy head at `state` for the acting seat.
Eigen::Matrix<float, kNumMasks, 1> head_values(const PolicyBank& bank, const GameState& state,
                                               int seat);

// Checkpoint directory helpers.
std::filesystem::path head_dir(const std::filesystem::path& dir, TeamMask m);
void save_models(const std::filesystem::path& dir, const Models& models,
                 const nlohmann::json& metadata, bool bank, bool identify);
// Throws MissingCheckpoint naming the first absent piece.
PolicyBank load_bank(const std::filesystem::path& dir);
IdentifyNets load_identify(const std::filesystem::path& dir);
Models load_models(const std::filesystem::path& dir);

// Runs one training phase and writes its checkpoints into `run.dir`. The
// finetune phase first copies the identification networks it starts from
// into `<dir>/pre_finetune`.
PhaseResult run_phase(const TrainRun& run);

}  // namespace red10

#endif  // RED10_TRAINING_HPP_
