#ifndef RED10_FEATURES_HPP_
#define RED10_FEATURES_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "red10/game.hpp"

namespace red10 {

inline constexpr int kCardBlock = 52;       // one 4x13 card matrix
inline constexpr int kCountWidth = 13;      // hand-count one-hot
inline constexpr int kSuitWidth = 4;        // suits of the tens (H, D, C, S)
inline constexpr int kHistoryMoves = 20;
inline constexpr int kHistoryRows = 5;
inline constexpr int kHistoryRowWidth = 4 * kCardBlock;  // 208
inline constexpr int kQStateWidth = 9 * kCardBlock + 3 * kCountWidth;                     // 507
inline constexpr int kIdentifyStateWidth = 8 * kCardBlock + 3 * kCountWidth + 5 * kSuitWidth;  // 475
inline constexpr int kQFlatWidth = kCardBlock + kQStateWidth;                             // 559

// History window: column k is row k of the 5x208 window (oldest first).
using HistoryWindow = Eigen::MatrixXf;

// 4x13 card matrix flattened rank-major: entry rank*4 + row. The rows of a
// rank's column are filled top-down, so column sums equal rank counts.
Eigen::VectorXf encode_cards(CardSet cards);
void encode_cards_into(CardSet cards, Eigen::Ref<Eigen::VectorXf> out);

// Indicator over (Heart, Diamond, Club, Spade) for the tens in `cards`.
Eigen::Vector4f encode_suits10(CardSet cards);

// Last 20 moves, passes as zero blocks, packed oldest to newest into 5 rows
// of 4 blocks and left-padded with zeros.
HistoryWindow history_window(const std::vector<Turn>& history);

struct QFeatures {
  Eigen::VectorXf action;  // 52
  Eigen::VectorXf state;   // 507
  HistoryWindow history;   // 208 x 5

  // Network input: action followed by state (559).
  Eigen::VectorXf flat() const;
};

struct IdentifyFeatures {
  Eigen::VectorXf state;  // 475
  HistoryWindow history;  // 208 x 5
};

// The 507-wide state part and history of the Q input; shared across actions.
struct QStateFeatures {
  Eigen::VectorXf state;
  HistoryWindow history;
};
QStateFeatures build_q_state(const GameState& state, int seat);
QFeatures build_q_features(const GameState& state, int seat, const Move& action);
IdentifyFeatures build_identify_features(const GameState& state, int seat);

struct Zone {
  std::string name;
  int offset = 0;
  int width = 0;
};
// Offsets into the Q network input [action, state, history].
std::vector<Zone> q_layout();
// Offsets into the identification input [state, history].
std::vector<Zone> identify_layout();
std::string format_layout(const std::vector<Zone>& zones);

}  // namespace red10

#endif  // RED10_FEATURES_HPP_
