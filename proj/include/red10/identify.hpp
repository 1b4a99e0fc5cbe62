#ifndef RED10_IDENTIFY_HPP_
#define RED10_IDENTIFY_HPP_

#include <array>
#include <span>
#include <vector>

#include "red10/features.hpp"
#include "red10/nn/net.hpp"

namespace red10 {

// Confidence that the up, front and down players are teammates.
using ConfidenceVector = Eigen::Vector3f;

nn::NetSpec default_relation_spec(int lstm_hidden = 128, int width = 512);
nn::NetSpec default_danger_spec(int lstm_hidden = 128, int width = 512);

struct IdentifyNets {
  nn::Params<float> relation;  // 3 sigmoid outputs
  nn::Params<float> danger;    // 1 sigmoid output

  static IdentifyNets init(const nn::NetSpec& relation, const nn::NetSpec& danger,
                           std::uint64_t seed);
};

ConfidenceVector relation_forward(const nn::Params<float>& relation, const IdentifyFeatures& f);
float danger_forward(const nn::Params<float>& danger, const IdentifyFeatures& f);

// cooperate_j = c_j > d (ties compete).
TeamMask decide_mask(const ConfidenceVector& c, float d);

struct IdentificationTargets {
  Eigen::Vector3f target_r;
  std::vector<int> turns;         // global turn index t of each decision
  std::vector<float> target_d;    // t / T for each decision
};

// Targets for one seat of a finished deck: ground-truth relations and t/T
// for every turn the seat acted, T being the number of moves in the deck.
IdentificationTargets make_targets(const GameState& final_state, int seat);

struct IdentifySample {
  IdentifyFeatures features;
  Eigen::Vector3f target_r;
  float target_d = 0.0F;
  // Value of each policy head's greedy action at this state (fine-tuning).
  Eigen::Matrix<float, kNumMasks, 1> head_values = Eigen::Matrix<float, kNumMasks, 1>::Zero();
};

// One sample per decision of every seat in a finished deck.
std::vector<IdentifySample> identify_samples(const GameState& final_state);

template <typename Scalar>
struct RdBatch {
  nn::Batch<Scalar> inputs;
  nn::Matrix<Scalar> target_r;     // 3 x B
  nn::Matrix<Scalar> target_d;     // 1 x B
  nn::Matrix<Scalar> head_values;  // 8 x B
};
RdBatch<float> make_rd_batch(std::span<const IdentifySample> samples);

template <typename Scalar>
struct RdLoss {
  Scalar loss = 0;
  Scalar relation_term = 0;
  Scalar danger_term = 0;
  nn::Params<Scalar> relation_grad;
  nn::Params<Scalar> danger_grad;
};

// Relation MSE (mean over the 3 outputs and the batch) plus danger MSE (mean
// over the batch), with gradients of that sum.
template <typename Scalar>
RdLoss<Scalar> loss_rd(const nn::Params<Scalar>& relation, const nn::Params<Scalar>& danger,
                       const RdBatch<Scalar>& batch) {
  const auto b = static_cast<Scalar>(batch.inputs.size());
  nn::ForwardCache<Scalar> rc;
  nn::ForwardCache<Scalar> dc;
  const nn::Matrix<Scalar> r = nn::forward(relation, batch.inputs, &rc);
  const nn::Matrix<Scalar> d = nn::forward(danger, batch.inputs, &dc);
  const nn::Matrix<Scalar> er = r - batch.target_r;
  const nn::Matrix<Scalar> ed = d - batch.target_d;
  RdLoss<Scalar> out;
  out.relation_term = er.squaredNorm() / (b * Scalar(3));
  out.danger_term = ed.squaredNorm() / b;
  out.loss = out.relation_term + out.danger_term;
  out.relation_grad = nn::backward(relation, rc, nn::Matrix<Scalar>(er * (Scalar(2) / (b * Scalar(3)))));
  out.danger_grad = nn::backward(danger, dc, nn::Matrix<Scalar>(ed * (Scalar(2) / b)));
  return out;
}

// Soft policy-selection surrogate. With w_j = sigmoid((c_j - d) / tau), head
// m receives weight prod_j w_j^{m_j} (1 - w_j)^{1 - m_j} and the surrogate is
// the weighted sum of head values. Returns the per-sample surrogate (1 x B)
// and writes its derivatives with respect to c (3 x B) and d (1 x B).
template <typename Scalar>
nn::Matrix<Scalar> soft_selection(const nn::Matrix<Scalar>& c, const nn::Matrix<Scalar>& d,
                                  const nn::Matrix<Scalar>& head_values, Scalar tau,
                                  nn::Matrix<Scalar>* dc, nn::Matrix<Scalar>* dd) {
  const Eigen::Index b = c.cols();
  nn::Matrix<Scalar> value(1, b);
  if (dc) dc->resize(3, b);
  if (dd) dd->resize(1, b);
  for (Eigen::Index s = 0; s < b; ++s) {
    Scalar w[3];
    for (int j = 0; j < 3; ++j) w[j] = Scalar(1) / (Scalar(1) + std::exp(-(c(j, s) - d(0, s)) / tau));
    Scalar total = 0;
    Scalar dw[3] = {0, 0, 0};
    for (int m = 0; m < kNumMasks; ++m) {
      // bit 2 = up, bit 1 = front, bit 0 = down
      Scalar f[3];
      for (int j = 0; j < 3; ++j) f[j] = ((m >> (2 - j)) & 1) ? w[j] : Scalar(1) - w[j];
      const Scalar q = head_values(m, s);
      total += q * f[0] * f[1] * f[2];
      for (int j = 0; j < 3; ++j) {
        const Scalar sign = ((m >> (2 - j)) & 1) ? Scalar(1) : Scalar(-1);
        dw[j] += q * sign * f[(j + 1) % 3] * f[(j + 2) % 3];
      }
    }
    value(0, s) = total;
    Scalar dsum = 0;
    for (int j = 0; j < 3; ++j) {
      const Scalar dz = dw[j] * w[j] * (Scalar(1) - w[j]) / tau;
      if (dc) (*dc)(j, s) = dz;
      dsum += dz;
    }
    if (dd) (*dd)(0, s) = -dsum;
  }
  return value;
}

template <typename Scalar>
struct IntrinsicGradient {
  Scalar objective = 0;  // mean surrogate - lambda * Loss_RD
  Scalar surrogate = 0;
  Scalar loss_rd = 0;
  nn::Params<Scalar> relation;  // ascent direction
  nn::Params<Scalar> danger;
};

// Gradient of r_int = mean_b Qhat_b - lambda * Loss_RD with respect to the
// relation and danger parameters. Head values are constants.
template <typename Scalar>
IntrinsicGradient<Scalar> intrinsic_gradient(const nn::Params<Scalar>& relation,
                                             const nn::Params<Scalar>& danger,
                                             const RdBatch<Scalar>& batch, Scalar lambda,
                                             Scalar tau) {
  const auto b = static_cast<Scalar>(batch.inputs.size());
  nn::ForwardCache<Scalar> rc;
  nn::ForwardCache<Scalar> dc;
  const nn::Matrix<Scalar> r = nn::forward(relation, batch.inputs, &rc);
  const nn::Matrix<Scalar> d = nn::forward(danger, batch.inputs, &dc);
  nn::Matrix<Scalar> dq_dc;
  nn::Matrix<Scalar> dq_dd;
  const nn::Matrix<Scalar> q = soft_selection(r, d, batch.head_values, tau, &dq_dc, &dq_dd);
  const nn::Matrix<Scalar> er = r - batch.target_r;
  const nn::Matrix<Scalar> ed = d - batch.target_d;

  IntrinsicGradient<Scalar> out;
  out.surrogate = q.sum() / b;
  out.loss_rd = er.squaredNorm() / (b * Scalar(3)) + ed.squaredNorm() / b;
  out.objective = out.surrogate - lambda * out.loss_rd;
  const nn::Matrix<Scalar> gr = dq_dc / b - lambda * er * (Scalar(2) / (b * Scalar(3)));
  const nn::Matrix<Scalar> gd = dq_dd / b - lambda * ed * (Scalar(2) / b);
  out.relation = nn::backward(relation, rc, gr);
  out.danger = nn::backward(danger, dc, gd);
  return out;
}

}  // namespace red10

#endif  // RED10_IDENTIFY_HPP_
