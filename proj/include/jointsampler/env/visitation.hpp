#ifndef JOINTSAMPLER_ENV_VISITATION_HPP_
#define JOINTSAMPLER_ENV_VISITATION_HPP_

#include <Eigen/Dense>
#include <functional>

#include "jointsampler/env/game.hpp"

namespace jointsampler::env {

// Probability mass over (state, joint action) pairs. Nonnegative, sums to 1.
struct VisitationDistribution {
  Eigen::MatrixXd mass;  // state_count x joint_action_count

  double sum() const { return mass.sum(); }
  Eigen::VectorXd state_marginal() const { return mass.rowwise().sum(); }
};

// Joint policy as a distribution over joint action indices per state.
using JointPolicyFn = std::function<Eigen::VectorXd(StateId)>;

inline constexpr int kDefaultEnumerationCap = 1 << 22;

// Exact on-policy state-action visitation: propagates the time-indexed state
// distribution forward over t = 0..H-1 with terminal absorption and averages
// the accumulated mass over timesteps. This matches the long-run empirical
// frequency of (s, a) pairs under episodic collection with resets.
// Throws UnsupportedGameError when state_count * joint_action_count exceeds
// the enumeration cap.
VisitationDistribution true_visitation(const Game& game, const JointPolicyFn& policy,
                                       int max_entries = kDefaultEnumerationCap);

}  // namespace jointsampler::env

#endif  // JOINTSAMPLER_ENV_VISITATION_HPP_
