#include "jointsampler/env/visitation.hpp"

#include <string>

#include "jointsampler/errors.hpp"

namespace jointsampler::env {

VisitationDistribution true_visitation(const Game& game, const JointPolicyFn& policy,
                                       int max_entries) {
  const long entries = static_cast<long>(game.state_count()) * game.joint_actions().size();
  if (entries > max_entries) {
    throw UnsupportedGameError(game.id() + ": " + std::to_string(entries) +
                               " state-action pairs exceed the enumeration cap");
  }
  const int n_states = game.state_count();
  const int n_joint = game.joint_actions().size();

  VisitationDistribution d;
  d.mass = Eigen::MatrixXd::Zero(n_states, n_joint);

  Eigen::VectorXd now = Eigen::VectorXd::Zero(n_states);
  now[game.initial_state()] = 1.0;

  for (int t = 0; t < game.horizon(); ++t) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n_states);
    for (int s = 0; s < n_states; ++s) {
      if (now[s] <= 0.0) continue;
      const Eigen::VectorXd pi = policy(s);
      for (int a = 0; a < n_joint; ++a) {
        const double w = now[s] * pi[a];
        if (w <= 0.0) continue;
        d.mass(s, a) += w;
        if (t + 1 >= game.horizon()) continue;
        for (const auto& succ : game.transitions(s, game.joint_actions().decode(a))) {
          if (!succ.outcome.terminal) next[succ.outcome.next_state] += w * succ.prob;
        }
      }
    }
    now.swap(next);
  }

  d.mass /= d.mass.sum();
  return d;
}

}  // namespace jointsampler::env
