#ifndef JOINTSAMPLER_TESTS_TEST_SUPPORT_HPP_
#define JOINTSAMPLER_TESTS_TEST_SUPPORT_HPP_

#include <Eigen/Dense>
#include <functional>

#include "jointsampler/buffer.hpp"
#include "jointsampler/env/game.hpp"
#include "jointsampler/nn/loss.hpp"
#include "jointsampler/policy/policy.hpp"

namespace jointsampler::test {

// Central finite differences, the independent oracle for every analytic
// gradient in the project.
inline Eigen::VectorXd finite_difference_gradient(const nn::ScalarLoss& loss,
                                                  const Eigen::VectorXd& params,
                                                  double step = 1e-5) {
  Eigen::VectorXd g(params.size());
  Eigen::VectorXd p = params;
  for (int i = 0; i < params.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + step;
    const double hi = loss.value(p);
    p[i] = saved - step;
    const double lo = loss.value(p);
    p[i] = saved;
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

// Largest relative mismatch between an analytic gradient and its
// finite-difference estimate, with an absolute floor for tiny entries.
inline double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (int i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(fd[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - fd[i]) / scale);
  }
  return worst;
}

// Collects `n` on-policy transitions from a game under a joint policy.
inline TransitionBuffer collect_buffer(const env::Game& game,
                                       const policy::JointTargetPolicy& joint,
                                       const policy::BehaviorPolicy& behavior, int n,
                                       nn::Rng& rng) {
  TransitionBuffer buffer;
  env::Episode ep(game);
  for (int t = 0; t < n; ++t) {
    const env::StateId s = ep.state();
    const policy::JointSample sample = policy::sample_joint(behavior, game, joint, s, rng);
    const env::Episode::Result res = ep.step(sample.actions, rng);
    Transition tr;
    tr.state = s;
    tr.next_state = res.next_state;
    for (int i = 0; i < game.num_agents(); ++i) {
      tr.agent_obs.push_back(game.observation(s, i));
      tr.next_agent_obs.push_back(game.observation(res.next_state, i));
    }
    tr.joint_obs = game.joint_observation(s);
    tr.next_joint_obs = game.joint_observation(res.next_state);
    tr.actions = sample.actions;
    tr.joint_action = sample.joint_index;
    tr.target_log_probs = sample.target_log_probs;
    tr.joint_target_log = sample.joint_target_log;
    tr.rewards = res.rewards;
    tr.terminal = res.terminal;
    tr.truncated = res.truncated;
    buffer.push(tr);
    if (res.terminal || res.truncated) ep.reset();
  }
  return buffer;
}

// Minimal well-formedness check for the emitted SVG: every opened tag closes
// in order and the document has a single root element.
inline bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  int roots = 0;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    const size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;  // declaration or comment
    const bool closing = tag[0] == '/';
    const bool self_closing = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    if (self_closing) tag.pop_back();
    const size_t space = tag.find_first_of(" \t\n");
    const std::string name = space == std::string::npos ? tag : tag.substr(0, space);
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      if (stack.empty()) ++roots;
    } else if (self_closing) {
      if (stack.empty()) ++roots;
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty() && roots == 1;
}

}  // namespace jointsampler::test

#endif  // JOINTSAMPLER_TESTS_TEST_SUPPORT_HPP_
