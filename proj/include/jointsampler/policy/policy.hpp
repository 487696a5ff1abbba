#ifndef JOINTSAMPLER_POLICY_POLICY_HPP_
#define JOINTSAMPLER_POLICY_POLICY_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jointsampler/env/game.hpp"
#include "jointsampler/nn/distributions.hpp"
#include "jointsampler/nn/mlp.hpp"

namespace jointsampler::policy {

// One agent's stochastic policy: an MLP from its observation to action logits.
struct AgentPolicy {
  nn::MlpSpec spec;
  nn::ParamVector params;
};

Eigen::VectorXd agent_logits(const AgentPolicy& policy, const Eigen::VectorXd& obs);
Eigen::VectorXd agent_dist(const AgentPolicy& policy, const Eigen::VectorXd& obs);

// Factored joint policy theta = (theta_1 .. theta_n). The joint probability of
// a joint action is the product of the per-agent probabilities.
class JointTargetPolicy {
 public:
  JointTargetPolicy() = default;
  explicit JointTargetPolicy(std::vector<AgentPolicy> agents) : agents_(std::move(agents)) {}

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const AgentPolicy& agent(int i) const { return agents_[i]; }
  AgentPolicy& agent(int i) { return agents_[i]; }

  // log pi_i(. | s_i) for every agent at a state.
  std::vector<Eigen::VectorXd> per_agent_log_probs(const env::Game& game, env::StateId s) const;

  // log pi_theta(a | s) for every joint action index: sum of per-agent logs.
  Eigen::VectorXd joint_log_vector(const env::Game& game, env::StateId s) const;

  Eigen::VectorXd joint_distribution(const env::Game& game, env::StateId s) const;

  double joint_log_prob(const env::Game& game, env::StateId s,
                        const std::vector<int>& actions) const;

 private:
  std::vector<AgentPolicy> agents_;
};

// Standard actor construction: (64, 64) tanh hidden layers, small-gain final layer.
JointTargetPolicy make_joint_policy(const env::Game& game, nn::Rng& rng);

// Combines per-agent log-prob vectors into the joint log-prob vector,
// row-major over agents in index order.
Eigen::VectorXd combine_agent_logs(const env::JointActionSpace& space,
                                   const std::vector<Eigen::VectorXd>& agent_logs);

enum class SamplerMode { kOnPolicy, kProps, kMaProps };

std::string to_string(SamplerMode mode);
SamplerMode sampler_mode_from_string(const std::string& name);  // throws on unknown

// Sampling distribution used during data collection, defined relative to a
// frozen target policy. on_policy carries no parameters; props carries one
// parameter copy per agent; ma_props carries the logit-adjustment network
// applied on top of the joint target log-probabilities.
class BehaviorPolicy {
 public:
  BehaviorPolicy() = default;

  SamplerMode mode() const { return mode_; }
  std::vector<AgentPolicy>& agents() { return agents_; }
  const std::vector<AgentPolicy>& agents() const { return agents_; }
  nn::ParamVector& delta_params() { return delta_params_; }
  const nn::ParamVector& delta_params() const { return delta_params_; }
  const nn::MlpSpec& delta_spec() const { return delta_spec_; }

  // Distribution over joint action indices at a state.
  Eigen::VectorXd joint_distribution(const env::Game& game, const JointTargetPolicy& target,
                                     env::StateId s) const;

  // Hot path for ma_props with precomputed joint target logs and joint obs.
  Eigen::VectorXd ma_props_logits(const Eigen::VectorXd& joint_target_log,
                                  const Eigen::VectorXd& joint_obs) const;

  friend BehaviorPolicy init_behavior(SamplerMode, const env::Game&, const JointTargetPolicy&,
                                      nn::Rng&);

 private:
  SamplerMode mode_ = SamplerMode::kOnPolicy;
  std::vector<AgentPolicy> agents_;  // props
  nn::MlpSpec delta_spec_;           // ma_props
  nn::ParamVector delta_params_;
};

// Behavior initialization per mode: props copies the target parameters;
// ma_props builds a fresh adjustment network with randomized hidden layers and
// a zeroed final layer. Either way the behavior distribution starts equal to
// the joint target distribution at every state.
BehaviorPolicy init_behavior(SamplerMode mode, const env::Game& game,
                             const JointTargetPolicy& target, nn::Rng& rng);

struct JointSample {
  std::vector<int> actions;
  int joint_index = 0;
  std::vector<double> target_log_probs;         // log pi_theta_i(a_i | s_i) at collection
  Eigen::VectorXd joint_target_log;             // full joint log-prob vector under theta
};

// Draws a joint action from the behavior distribution and evaluates the target
// log-probabilities of the chosen per-agent actions.
JointSample sample_joint(const BehaviorPolicy& behavior, const env::Game& game,
                         const JointTargetPolicy& target, env::StateId s, nn::Rng& rng);

}  // namespace jointsampler::policy

#endif  // JOINTSAMPLER_POLICY_POLICY_HPP_
