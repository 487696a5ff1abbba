#include "jointsampler/policy/policy.hpp"

#include <stdexcept>

namespace jointsampler::policy {

Eigen::VectorXd agent_logits(const AgentPolicy& policy, const Eigen::VectorXd& obs) {
  return nn::mlp_forward(policy.spec, policy.params, obs);
}

Eigen::VectorXd agent_dist(const AgentPolicy& policy, const Eigen::VectorXd& obs) {
  return nn::softmax(agent_logits(policy, obs));
}

std::vector<Eigen::VectorXd> JointTargetPolicy::per_agent_log_probs(const env::Game& game,
                                                                    env::StateId s) const {
  std::vector<Eigen::VectorXd> logs;
  logs.reserve(agents_.size());
  for (int i = 0; i < num_agents(); ++i) {
    logs.push_back(nn::log_softmax(agent_logits(agents_[i], game.observation(s, i))));
  }
  return logs;
}

Eigen::VectorXd combine_agent_logs(const env::JointActionSpace& space,
                                   const std::vector<Eigen::VectorXd>& agent_logs) {
  Eigen::VectorXd joint(space.size());
  for (int a = 0; a < space.size(); ++a) {
    const std::vector<int> actions = space.decode(a);
    double lp = 0.0;
    for (size_t i = 0; i < actions.size(); ++i) lp += agent_logs[i][actions[i]];
    joint[a] = lp;
  }
  return joint;
}

Eigen::VectorXd JointTargetPolicy::joint_log_vector(const env::Game& game, env::StateId s) const {
  return combine_agent_logs(game.joint_actions(), per_agent_log_probs(game, s));
}

Eigen::VectorXd JointTargetPolicy::joint_distribution(const env::Game& game,
                                                      env::StateId s) const {
  return joint_log_vector(game, s).array().exp();
}

double JointTargetPolicy::joint_log_prob(const env::Game& game, env::StateId s,
                                         const std::vector<int>& actions) const {
  if (actions.size() != static_cast<size_t>(num_agents())) {
    throw std::invalid_argument("joint_log_prob: wrong number of actions");
  }
  double lp = 0.0;
  for (int i = 0; i < num_agents(); ++i) {
    const Eigen::VectorXd logs =
        nn::log_softmax(agent_logits(agents_[i], game.observation(s, i)));
    if (actions[i] < 0 || actions[i] >= logs.size()) {
      throw std::invalid_argument("joint_log_prob: action index out of range");
    }
    lp += logs[actions[i]];
  }
  return lp;
}

JointTargetPolicy make_joint_policy(const env::Game& game, nn::Rng& rng) {
  std::vector<AgentPolicy> agents;
  agents.reserve(game.num_agents());
  for (int i = 0; i < game.num_agents(); ++i) {
    nn::MlpSpec spec;
    spec.input_dim = game.observation_dim(i);
    spec.hidden_dims = {64, 64};
    spec.output_dim = game.action_counts()[i];
    agents.push_back({spec, nn::init_mlp_params(spec, rng, 0.01)});
  }
  return JointTargetPolicy(std::move(agents));
}

std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::kOnPolicy: return "on-policy";
    case SamplerMode::kProps: return "props";
    case SamplerMode::kMaProps: return "ma-props";
  }
  return "?";
}

SamplerMode sampler_mode_from_string(const std::string& name) {
  if (name == "on-policy" || name == "on_policy") return SamplerMode::kOnPolicy;
  if (name == "props") return SamplerMode::kProps;
  if (name == "ma-props" || name == "ma_props") return SamplerMode::kMaProps;
  throw std::invalid_argument("unknown sampler: " + name);
}

Eigen::VectorXd BehaviorPolicy::ma_props_logits(const Eigen::VectorXd& joint_target_log,
                                                const Eigen::VectorXd& joint_obs) const {
  return joint_target_log + nn::mlp_forward(delta_spec_, delta_params_, joint_obs);
}

Eigen::VectorXd BehaviorPolicy::joint_distribution(const env::Game& game,
                                                   const JointTargetPolicy& target,
                                                   env::StateId s) const {
  switch (mode_) {
    case SamplerMode::kOnPolicy:
      return target.joint_distribution(game, s);
    case SamplerMode::kProps: {
      std::vector<Eigen::VectorXd> logs;
      logs.reserve(agents_.size());
      for (size_t i = 0; i < agents_.size(); ++i) {
        logs.push_back(
            nn::log_softmax(agent_logits(agents_[i], game.observation(s, static_cast<int>(i)))));
      }
      return combine_agent_logs(game.joint_actions(), logs).array().exp();
    }
    case SamplerMode::kMaProps: {
      return nn::softmax(ma_props_logits(target.joint_log_vector(game, s),
                                         game.joint_observation(s)));
    }
  }
  throw std::logic_error("unreachable");
}

BehaviorPolicy init_behavior(SamplerMode mode, const env::Game& game,
                             const JointTargetPolicy& target, nn::Rng& rng) {
  BehaviorPolicy b;
  b.mode_ = mode;
  switch (mode) {
    case SamplerMode::kOnPolicy:
      break;
    case SamplerMode::kProps:
      b.agents_.reserve(target.num_agents());
      for (int i = 0; i < target.num_agents(); ++i) b.agents_.push_back(target.agent(i));
      break;
    case SamplerMode::kMaProps: {
      nn::MlpSpec spec;
      spec.input_dim = game.joint_observation_dim();
      spec.hidden_dims = {64, 64};
      spec.output_dim = game.joint_actions().size();
      spec.zero_final_layer = true;
      b.delta_spec_ = spec;
      b.delta_params_ = nn::init_mlp_params(spec, rng);
      break;
    }
  }
  return b;
}

JointSample sample_joint(const BehaviorPolicy& behavior, const env::Game& game,
                         const JointTargetPolicy& target, env::StateId s, nn::Rng& rng) {
  JointSample out;
  const std::vector<Eigen::VectorXd> target_logs = target.per_agent_log_probs(game, s);
  out.joint_target_log = combine_agent_logs(game.joint_actions(), target_logs);

  Eigen::VectorXd dist;
  switch (behavior.mode()) {
    case SamplerMode::kOnPolicy:
      dist = out.joint_target_log.array().exp();
      break;
    case SamplerMode::kProps: {
      std::vector<Eigen::VectorXd> logs;
      logs.reserve(behavior.agents().size());
      for (size_t i = 0; i < behavior.agents().size(); ++i) {
        logs.push_back(nn::log_softmax(
            agent_logits(behavior.agents()[i], game.observation(s, static_cast<int>(i)))));
      }
      dist = combine_agent_logs(game.joint_actions(), logs).array().exp();
      break;
    }
    case SamplerMode::kMaProps:
      dist = nn::softmax(behavior.ma_props_logits(out.joint_target_log,
                                                  game.joint_observation(s)));
      break;
  }

  out.joint_index = nn::categorical_sample(dist, rng);
  out.actions = game.joint_actions().decode(out.joint_index);
  out.target_log_probs.resize(game.num_agents());
  for (int i = 0; i < game.num_agents(); ++i) {
    out.target_log_probs[i] = target_logs[i][out.actions[i]];
  }
  return out;
}

}  // namespace jointsampler::policy
