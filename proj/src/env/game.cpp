#include "jointsampler/env/game.hpp"

#include <stdexcept>

namespace jointsampler::env {

JointActionSpace::JointActionSpace(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("JointActionSpace: no agents");
  strides_.assign(counts_.size(), 1);
  for (int i = static_cast<int>(counts_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * counts_[i + 1];
  }
  total_ = strides_[0] * counts_[0];
}

int JointActionSpace::encode(const std::vector<int>& actions) const {
  if (actions.size() != counts_.size()) {
    throw std::invalid_argument("JointActionSpace::encode: wrong number of actions");
  }
  int idx = 0;
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= counts_[i]) {
      throw std::invalid_argument("JointActionSpace::encode: action index out of range");
    }
    idx += actions[i] * strides_[i];
  }
  return idx;
}

std::vector<int> JointActionSpace::decode(int joint_index) const {
  if (joint_index < 0 || joint_index >= total_) {
    throw std::invalid_argument("JointActionSpace::decode: joint index out of range");
  }
  std::vector<int> actions(counts_.size());
  for (size_t i = 0; i < counts_.size(); ++i) {
    actions[i] = joint_index / strides_[i];
    joint_index %= strides_[i];
  }
  return actions;
}

void Game::check_actions(const std::vector<int>& actions) const {
  if (actions.size() != static_cast<size_t>(num_agents())) {
    throw std::invalid_argument(id_ + ": wrong number of actions");
  }
  for (int i = 0; i < num_agents(); ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts()[i]) {
      throw std::invalid_argument(id_ + ": action index out of range for agent " +
                                  std::to_string(i));
    }
  }
}

void Game::check_state(StateId state) const {
  if (state < 0 || state >= state_count()) {
    throw std::invalid_argument(id_ + ": state id out of range");
  }
}

StepOutcome Game::step(StateId state, const std::vector<int>& actions, nn::Rng& rng) const {
  auto succ = transitions(state, actions);
  if (succ.size() == 1) return succ[0].outcome;
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& s : succ) {
    acc += s.prob;
    if (u < acc) return s.outcome;
  }
  return succ.back().outcome;
}

int Game::joint_observation_dim() const {
  int d = 0;
  for (int i = 0; i < num_agents(); ++i) d += observation_dim(i);
  return d;
}

Eigen::VectorXd Game::joint_observation(StateId state) const {
  Eigen::VectorXd obs(joint_observation_dim());
  int off = 0;
  for (int i = 0; i < num_agents(); ++i) {
    obs.segment(off, observation_dim(i)) = observation(state, i);
    off += observation_dim(i);
  }
  return obs;
}

Episode::Result Episode::step(const std::vector<int>& actions, nn::Rng& rng) {
  StepOutcome out = game_->step(state_, actions, rng);
  ++t_;
  Result r;
  r.rewards = out.rewards;
  r.terminal = out.terminal;
  r.truncated = !out.terminal && t_ >= game_->horizon();
  r.success = out.success;
  r.next_state = out.next_state;
  state_ = out.next_state;
  return r;
}

std::unique_ptr<Game> make_game(const std::string& id) {
  if (id == "gridworld") return make_gridworld();
  if (id == "boulderpush") return make_boulderpush();
  if (id == "lbf") return make_lbf();
  return make_matrix_game(id);
}

std::vector<std::string> game_ids() {
  std::vector<std::string> ids;
  for (int g = 1; g <= 21; ++g) ids.push_back("g" + std::to_string(g));
  ids.push_back("intro");
  ids.push_back("climbing");
  ids.push_back("penalty");
  ids.push_back("gridworld");
  ids.push_back("boulderpush");
  ids.push_back("lbf");
  return ids;
}

}  // namespace jointsampler::env
