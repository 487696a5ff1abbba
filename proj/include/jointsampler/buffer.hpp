#ifndef JOINTSAMPLER_BUFFER_HPP_
#define JOINTSAMPLER_BUFFER_HPP_

#include <Eigen/Dense>
#include <vector>

#include "jointsampler/env/game.hpp"

namespace jointsampler {

// One collected step. Target log-probabilities are evaluated under the target
// policies at collection time; they stay valid for the whole batch because
// target updates only happen at batch boundaries.
struct Transition {
  env::StateId state = 0;
  env::StateId next_state = 0;
  std::vector<Eigen::VectorXd> agent_obs;
  std::vector<Eigen::VectorXd> next_agent_obs;
  Eigen::VectorXd joint_obs;
  Eigen::VectorXd next_joint_obs;
  std::vector<int> actions;
  int joint_action = 0;
  std::vector<double> target_log_probs;  // per agent, chosen action
  Eigen::VectorXd joint_target_log;      // full joint-action log-prob vector
  Eigen::VectorXd rewards;
  bool terminal = false;
  bool truncated = false;
};

// Timestep-ordered record of transitions collected since the last reset.
class TransitionBuffer {
 public:
  void push(Transition t) { items_.push_back(std::move(t)); }
  void clear() { items_.clear(); }
  bool empty() const { return items_.empty(); }
  int size() const { return static_cast<int>(items_.size()); }
  const Transition& operator[](int i) const { return items_[i]; }
  const std::vector<Transition>& items() const { return items_; }

  // Column-per-sample matrices for batched network evaluation.
  Eigen::MatrixXd gather_joint_obs(const std::vector<int>& idx) const;
  Eigen::MatrixXd gather_agent_obs(int agent, const std::vector<int>& idx) const;
  Eigen::MatrixXd gather_next_joint_obs(const std::vector<int>& idx) const;
  Eigen::MatrixXd gather_next_agent_obs(int agent, const std::vector<int>& idx) const;
  Eigen::MatrixXd gather_joint_target_log(const std::vector<int>& idx) const;

  std::vector<int> all_indices() const;

 private:
  std::vector<Transition> items_;
};

}  // namespace jointsampler

#endif  // JOINTSAMPLER_BUFFER_HPP_
