#include "jointsampler/buffer.hpp"

namespace jointsampler {

namespace {

template <typename Get>
Eigen::MatrixXd gather(const std::vector<Transition>& items, const std::vector<int>& idx,
                       Get get) {
  if (idx.empty()) return {};
  const Eigen::VectorXd& first = get(items[idx[0]]);
  Eigen::MatrixXd m(first.size(), idx.size());
  for (size_t j = 0; j < idx.size(); ++j) m.col(j) = get(items[idx[j]]);
  return m;
}

}  // namespace

Eigen::MatrixXd TransitionBuffer::gather_joint_obs(const std::vector<int>& idx) const {
  return gather(items_, idx, [](const Transition& t) -> const Eigen::VectorXd& { return t.joint_obs; });
}

Eigen::MatrixXd TransitionBuffer::gather_agent_obs(int agent, const std::vector<int>& idx) const {
  return gather(items_, idx,
                [agent](const Transition& t) -> const Eigen::VectorXd& { return t.agent_obs[agent]; });
}

Eigen::MatrixXd TransitionBuffer::gather_next_joint_obs(const std::vector<int>& idx) const {
  return gather(items_, idx,
                [](const Transition& t) -> const Eigen::VectorXd& { return t.next_joint_obs; });
}

Eigen::MatrixXd TransitionBuffer::gather_next_agent_obs(int agent,
                                                        const std::vector<int>& idx) const {
  return gather(items_, idx, [agent](const Transition& t) -> const Eigen::VectorXd& {
    return t.next_agent_obs[agent];
  });
}

Eigen::MatrixXd TransitionBuffer::gather_joint_target_log(const std::vector<int>& idx) const {
  return gather(items_, idx,
                [](const Transition& t) -> const Eigen::VectorXd& { return t.joint_target_log; });
}

std::vector<int> TransitionBuffer::all_indices() const {
  std::vector<int> idx(items_.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

}  // namespace jointsampler
