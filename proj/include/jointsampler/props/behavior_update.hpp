#ifndef JOINTSAMPLER_PROPS_BEHAVIOR_UPDATE_HPP_
#define JOINTSAMPLER_PROPS_BEHAVIOR_UPDATE_HPP_

#include <vector>

#include "jointsampler/buffer.hpp"
#include "jointsampler/env/game.hpp"
#include "jointsampler/nn/loss.hpp"
#include "jointsampler/policy/policy.hpp"

namespace jointsampler::props {

struct BehaviorUpdateConfig {
  double lr = 0.03;
  double clip_eps = 0.3;   // epsilon in the clipped surrogate
  double target_kl = 6.0;  // delta: epoch-boundary KL cutoff
  int n_epoch = 16;
  int n_minibatch = 4;
  int batch_size = 1;      // m: env steps between behavior updates

  void validate() const;  // throws std::invalid_argument
};

// Clipped behavior surrogate on the joint ratio rho = pi_phi(a|s) / pi_theta(a|s):
// mean over the batch of min(-rho, -clip(rho, 1-eps, 1+eps)). Differentiable with
// respect to the adjustment network parameters.
class MaPropsSurrogate : public nn::ScalarLoss {
 public:
  MaPropsSurrogate(const TransitionBuffer& buffer, std::vector<int> idx, nn::MlpSpec delta_spec,
                   double clip_eps);
  int param_size() const override { return delta_spec_.param_count(); }
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  void forward(const Eigen::VectorXd& params, nn::MlpForwardCache* cache,
               Eigen::MatrixXd* log_probs, Eigen::VectorXd* ratios) const;

  nn::MlpSpec delta_spec_;
  double clip_eps_;
  Eigen::MatrixXd inputs_;       // joint obs, column per sample
  Eigen::MatrixXd target_logs_;  // joint target log-prob vectors, column per sample
  std::vector<int> actions_;     // joint action indices
};

// Same surrogate on one agent's own ratio rho_i = pi_phi_i(a_i|s_i) / pi_theta_i(a_i|s_i).
class PropsAgentSurrogate : public nn::ScalarLoss {
 public:
  PropsAgentSurrogate(const TransitionBuffer& buffer, std::vector<int> idx, int agent,
                      nn::MlpSpec spec, double clip_eps);
  int param_size() const override { return spec_.param_count(); }
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  nn::MlpSpec spec_;
  double clip_eps_;
  Eigen::MatrixXd inputs_;
  std::vector<int> actions_;
  Eigen::VectorXd target_log_;  // stored log pi_theta_i(a_i|s_i)
};

// Joint-ratio surrogate for the decentralized behavior policy, over the stacked
// per-agent parameter vectors (phi_1 .. phi_n back to back).
class PropsJointSurrogate : public nn::ScalarLoss {
 public:
  PropsJointSurrogate(const TransitionBuffer& buffer, std::vector<int> idx,
                      std::vector<nn::MlpSpec> agent_specs, double clip_eps);
  int param_size() const override;
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  std::vector<nn::MlpSpec> specs_;
  double clip_eps_;
  std::vector<Eigen::MatrixXd> inputs_;   // per agent
  std::vector<std::vector<int>> actions_; // per agent
  Eigen::VectorXd joint_target_log_;      // stored log pi_theta(a|s)
};

// Mean negative log-likelihood of the batch under the behavior policy, in the
// same parameter spaces as the surrogates above. At a freshly initialized
// behavior policy its gradient coincides with the surrogate gradient.
class MaPropsNll : public nn::ScalarLoss {
 public:
  MaPropsNll(const TransitionBuffer& buffer, std::vector<int> idx, nn::MlpSpec delta_spec);
  int param_size() const override { return delta_spec_.param_count(); }
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  nn::MlpSpec delta_spec_;
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd target_logs_;
  std::vector<int> actions_;
};

class PropsJointNll : public nn::ScalarLoss {
 public:
  PropsJointNll(const TransitionBuffer& buffer, std::vector<int> idx,
                std::vector<nn::MlpSpec> agent_specs);
  int param_size() const override;
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  std::vector<nn::MlpSpec> specs_;
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<std::vector<int>> actions_;
};

// Stacks/splits the decentralized behavior parameters for the joint-ratio losses.
Eigen::VectorXd stack_behavior_params(const policy::BehaviorPolicy& b);
void unstack_behavior_params(const Eigen::VectorXd& flat, policy::BehaviorPolicy& b);

// Mean clipped surrogate of the batch at the behavior policy's current
// parameters (joint ratio for every mode; -1 exactly at initialization).
// Throws DegenerateRatioError when a stored target probability is below 1e-12.
double props_loss(const policy::BehaviorPolicy& behavior, const policy::JointTargetPolicy& target,
                  const env::Game& game, const TransitionBuffer& batch, double clip_eps);

// Monte Carlo estimate of KL(pi_theta || pi_phi) over the buffer samples:
// mean of log pi_theta(a|s) - log pi_phi(a|s).
double behavior_kl_estimate(const policy::BehaviorPolicy& behavior,
                            const policy::JointTargetPolicy& target, const env::Game& game,
                            const TransitionBuffer& buffer);

// One behavior policy update: up to n_epoch epochs of n_minibatch Adam ascent
// steps on the clipped surrogate, stopping at the first epoch boundary where
// the KL estimate exceeds target_kl. Expects a freshly initialized behavior
// policy. PROPS updates each agent's parameters on its own (s_i, a_i) pairs;
// MA-PROPS updates the adjustment network on (joint state, joint action) pairs.
policy::BehaviorPolicy update_behavior(policy::BehaviorPolicy behavior, const env::Game& game,
                                       const policy::JointTargetPolicy& target,
                                       const TransitionBuffer& buffer,
                                       const BehaviorUpdateConfig& cfg, nn::Rng& shuffle_rng);

}  // namespace jointsampler::props

#endif  // JOINTSAMPLER_PROPS_BEHAVIOR_UPDATE_HPP_
