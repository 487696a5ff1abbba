#ifndef JOINTSAMPLER_PPO_PPO_HPP_
#define JOINTSAMPLER_PPO_PPO_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "jointsampler/buffer.hpp"
#include "jointsampler/env/game.hpp"
#include "jointsampler/nn/adam.hpp"
#include "jointsampler/nn/loss.hpp"
#include "jointsampler/policy/policy.hpp"

namespace jointsampler::ppo {

struct PpoConfig {
  int batch_size = 20;  // n: env steps per target update
  double lr = 0.1;
  int n_epochs = 4;
  int n_minibatches = 4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;
  bool advantage_normalization = true;

  void validate() const;  // throws std::invalid_argument
};

enum class CriticInput { kOwnObs, kJointState };

// Value head. IPPO critics read the agent's own observation, MAPPO critics the
// joint-state concatenation.
struct Critic {
  nn::MlpSpec spec;
  nn::ParamVector params;
  CriticInput input = CriticInput::kOwnObs;
};

Critic make_critic(const env::Game& game, int agent, CriticInput input, nn::Rng& rng);
double critic_value(const Critic& critic, const Eigen::VectorXd& obs);

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

// GAE(lambda) backward recursion. `next_values` holds V(s_{t+1}) already masked
// to 0 at true terminals (and the bootstrap value at truncations); the
// advantage chain breaks where `episode_end` is set.
GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const Eigen::VectorXd& next_values, const std::vector<uint8_t>& episode_end,
                      double gamma, double lambda);

// Single-episode convenience form: `dones` are terminal flags; the value after
// the final step is `tail_bootstrap` (0 when the last step is terminal).
GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const std::vector<uint8_t>& dones, double gamma, double lambda,
                      double tail_bootstrap = 0.0);

// In-place per-minibatch advantage normalization (no-op for size < 2).
void normalize_advantages(Eigen::VectorXd& advantages);

// Clipped-surrogate policy loss with entropy bonus for one agent's minibatch,
// differentiable with respect to the actor parameters. Ratios are taken against
// the collection-time target log-probs stored in the buffer.
class PpoPolicyLoss : public nn::ScalarLoss {
 public:
  PpoPolicyLoss(nn::MlpSpec spec, Eigen::MatrixXd obs, std::vector<int> actions,
                Eigen::VectorXd old_log_probs, Eigen::VectorXd advantages, double clip,
                double entropy_coef);
  int param_size() const override { return spec_.param_count(); }
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  nn::MlpSpec spec_;
  Eigen::MatrixXd obs_;
  std::vector<int> actions_;
  Eigen::VectorXd old_log_probs_;
  Eigen::VectorXd advantages_;
  double clip_;
  double entropy_coef_;
};

// vf_coef * mean squared error between predicted values and returns.
class ValueLoss : public nn::ScalarLoss {
 public:
  ValueLoss(nn::MlpSpec spec, Eigen::MatrixXd obs, Eigen::VectorXd returns, double vf_coef);
  int param_size() const override { return spec_.param_count(); }
  double value(const Eigen::VectorXd& params) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override;

 private:
  nn::MlpSpec spec_;
  Eigen::MatrixXd obs_;
  Eigen::VectorXd returns_;
  double vf_coef_;
};

// Adam moments for each agent's actor and critic; persists across updates.
struct PpoOptimState {
  std::vector<nn::AdamState> actors;
  std::vector<nn::AdamState> critics;

  static PpoOptimState make(const policy::JointTargetPolicy& joint,
                            const std::vector<Critic>& critics);
};

// One PPO update per agent (clipped surrogate + value loss + entropy bonus,
// per-agent GAE advantages, per-minibatch normalization, joint actor+critic
// gradient clipping). Requires a full buffer and clears it afterwards.
void ppo_update(const env::Game& game, policy::JointTargetPolicy& joint,
                std::vector<Critic>& critics, TransitionBuffer& buffer, const PpoConfig& cfg,
                nn::Rng& shuffle_rng, PpoOptimState& optim);

}  // namespace jointsampler::ppo

#endif  // JOINTSAMPLER_PPO_PPO_HPP_
