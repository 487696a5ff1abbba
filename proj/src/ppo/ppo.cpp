#include "jointsampler/ppo/ppo.hpp"

#include <cmath>
#include <stdexcept>

#include "jointsampler/nn/distributions.hpp"

namespace jointsampler::ppo {

namespace {

Eigen::MatrixXd log_softmax_cols(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out = z;
  const Eigen::VectorXd mx = z.colwise().maxCoeff();
  out.rowwise() -= mx.transpose();
  const Eigen::VectorXd lse = out.array().exp().colwise().sum().log().matrix();
  out.rowwise() -= lse.transpose();
  return out;
}

double clip_to(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

void PpoConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("ppo batch_size must be >= 1");
  if (gamma <= 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in (0, 1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) throw std::invalid_argument("gae_lambda must be in [0, 1]");
  if (clip <= 0.0) throw std::invalid_argument("clip must be > 0");
  if (n_epochs < 1 || n_minibatches < 1) {
    throw std::invalid_argument("ppo n_epochs and n_minibatches must be >= 1");
  }
  if (lr < 0.0) throw std::invalid_argument("ppo lr must be >= 0");
}

Critic make_critic(const env::Game& game, int agent, CriticInput input, nn::Rng& rng) {
  Critic c;
  c.input = input;
  c.spec.input_dim =
      input == CriticInput::kOwnObs ? game.observation_dim(agent) : game.joint_observation_dim();
  c.spec.hidden_dims = {64, 64};
  c.spec.output_dim = 1;
  c.params = nn::init_mlp_params(c.spec, rng, 1.0);
  return c;
}

double critic_value(const Critic& critic, const Eigen::VectorXd& obs) {
  return nn::mlp_forward(critic.spec, critic.params, obs)[0];
}

GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const Eigen::VectorXd& next_values, const std::vector<uint8_t>& episode_end,
                      double gamma, double lambda) {
  const int t_max = static_cast<int>(rewards.size());
  if (values.size() != t_max || next_values.size() != t_max ||
      static_cast<int>(episode_end.size()) != t_max) {
    throw std::invalid_argument("compute_gae: sequence length mismatch");
  }
  GaeResult r;
  r.advantages.resize(t_max);
  double chain = 0.0;
  for (int t = t_max - 1; t >= 0; --t) {
    const double delta = rewards[t] + gamma * next_values[t] - values[t];
    chain = delta + (episode_end[t] ? 0.0 : gamma * lambda * chain);
    r.advantages[t] = chain;
  }
  r.returns = r.advantages + values;
  return r;
}

GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const std::vector<uint8_t>& dones, double gamma, double lambda,
                      double tail_bootstrap) {
  const int t_max = static_cast<int>(rewards.size());
  Eigen::VectorXd next_values(t_max);
  std::vector<uint8_t> episode_end(t_max, 0);
  for (int t = 0; t < t_max; ++t) {
    if (dones[t]) {
      next_values[t] = 0.0;
      episode_end[t] = 1;
    } else {
      next_values[t] = t + 1 < t_max ? values[t + 1] : tail_bootstrap;
    }
  }
  episode_end[t_max - 1] = 1;
  return compute_gae(rewards, values, next_values, episode_end, gamma, lambda);
}

void normalize_advantages(Eigen::VectorXd& advantages) {
  const int n = static_cast<int>(advantages.size());
  if (n < 2) return;
  const double mean = advantages.mean();
  advantages.array() -= mean;
  const double sd = std::sqrt(advantages.squaredNorm() / (n - 1));
  advantages /= sd + 1e-8;
}

PpoPolicyLoss::PpoPolicyLoss(nn::MlpSpec spec, Eigen::MatrixXd obs, std::vector<int> actions,
                             Eigen::VectorXd old_log_probs, Eigen::VectorXd advantages,
                             double clip, double entropy_coef)
    : spec_(std::move(spec)),
      obs_(std::move(obs)),
      actions_(std::move(actions)),
      old_log_probs_(std::move(old_log_probs)),
      advantages_(std::move(advantages)),
      clip_(clip),
      entropy_coef_(entropy_coef) {}

double PpoPolicyLoss::value(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  const Eigen::MatrixXd log_probs = log_softmax_cols(nn::mlp_forward_batch(spec_, p, obs_));
  const int b = static_cast<int>(actions_.size());
  double pg = 0.0, ent = 0.0;
  for (int j = 0; j < b; ++j) {
    const double ratio = std::exp(log_probs(actions_[j], j) - old_log_probs_[j]);
    const double s1 = ratio * advantages_[j];
    const double s2 = clip_to(ratio, 1.0 - clip_, 1.0 + clip_) * advantages_[j];
    pg -= std::min(s1, s2);
    const Eigen::ArrayXd probs = log_probs.col(j).array().exp();
    ent += -(probs * log_probs.col(j).array()).sum();
  }
  return pg / b - entropy_coef_ * ent / b;
}

Eigen::VectorXd PpoPolicyLoss::gradient(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  nn::MlpForwardCache cache;
  const Eigen::MatrixXd log_probs =
      log_softmax_cols(nn::mlp_forward_batch(spec_, p, obs_, &cache));
  const int b = static_cast<int>(actions_.size());
  const double inv_b = 1.0 / b;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(log_probs.rows(), b);
  for (int j = 0; j < b; ++j) {
    const Eigen::ArrayXd probs = log_probs.col(j).array().exp();
    const double ratio = std::exp(log_probs(actions_[j], j) - old_log_probs_[j]);
    const double s1 = ratio * advantages_[j];
    const double s2 = clip_to(ratio, 1.0 - clip_, 1.0 + clip_) * advantages_[j];
    if (s1 <= s2) {
      // unclipped branch: d(-ratio*A)/dlogits = -A*ratio*(e_a - p)
      g.col(j) = (advantages_[j] * ratio * inv_b) * probs.matrix();
      g(actions_[j], j) -= advantages_[j] * ratio * inv_b;
    }
    // else the clipped branch won with the ratio outside the clip range: zero gradient.

    // entropy bonus: d(-c*H)/dlogits = c * p * (log p + H)
    const double h = -(probs * log_probs.col(j).array()).sum();
    g.col(j) += (entropy_coef_ * inv_b) * (probs * (log_probs.col(j).array() + h)).matrix();
  }
  return nn::mlp_backward_batch(spec_, p, cache, g);
}

ValueLoss::ValueLoss(nn::MlpSpec spec, Eigen::MatrixXd obs, Eigen::VectorXd returns,
                     double vf_coef)
    : spec_(std::move(spec)), obs_(std::move(obs)), returns_(std::move(returns)), vf_coef_(vf_coef) {}

double ValueLoss::value(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  const Eigen::MatrixXd v = nn::mlp_forward_batch(spec_, p, obs_);
  return vf_coef_ * (v.row(0).transpose() - returns_).squaredNorm() / returns_.size();
}

Eigen::VectorXd ValueLoss::gradient(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  nn::MlpForwardCache cache;
  const Eigen::MatrixXd v = nn::mlp_forward_batch(spec_, p, obs_, &cache);
  Eigen::MatrixXd g(1, returns_.size());
  g.row(0) = (2.0 * vf_coef_ / returns_.size()) * (v.row(0).transpose() - returns_).transpose();
  return nn::mlp_backward_batch(spec_, p, cache, g);
}

PpoOptimState PpoOptimState::make(const policy::JointTargetPolicy& joint,
                                  const std::vector<Critic>& critics) {
  PpoOptimState s;
  for (int i = 0; i < joint.num_agents(); ++i) {
    s.actors.push_back(nn::AdamState::for_size(joint.agent(i).params.size()));
    s.critics.push_back(nn::AdamState::for_size(critics[i].params.size()));
  }
  return s;
}

void ppo_update(const env::Game& game, policy::JointTargetPolicy& joint,
                std::vector<Critic>& critics, TransitionBuffer& buffer, const PpoConfig& cfg,
                nn::Rng& shuffle_rng, PpoOptimState& optim) {
  cfg.validate();
  if (buffer.size() != cfg.batch_size) {
    throw std::invalid_argument("ppo_update: buffer holds " + std::to_string(buffer.size()) +
                                " transitions, expected a full batch of " +
                                std::to_string(cfg.batch_size));
  }
  const int n_agents = joint.num_agents();
  const int b = buffer.size();
  const std::vector<int> all = buffer.all_indices();

  // Per-agent advantages and returns from that agent's critic and rewards.
  std::vector<Eigen::VectorXd> advantages(n_agents), returns(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    const Critic& critic = critics[i];
    const Eigen::MatrixXd obs = critic.input == CriticInput::kOwnObs
                                    ? buffer.gather_agent_obs(i, all)
                                    : buffer.gather_joint_obs(all);
    const Eigen::MatrixXd next_obs = critic.input == CriticInput::kOwnObs
                                         ? buffer.gather_next_agent_obs(i, all)
                                         : buffer.gather_next_joint_obs(all);
    const Eigen::VectorXd values =
        nn::mlp_forward_batch(critic.spec, critic.params, obs).row(0);
    Eigen::VectorXd next_values =
        nn::mlp_forward_batch(critic.spec, critic.params, next_obs).row(0);
    Eigen::VectorXd rewards(b);
    std::vector<uint8_t> episode_end(b, 0);
    for (int j = 0; j < b; ++j) {
      const Transition& t = buffer[j];
      rewards[j] = t.rewards[i];
      if (t.terminal) next_values[j] = 0.0;  // truncations bootstrap from V(next state)
      episode_end[j] = t.terminal || t.truncated;
    }
    // The batch may end mid-episode; the chain also breaks at the batch edge
    // with the critic's value of the state after the last transition.
    episode_end[b - 1] = 1;
    const GaeResult gae =
        compute_gae(rewards, values, next_values, episode_end, cfg.gamma, cfg.gae_lambda);
    advantages[i] = gae.advantages;
    returns[i] = gae.returns;
  }

  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    const std::vector<int> perm = shuffle_rng.permutation(b);
    for (int c = 0; c < cfg.n_minibatches; ++c) {
      const int lo = static_cast<int>(static_cast<long>(b) * c / cfg.n_minibatches);
      const int hi = static_cast<int>(static_cast<long>(b) * (c + 1) / cfg.n_minibatches);
      if (lo == hi) continue;
      const std::vector<int> idx(perm.begin() + lo, perm.begin() + hi);
      const int mb = static_cast<int>(idx.size());

      for (int i = 0; i < n_agents; ++i) {
        std::vector<int> actions(mb);
        Eigen::VectorXd old_log(mb), adv(mb), ret(mb);
        for (int j = 0; j < mb; ++j) {
          actions[j] = buffer[idx[j]].actions[i];
          old_log[j] = buffer[idx[j]].target_log_probs[i];
          adv[j] = advantages[i][idx[j]];
          ret[j] = returns[i][idx[j]];
        }
        if (cfg.advantage_normalization) normalize_advantages(adv);

        policy::AgentPolicy& actor = joint.agent(i);
        const PpoPolicyLoss policy_loss(actor.spec, buffer.gather_agent_obs(i, idx), actions,
                                        old_log, adv, cfg.clip, cfg.entropy_coef);
        const Critic& critic = critics[i];
        const Eigen::MatrixXd critic_obs = critic.input == CriticInput::kOwnObs
                                               ? buffer.gather_agent_obs(i, idx)
                                               : buffer.gather_joint_obs(idx);
        const ValueLoss value_loss(critic.spec, critic_obs, ret, cfg.vf_coef);

        const Eigen::VectorXd ga = nn::grad(policy_loss, actor.params.values());
        const Eigen::VectorXd gc = nn::grad(value_loss, critics[i].params.values());
        Eigen::VectorXd g(ga.size() + gc.size());
        g << ga, gc;
        nn::clip_grad_norm(g, cfg.max_grad_norm);
        nn::adam_step_inplace(actor.params.values(), optim.actors[i], g.head(ga.size()), cfg.lr);
        nn::adam_step_inplace(critics[i].params.values(), optim.critics[i], g.tail(gc.size()),
                              cfg.lr);
      }
    }
  }
  buffer.clear();
}

}  // namespace jointsampler::ppo
