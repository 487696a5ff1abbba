#include "jointsampler/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jointsampler/errors.hpp"
#include "jointsampler/nn/adam.hpp"
#include "jointsampler/nn/distributions.hpp"
#include "jointsampler/nn/loss.hpp"

namespace jointsampler::metrics {

namespace {

const double kMinReferenceLog = std::log(1e-12);

Eigen::MatrixXd log_softmax_cols(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out = z;
  const Eigen::VectorXd mx = z.colwise().maxCoeff();
  out.rowwise() -= mx.transpose();
  const Eigen::VectorXd lse = out.array().exp().colwise().sum().log().matrix();
  out.rowwise() -= lse.transpose();
  return out;
}

// Scope helpers over transitions.
int scope_action(const MetricScope& scope, const Transition& t) {
  return scope.joint ? t.joint_action : t.actions[scope.agent];
}

const Eigen::VectorXd& scope_obs(const MetricScope& scope, const Transition& t) {
  return scope.joint ? t.joint_obs : t.agent_obs[scope.agent];
}

double scope_reference_log(const MetricScope& scope, const Transition& t) {
  return scope.joint ? t.joint_target_log[t.joint_action] : t.target_log_probs[scope.agent];
}

// Minibatch NLL for the network MLE fit.
class NllLoss : public nn::ScalarLoss {
 public:
  NllLoss(nn::MlpSpec spec, Eigen::MatrixXd inputs, std::vector<int> actions)
      : spec_(std::move(spec)), inputs_(std::move(inputs)), actions_(std::move(actions)) {}
  int param_size() const override { return spec_.param_count(); }

  double value(const Eigen::VectorXd& params) const override {
    const nn::ParamVector p(spec_, params);
    const Eigen::MatrixXd log_probs = log_softmax_cols(nn::mlp_forward_batch(spec_, p, inputs_));
    double sum = 0.0;
    for (size_t j = 0; j < actions_.size(); ++j) sum -= log_probs(actions_[j], j);
    return sum / actions_.size();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const override {
    const nn::ParamVector p(spec_, params);
    nn::MlpForwardCache cache;
    const Eigen::MatrixXd log_probs =
        log_softmax_cols(nn::mlp_forward_batch(spec_, p, inputs_, &cache));
    const double inv_b = 1.0 / static_cast<double>(actions_.size());
    Eigen::MatrixXd g(log_probs.rows(), log_probs.cols());
    for (size_t j = 0; j < actions_.size(); ++j) {
      g.col(j) = inv_b * log_probs.col(j).array().exp().matrix();
      g(actions_[j], j) -= inv_b;
    }
    return nn::mlp_backward_batch(spec_, p, cache, g);
  }

 private:
  nn::MlpSpec spec_;
  Eigen::MatrixXd inputs_;
  std::vector<int> actions_;
};

}  // namespace

double tv_distance(const env::VisitationDistribution& a, const env::VisitationDistribution& b) {
  if (a.mass.rows() != b.mass.rows() || a.mass.cols() != b.mass.cols()) {
    throw std::invalid_argument("tv_distance: distributions live on different index spaces");
  }
  return 0.5 * (a.mass - b.mass).cwiseAbs().sum();
}

env::VisitationDistribution empirical_visitation(const env::Game& game,
                                                 const TransitionBuffer& buffer) {
  env::VisitationDistribution d;
  d.mass = Eigen::MatrixXd::Zero(game.state_count(), game.joint_actions().size());
  if (buffer.empty()) return d;
  const double w = 1.0 / buffer.size();
  for (const Transition& t : buffer.items()) d.mass(t.state, t.joint_action) += w;
  return d;
}

FittedPolicy FittedPolicy::tabular(MetricScope scope,
                                   std::unordered_map<env::StateId, Eigen::VectorXd> log_table) {
  FittedPolicy f;
  f.scope_ = scope;
  f.tabular_ = true;
  f.log_table_ = std::move(log_table);
  return f;
}

FittedPolicy FittedPolicy::network(MetricScope scope, nn::MlpSpec spec, nn::ParamVector params) {
  FittedPolicy f;
  f.scope_ = scope;
  f.tabular_ = false;
  f.spec_ = std::move(spec);
  f.params_ = std::move(params);
  return f;
}

double FittedPolicy::log_prob(const Transition& t) const {
  const int action = scope_action(scope_, t);
  if (tabular_) {
    auto it = log_table_.find(t.state);
    if (it == log_table_.end()) {
      throw std::invalid_argument("FittedPolicy: state was not in the fitted buffer");
    }
    return it->second[action];
  }
  return nn::log_softmax(nn::mlp_forward(spec_, params_, scope_obs(scope_, t)))[action];
}

Eigen::VectorXd FittedPolicy::distribution_at(const env::Game& game, env::StateId s) const {
  if (tabular_) {
    auto it = log_table_.find(s);
    if (it == log_table_.end()) {
      throw std::invalid_argument("FittedPolicy: state was not in the fitted buffer");
    }
    return it->second.array().exp();
  }
  const Eigen::VectorXd obs =
      scope_.joint ? game.joint_observation(s) : game.observation(s, scope_.agent);
  return nn::softmax(nn::mlp_forward(spec_, params_, obs));
}

FittedPolicy fit_tabular_policy(const TransitionBuffer& buffer, MetricScope scope) {
  if (buffer.empty()) throw std::invalid_argument("fit_tabular_policy: empty buffer");
  // Action-space size: joint vector length, or the largest per-agent index seen.
  int n_actions = scope.joint ? static_cast<int>(buffer[0].joint_target_log.size()) : 0;
  if (!scope.joint) {
    for (const Transition& t : buffer.items()) {
      n_actions = std::max(n_actions, t.actions[scope.agent] + 1);
    }
  }
  std::unordered_map<env::StateId, Eigen::VectorXd> counts;
  for (const Transition& t : buffer.items()) {
    auto& c = counts[t.state];
    if (c.size() == 0) c = Eigen::VectorXd::Zero(n_actions);
    c[scope_action(scope, t)] += 1.0;
  }
  std::unordered_map<env::StateId, Eigen::VectorXd> log_table;
  for (auto& [s, c] : counts) {
    log_table[s] = (c / c.sum()).array().log();
  }
  return FittedPolicy::tabular(scope, std::move(log_table));
}

FittedPolicy fit_mle_policy(const env::Game& game, const TransitionBuffer& buffer,
                            MetricScope scope, const MleConfig& cfg, nn::Rng& rng) {
  if (buffer.empty()) throw std::invalid_argument("fit_mle_policy: empty buffer");
  if (cfg.epochs < 1) throw std::invalid_argument("fit_mle_policy: epochs must be >= 1");

  nn::MlpSpec spec;
  spec.input_dim = scope.joint ? game.joint_observation_dim() : game.observation_dim(scope.agent);
  spec.hidden_dims = {64, 64};
  spec.output_dim =
      scope.joint ? game.joint_actions().size() : game.action_counts()[scope.agent];
  nn::ParamVector params = nn::init_mlp_params(spec, rng, 0.01);
  nn::AdamState opt = nn::AdamState::for_size(params.size());

  const std::vector<int> all = buffer.all_indices();
  std::vector<int> all_actions(buffer.size());
  for (int j = 0; j < buffer.size(); ++j) all_actions[j] = scope_action(scope, buffer[j]);
  const Eigen::MatrixXd all_inputs = scope.joint
                                         ? buffer.gather_joint_obs(all)
                                         : buffer.gather_agent_obs(scope.agent, all);
  const NllLoss full_loss(spec, all_inputs, all_actions);

  double prev = full_loss.value(params.values());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<int> perm = rng.permutation(buffer.size());
    for (int lo = 0; lo < buffer.size(); lo += cfg.minibatch) {
      const int hi = std::min(lo + cfg.minibatch, buffer.size());
      const std::vector<int> idx(perm.begin() + lo, perm.begin() + hi);
      std::vector<int> actions(idx.size());
      for (size_t j = 0; j < idx.size(); ++j) actions[j] = scope_action(scope, buffer[idx[j]]);
      const NllLoss loss(spec,
                         scope.joint ? buffer.gather_joint_obs(idx)
                                     : buffer.gather_agent_obs(scope.agent, idx),
                         actions);
      const Eigen::VectorXd g = nn::grad(loss, params.values());
      nn::adam_step_inplace(params.values(), opt, g, cfg.lr);
    }
    const double now = full_loss.value(params.values());
    if (prev - now < cfg.early_stop_tol) break;
    prev = now;
  }
  return FittedPolicy::network(scope, std::move(spec), std::move(params));
}

double kl_sampling_error(const TransitionBuffer& buffer, MetricScope scope,
                         const FittedPolicy& fitted) {
  if (buffer.empty()) throw std::invalid_argument("kl_sampling_error: empty buffer");
  double sum = 0.0;
  for (const Transition& t : buffer.items()) {
    const double ref = scope_reference_log(scope, t);
    if (ref < kMinReferenceLog) {
      throw DegenerateSupportError("reference probability below 1e-12 at an observed sample");
    }
    sum += fitted.log_prob(t) - ref;
  }
  return sum / buffer.size();
}

double success_rate(const env::Game& game, const policy::JointTargetPolicy& joint,
                    int n_episodes, nn::Rng& rng) {
  int successes = 0;
  env::Episode ep(game);
  std::vector<int> actions(game.num_agents());
  for (int e = 0; e < n_episodes; ++e) {
    ep.reset();
    bool success = false;
    while (true) {
      for (int i = 0; i < game.num_agents(); ++i) {
        actions[i] = nn::categorical_sample(
            policy::agent_dist(joint.agent(i), game.observation(ep.state(), i)), rng);
      }
      const env::Episode::Result r = ep.step(actions, rng);
      success = success || r.success;
      if (r.terminal || r.truncated) break;
    }
    if (success) ++successes;
  }
  return static_cast<double>(successes) / n_episodes;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, double level,
                                       int resamples, nn::Rng& rng) {
  if (samples.empty()) throw std::invalid_argument("bootstrap_ci: no samples");
  const int n = static_cast<int>(samples.size());
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += samples[rng.uniform_int(n)];
    means[r] = sum / n;
  }
  std::sort(means.begin(), means.end());
  const auto quantile = [&](double q) {
    const int idx = static_cast<int>(std::llround(q * (resamples - 1)));
    return means[std::clamp(idx, 0, resamples - 1)];
  };
  const double alpha = (1.0 - level) / 2.0;
  return {quantile(alpha), quantile(1.0 - alpha)};
}

}  // namespace jointsampler::metrics
