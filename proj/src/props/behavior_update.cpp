#include "jointsampler/props/behavior_update.hpp"

#include <cmath>
#include <stdexcept>

#include "jointsampler/errors.hpp"
#include "jointsampler/nn/adam.hpp"
#include "jointsampler/nn/distributions.hpp"

namespace jointsampler::props {

namespace {

constexpr double kMinTargetProb = 1e-12;
const double kMinTargetLog = std::log(kMinTargetProb);

// Column-wise log-softmax of a logits matrix (one sample per column).
Eigen::MatrixXd log_softmax_cols(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out = z;
  const Eigen::VectorXd mx = z.colwise().maxCoeff();
  out.rowwise() -= mx.transpose();
  const Eigen::VectorXd lse = out.array().exp().colwise().sum().log().matrix();
  out.rowwise() -= lse.transpose();
  return out;
}

void check_target_log(double target_log) {
  if (target_log < kMinTargetLog) {
    throw DegenerateRatioError("target probability below 1e-12 for a collected action");
  }
}

// Surrogate per sample: min(-rho, -clip(rho, 1-eps, 1+eps)) = -max(rho, clip(rho)).
double surrogate_value(double rho, double eps) {
  return rho < 1.0 - eps ? -(1.0 - eps) : -rho;
}

// The surrogate passes gradient through rho everywhere except on the flat
// branch below 1-eps, where the clipped term wins and is constant.
bool surrogate_active(double rho, double eps) { return rho >= 1.0 - eps; }

std::vector<int> chunk(const std::vector<int>& perm, int n_chunks, int c) {
  const int b = static_cast<int>(perm.size());
  const int lo = static_cast<int>(static_cast<long>(b) * c / n_chunks);
  const int hi = static_cast<int>(static_cast<long>(b) * (c + 1) / n_chunks);
  return {perm.begin() + lo, perm.begin() + hi};
}

}  // namespace

void BehaviorUpdateConfig::validate() const {
  if (clip_eps <= 0.0) throw std::invalid_argument("behavior clip_eps must be > 0");
  if (target_kl < 0.0) throw std::invalid_argument("behavior target_kl must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("behavior batch_size must be >= 1");
  if (n_epoch < 1 || n_minibatch < 1) {
    throw std::invalid_argument("behavior n_epoch and n_minibatch must be >= 1");
  }
  if (lr < 0.0) throw std::invalid_argument("behavior lr must be >= 0");
}

MaPropsSurrogate::MaPropsSurrogate(const TransitionBuffer& buffer, std::vector<int> idx,
                                   nn::MlpSpec delta_spec, double clip_eps)
    : delta_spec_(std::move(delta_spec)), clip_eps_(clip_eps) {
  inputs_ = buffer.gather_joint_obs(idx);
  target_logs_ = buffer.gather_joint_target_log(idx);
  actions_.reserve(idx.size());
  for (int i : idx) {
    actions_.push_back(buffer[i].joint_action);
    check_target_log(buffer[i].joint_target_log[buffer[i].joint_action]);
  }
}

void MaPropsSurrogate::forward(const Eigen::VectorXd& params, nn::MlpForwardCache* cache,
                               Eigen::MatrixXd* log_probs, Eigen::VectorXd* ratios) const {
  const nn::ParamVector p(delta_spec_, params);
  const Eigen::MatrixXd delta_out = nn::mlp_forward_batch(delta_spec_, p, inputs_, cache);
  *log_probs = log_softmax_cols(target_logs_ + delta_out);
  ratios->resize(actions_.size());
  for (size_t j = 0; j < actions_.size(); ++j) {
    (*ratios)[j] = std::exp((*log_probs)(actions_[j], j) - target_logs_(actions_[j], j));
  }
}

double MaPropsSurrogate::value(const Eigen::VectorXd& params) const {
  Eigen::MatrixXd log_probs;
  Eigen::VectorXd ratios;
  forward(params, nullptr, &log_probs, &ratios);
  double sum = 0.0;
  for (int j = 0; j < ratios.size(); ++j) sum += surrogate_value(ratios[j], clip_eps_);
  return sum / ratios.size();
}

Eigen::VectorXd MaPropsSurrogate::gradient(const Eigen::VectorXd& params) const {
  nn::MlpForwardCache cache;
  Eigen::MatrixXd log_probs;
  Eigen::VectorXd ratios;
  forward(params, &cache, &log_probs, &ratios);
  const double inv_b = 1.0 / static_cast<double>(actions_.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(log_probs.rows(), log_probs.cols());
  for (size_t j = 0; j < actions_.size(); ++j) {
    if (!surrogate_active(ratios[j], clip_eps_)) continue;
    g.col(j) = ratios[j] * inv_b * log_probs.col(j).array().exp().matrix();
    g(actions_[j], j) -= ratios[j] * inv_b;
  }
  const nn::ParamVector p(delta_spec_, params);
  return nn::mlp_backward_batch(delta_spec_, p, cache, g);
}

PropsAgentSurrogate::PropsAgentSurrogate(const TransitionBuffer& buffer, std::vector<int> idx,
                                         int agent, nn::MlpSpec spec, double clip_eps)
    : spec_(std::move(spec)), clip_eps_(clip_eps) {
  inputs_ = buffer.gather_agent_obs(agent, idx);
  actions_.reserve(idx.size());
  target_log_.resize(idx.size());
  for (size_t j = 0; j < idx.size(); ++j) {
    const Transition& t = buffer[idx[j]];
    actions_.push_back(t.actions[agent]);
    target_log_[j] = t.target_log_probs[agent];
    check_target_log(target_log_[j]);
  }
}

double PropsAgentSurrogate::value(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  const Eigen::MatrixXd log_probs =
      log_softmax_cols(nn::mlp_forward_batch(spec_, p, inputs_));
  double sum = 0.0;
  for (size_t j = 0; j < actions_.size(); ++j) {
    const double rho = std::exp(log_probs(actions_[j], j) - target_log_[j]);
    sum += surrogate_value(rho, clip_eps_);
  }
  return sum / actions_.size();
}

Eigen::VectorXd PropsAgentSurrogate::gradient(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(spec_, params);
  nn::MlpForwardCache cache;
  const Eigen::MatrixXd log_probs =
      log_softmax_cols(nn::mlp_forward_batch(spec_, p, inputs_, &cache));
  const double inv_b = 1.0 / static_cast<double>(actions_.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(log_probs.rows(), log_probs.cols());
  for (size_t j = 0; j < actions_.size(); ++j) {
    const double rho = std::exp(log_probs(actions_[j], j) - target_log_[j]);
    if (!surrogate_active(rho, clip_eps_)) continue;
    g.col(j) = rho * inv_b * log_probs.col(j).array().exp().matrix();
    g(actions_[j], j) -= rho * inv_b;
  }
  return nn::mlp_backward_batch(spec_, p, cache, g);
}

PropsJointSurrogate::PropsJointSurrogate(const TransitionBuffer& buffer, std::vector<int> idx,
                                         std::vector<nn::MlpSpec> agent_specs, double clip_eps)
    : specs_(std::move(agent_specs)), clip_eps_(clip_eps) {
  const int n_agents = static_cast<int>(specs_.size());
  inputs_.reserve(n_agents);
  actions_.assign(n_agents, {});
  for (int i = 0; i < n_agents; ++i) {
    inputs_.push_back(buffer.gather_agent_obs(i, idx));
    actions_[i].reserve(idx.size());
  }
  joint_target_log_.resize(idx.size());
  for (size_t j = 0; j < idx.size(); ++j) {
    const Transition& t = buffer[idx[j]];
    double lp = 0.0;
    for (int i = 0; i < n_agents; ++i) {
      actions_[i].push_back(t.actions[i]);
      lp += t.target_log_probs[i];
    }
    joint_target_log_[j] = lp;
    check_target_log(lp);
  }
}

int PropsJointSurrogate::param_size() const {
  int n = 0;
  for (const auto& s : specs_) n += s.param_count();
  return n;
}

double PropsJointSurrogate::value(const Eigen::VectorXd& params) const {
  const int b = static_cast<int>(joint_target_log_.size());
  Eigen::VectorXd behavior_log = Eigen::VectorXd::Zero(b);
  int off = 0;
  for (size_t i = 0; i < specs_.size(); ++i) {
    const nn::ParamVector p(specs_[i], params.segment(off, specs_[i].param_count()));
    off += specs_[i].param_count();
    const Eigen::MatrixXd log_probs =
        log_softmax_cols(nn::mlp_forward_batch(specs_[i], p, inputs_[i]));
    for (int j = 0; j < b; ++j) behavior_log[j] += log_probs(actions_[i][j], j);
  }
  double sum = 0.0;
  for (int j = 0; j < b; ++j) {
    sum += surrogate_value(std::exp(behavior_log[j] - joint_target_log_[j]), clip_eps_);
  }
  return sum / b;
}

Eigen::VectorXd PropsJointSurrogate::gradient(const Eigen::VectorXd& params) const {
  const int b = static_cast<int>(joint_target_log_.size());
  const int n_agents = static_cast<int>(specs_.size());
  std::vector<nn::MlpForwardCache> caches(n_agents);
  std::vector<Eigen::MatrixXd> log_probs(n_agents);
  Eigen::VectorXd behavior_log = Eigen::VectorXd::Zero(b);
  int off = 0;
  std::vector<nn::ParamVector> ps;
  ps.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    ps.emplace_back(specs_[i], params.segment(off, specs_[i].param_count()));
    off += specs_[i].param_count();
    log_probs[i] = log_softmax_cols(nn::mlp_forward_batch(specs_[i], ps[i], inputs_[i], &caches[i]));
    for (int j = 0; j < b; ++j) behavior_log[j] += log_probs[i](actions_[i][j], j);
  }
  Eigen::VectorXd out(param_size());
  const double inv_b = 1.0 / b;
  off = 0;
  for (int i = 0; i < n_agents; ++i) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(log_probs[i].rows(), b);
    for (int j = 0; j < b; ++j) {
      const double rho = std::exp(behavior_log[j] - joint_target_log_[j]);
      if (!surrogate_active(rho, clip_eps_)) continue;
      g.col(j) = rho * inv_b * log_probs[i].col(j).array().exp().matrix();
      g(actions_[i][j], j) -= rho * inv_b;
    }
    out.segment(off, specs_[i].param_count()) =
        nn::mlp_backward_batch(specs_[i], ps[i], caches[i], g);
    off += specs_[i].param_count();
  }
  return out;
}

MaPropsNll::MaPropsNll(const TransitionBuffer& buffer, std::vector<int> idx,
                       nn::MlpSpec delta_spec)
    : delta_spec_(std::move(delta_spec)) {
  inputs_ = buffer.gather_joint_obs(idx);
  target_logs_ = buffer.gather_joint_target_log(idx);
  actions_.reserve(idx.size());
  for (int i : idx) actions_.push_back(buffer[i].joint_action);
}

double MaPropsNll::value(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(delta_spec_, params);
  const Eigen::MatrixXd log_probs =
      log_softmax_cols(target_logs_ + nn::mlp_forward_batch(delta_spec_, p, inputs_));
  double sum = 0.0;
  for (size_t j = 0; j < actions_.size(); ++j) sum -= log_probs(actions_[j], j);
  return sum / actions_.size();
}

Eigen::VectorXd MaPropsNll::gradient(const Eigen::VectorXd& params) const {
  const nn::ParamVector p(delta_spec_, params);
  nn::MlpForwardCache cache;
  const Eigen::MatrixXd log_probs =
      log_softmax_cols(target_logs_ + nn::mlp_forward_batch(delta_spec_, p, inputs_, &cache));
  const double inv_b = 1.0 / static_cast<double>(actions_.size());
  Eigen::MatrixXd g(log_probs.rows(), log_probs.cols());
  for (size_t j = 0; j < actions_.size(); ++j) {
    g.col(j) = inv_b * log_probs.col(j).array().exp().matrix();
    g(actions_[j], j) -= inv_b;
  }
  return nn::mlp_backward_batch(delta_spec_, p, cache, g);
}

PropsJointNll::PropsJointNll(const TransitionBuffer& buffer, std::vector<int> idx,
                             std::vector<nn::MlpSpec> agent_specs)
    : specs_(std::move(agent_specs)) {
  const int n_agents = static_cast<int>(specs_.size());
  actions_.assign(n_agents, {});
  for (int i = 0; i < n_agents; ++i) {
    inputs_.push_back(buffer.gather_agent_obs(i, idx));
    for (int j : idx) actions_[i].push_back(buffer[j].actions[i]);
  }
}

int PropsJointNll::param_size() const {
  int n = 0;
  for (const auto& s : specs_) n += s.param_count();
  return n;
}

double PropsJointNll::value(const Eigen::VectorXd& params) const {
  double sum = 0.0;
  int off = 0;
  for (size_t i = 0; i < specs_.size(); ++i) {
    const nn::ParamVector p(specs_[i], params.segment(off, specs_[i].param_count()));
    off += specs_[i].param_count();
    const Eigen::MatrixXd log_probs =
        log_softmax_cols(nn::mlp_forward_batch(specs_[i], p, inputs_[i]));
    for (size_t j = 0; j < actions_[i].size(); ++j) sum -= log_probs(actions_[i][j], j);
  }
  return sum / actions_[0].size();
}

Eigen::VectorXd PropsJointNll::gradient(const Eigen::VectorXd& params) const {
  Eigen::VectorXd out(param_size());
  const double inv_b = 1.0 / static_cast<double>(actions_[0].size());
  int off = 0;
  for (size_t i = 0; i < specs_.size(); ++i) {
    const nn::ParamVector p(specs_[i], params.segment(off, specs_[i].param_count()));
    nn::MlpForwardCache cache;
    const Eigen::MatrixXd log_probs =
        log_softmax_cols(nn::mlp_forward_batch(specs_[i], p, inputs_[i], &cache));
    Eigen::MatrixXd g(log_probs.rows(), log_probs.cols());
    for (size_t j = 0; j < actions_[i].size(); ++j) {
      g.col(j) = inv_b * log_probs.col(j).array().exp().matrix();
      g(actions_[i][j], j) -= inv_b;
    }
    out.segment(off, specs_[i].param_count()) =
        nn::mlp_backward_batch(specs_[i], p, cache, g);
    off += specs_[i].param_count();
  }
  return out;
}

Eigen::VectorXd stack_behavior_params(const policy::BehaviorPolicy& b) {
  int n = 0;
  for (const auto& a : b.agents()) n += a.params.size();
  Eigen::VectorXd flat(n);
  int off = 0;
  for (const auto& a : b.agents()) {
    flat.segment(off, a.params.size()) = a.params.values();
    off += a.params.size();
  }
  return flat;
}

void unstack_behavior_params(const Eigen::VectorXd& flat, policy::BehaviorPolicy& b) {
  int off = 0;
  for (auto& a : b.agents()) {
    a.params.values() = flat.segment(off, a.params.size());
    off += a.params.size();
  }
}

double props_loss(const policy::BehaviorPolicy& behavior,
                  const policy::JointTargetPolicy& /*target*/, const env::Game& /*game*/,
                  const TransitionBuffer& batch, double clip_eps) {
  if (batch.empty()) throw std::invalid_argument("props_loss: empty batch");
  const std::vector<int> idx = batch.all_indices();
  switch (behavior.mode()) {
    case policy::SamplerMode::kOnPolicy: {
      // rho is identically 1; still validate target support.
      for (int i : idx) check_target_log(batch[i].joint_target_log[batch[i].joint_action]);
      return -1.0;
    }
    case policy::SamplerMode::kProps: {
      std::vector<nn::MlpSpec> specs;
      for (const auto& a : behavior.agents()) specs.push_back(a.spec);
      return PropsJointSurrogate(batch, idx, std::move(specs), clip_eps)
          .value(stack_behavior_params(behavior));
    }
    case policy::SamplerMode::kMaProps:
      return MaPropsSurrogate(batch, idx, behavior.delta_spec(), clip_eps)
          .value(behavior.delta_params().values());
  }
  throw std::logic_error("unreachable");
}

double behavior_kl_estimate(const policy::BehaviorPolicy& behavior,
                            const policy::JointTargetPolicy& /*target*/, const env::Game& /*game*/,
                            const TransitionBuffer& buffer) {
  // Target log-probs come from the buffer: they were stored at collection time
  // and the target is frozen between target updates.
  if (buffer.empty()) throw std::invalid_argument("behavior_kl_estimate: empty buffer");
  const std::vector<int> idx = buffer.all_indices();
  const int b = buffer.size();
  Eigen::VectorXd behavior_log = Eigen::VectorXd::Zero(b);
  switch (behavior.mode()) {
    case policy::SamplerMode::kOnPolicy: {
      return 0.0;
    }
    case policy::SamplerMode::kProps: {
      for (size_t i = 0; i < behavior.agents().size(); ++i) {
        const auto& a = behavior.agents()[i];
        const Eigen::MatrixXd log_probs = log_softmax_cols(
            nn::mlp_forward_batch(a.spec, a.params, buffer.gather_agent_obs(static_cast<int>(i), idx)));
        for (int j = 0; j < b; ++j) behavior_log[j] += log_probs(buffer[j].actions[i], j);
      }
      break;
    }
    case policy::SamplerMode::kMaProps: {
      const Eigen::MatrixXd delta_out = nn::mlp_forward_batch(
          behavior.delta_spec(), behavior.delta_params(), buffer.gather_joint_obs(idx));
      const Eigen::MatrixXd log_probs =
          log_softmax_cols(buffer.gather_joint_target_log(idx) + delta_out);
      for (int j = 0; j < b; ++j) behavior_log[j] = log_probs(buffer[j].joint_action, j);
      break;
    }
  }
  double kl = 0.0;
  for (int j = 0; j < b; ++j) {
    kl += buffer[j].joint_target_log[buffer[j].joint_action] - behavior_log[j];
  }
  return kl / b;
}

policy::BehaviorPolicy update_behavior(policy::BehaviorPolicy behavior, const env::Game& game,
                                       const policy::JointTargetPolicy& target,
                                       const TransitionBuffer& buffer,
                                       const BehaviorUpdateConfig& cfg, nn::Rng& shuffle_rng) {
  cfg.validate();
  if (buffer.empty()) throw std::invalid_argument("update_behavior: empty buffer");
  if (behavior.mode() == policy::SamplerMode::kOnPolicy) return behavior;

  const int n_agents = static_cast<int>(behavior.agents().size());
  std::vector<nn::AdamState> agent_states;
  nn::AdamState delta_state;
  if (behavior.mode() == policy::SamplerMode::kProps) {
    for (const auto& a : behavior.agents()) {
      agent_states.push_back(nn::AdamState::for_size(a.params.size()));
    }
  } else {
    delta_state = nn::AdamState::for_size(behavior.delta_params().size());
  }

  for (int epoch = 0; epoch < cfg.n_epoch; ++epoch) {
    const std::vector<int> perm = shuffle_rng.permutation(buffer.size());
    for (int c = 0; c < cfg.n_minibatch; ++c) {
      const std::vector<int> idx = chunk(perm, cfg.n_minibatch, c);
      if (idx.empty()) continue;
      if (behavior.mode() == policy::SamplerMode::kMaProps) {
        const MaPropsSurrogate loss(buffer, idx, behavior.delta_spec(), cfg.clip_eps);
        // gradient ascent on the surrogate
        const Eigen::VectorXd g = -nn::grad(loss, behavior.delta_params().values());
        nn::adam_step_inplace(behavior.delta_params().values(), delta_state, g, cfg.lr);
      } else {
        for (int i = 0; i < n_agents; ++i) {
          auto& agent = behavior.agents()[i];
          const PropsAgentSurrogate loss(buffer, idx, i, agent.spec, cfg.clip_eps);
          const Eigen::VectorXd g = -nn::grad(loss, agent.params.values());
          nn::adam_step_inplace(agent.params.values(), agent_states[i], g, cfg.lr);
        }
      }
    }
    if (behavior_kl_estimate(behavior, target, game, buffer) > cfg.target_kl) break;
  }
  return behavior;
}

}  // namespace jointsampler::props
