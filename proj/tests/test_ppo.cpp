#include <doctest.h>

#include <cmath>

#include "jointsampler/ppo/pg_estimate.hpp"
#include "jointsampler/ppo/ppo.hpp"
#include "test_support.hpp"

using namespace jointsampler;

namespace {

// Independent GAE oracle: double loop over future TD residuals of a single
// episode with a tail bootstrap.
Eigen::VectorXd gae_double_loop(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                double gamma, double lambda, double tail_bootstrap) {
  const int t_max = static_cast<int>(rewards.size());
  Eigen::VectorXd delta(t_max);
  for (int t = 0; t < t_max; ++t) {
    const double next_v = t + 1 < t_max ? values[t + 1] : tail_bootstrap;
    delta[t] = rewards[t] + gamma * next_v - values[t];
  }
  Eigen::VectorXd adv = Eigen::VectorXd::Zero(t_max);
  for (int t = 0; t < t_max; ++t) {
    for (int l = 0; t + l < t_max; ++l) {
      adv[t] += std::pow(gamma * lambda, l) * delta[t + l];
    }
  }
  return adv;
}

policy::AgentPolicy constant_logit_agent(int obs_dim, const Eigen::VectorXd& logits) {
  nn::MlpSpec spec;
  spec.input_dim = obs_dim;
  spec.hidden_dims = {};
  spec.output_dim = static_cast<int>(logits.size());
  nn::ParamVector p(spec);
  p.bias(0) = logits;
  return {spec, p};
}

}  // namespace

TEST_CASE("gae: lambda = gamma = 1 with zero values gives reward-to-go") {
  Eigen::VectorXd rewards(4);
  rewards << 1, 2, 3, 4;
  const Eigen::VectorXd values = Eigen::VectorXd::Zero(4);
  const std::vector<uint8_t> dones = {0, 0, 0, 1};
  const auto r = ppo::compute_gae(rewards, values, dones, 1.0, 1.0, 0.0);
  CHECK(r.advantages[0] == doctest::Approx(10.0));
  CHECK(r.advantages[1] == doctest::Approx(9.0));
  CHECK(r.advantages[2] == doctest::Approx(7.0));
  CHECK(r.advantages[3] == doctest::Approx(4.0));
  CHECK(r.returns == r.advantages + values);
}

TEST_CASE("gae: a single-step terminal episode has advantage r - V(s)") {
  Eigen::VectorXd rewards(1), values(1);
  rewards << 2.5;
  values << 0.7;
  const auto r = ppo::compute_gae(rewards, values, {1}, 0.99, 0.95, 0.0);
  CHECK(r.advantages[0] == doctest::Approx(2.5 - 0.7).epsilon(1e-12));
  CHECK(r.returns[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("gae matches the double-loop oracle within 1e-10") {
  nn::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd rewards(5), values(5);
    for (int i = 0; i < 5; ++i) {
      rewards[i] = rng.normal();
      values[i] = rng.normal();
    }
    const double tail = rng.normal();
    const double gamma = 0.99, lambda = 0.95;
    const auto got = ppo::compute_gae(rewards, values, {0, 0, 0, 0, 0}, gamma, lambda, tail);
    const Eigen::VectorXd want = gae_double_loop(rewards, values, gamma, lambda, tail);
    CHECK((got.advantages - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gae: the chain breaks at terminals inside the batch") {
  Eigen::VectorXd rewards(4), values(4);
  rewards << 1, 2, 3, 4;
  values << 0.1, 0.2, 0.3, 0.4;
  const std::vector<uint8_t> dones = {0, 1, 0, 1};
  const auto got = ppo::compute_gae(rewards, values, dones, 0.9, 0.8, 0.0);
  const auto first = ppo::compute_gae(rewards.head(2), values.head(2), {0, 1}, 0.9, 0.8, 0.0);
  const auto second = ppo::compute_gae(rewards.tail(2), values.tail(2), {0, 1}, 0.9, 0.8, 0.0);
  CHECK(got.advantages[0] == doctest::Approx(first.advantages[0]).epsilon(1e-12));
  CHECK(got.advantages[1] == doctest::Approx(first.advantages[1]).epsilon(1e-12));
  CHECK(got.advantages[2] == doctest::Approx(second.advantages[0]).epsilon(1e-12));
  CHECK(got.advantages[3] == doctest::Approx(second.advantages[1]).epsilon(1e-12));
}

TEST_CASE("normalize_advantages centers and scales per minibatch") {
  nn::Rng rng(7);
  Eigen::VectorXd adv(64);
  for (int i = 0; i < adv.size(); ++i) adv[i] = 3.0 + 2.5 * rng.normal();
  ppo::normalize_advantages(adv);
  CHECK(std::abs(adv.mean()) < 1e-9);
  const double sd = std::sqrt(adv.squaredNorm() / (adv.size() - 1));
  CHECK(std::abs(sd - 1.0) < 1e-6);
}

TEST_CASE("ppo loss gradients match finite differences") {
  nn::Rng rng(11);
  const auto game = env::make_game("gridworld");
  const policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  const TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 16, rng);
  const std::vector<int> idx = buffer.all_indices();

  std::vector<int> actions;
  Eigen::VectorXd old_log(buffer.size()), adv(buffer.size()), ret(buffer.size());
  for (int j = 0; j < buffer.size(); ++j) {
    actions.push_back(buffer[j].actions[0]);
    old_log[j] = buffer[j].target_log_probs[0];
    adv[j] = rng.normal();
    ret[j] = rng.normal();
  }

  const ppo::PpoPolicyLoss policy_loss(joint.agent(0).spec, buffer.gather_agent_obs(0, idx),
                                       actions, old_log, adv, 0.2, 0.01);
  // perturb so ratios are generic (away from the clip kinks)
  Eigen::VectorXd p = joint.agent(0).params.values();
  nn::Rng noise(3);
  for (int i = 0; i < p.size(); ++i) p[i] += 0.05 * noise.normal();
  CHECK(test::max_relative_error(policy_loss.gradient(p),
                                 test::finite_difference_gradient(policy_loss, p)) < 1e-4);

  ppo::Critic critic = ppo::make_critic(*game, 0, ppo::CriticInput::kJointState, rng);
  const ppo::ValueLoss value_loss(critic.spec, buffer.gather_joint_obs(idx), ret, 0.5);
  CHECK(test::max_relative_error(
            value_loss.gradient(critic.params.values()),
            test::finite_difference_gradient(value_loss, critic.params.values())) < 1e-4);
}

TEST_CASE("ppo_update requires a full buffer") {
  nn::Rng rng(13);
  const auto game = env::make_game("g1");
  policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  std::vector<ppo::Critic> critics;
  for (int i = 0; i < 2; ++i) {
    critics.push_back(ppo::make_critic(*game, i, ppo::CriticInput::kOwnObs, rng));
  }
  ppo::PpoOptimState optim = ppo::PpoOptimState::make(joint, critics);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 6, rng);
  ppo::PpoConfig cfg;
  cfg.batch_size = 20;
  nn::Rng shuffle(1);
  CHECK_THROWS_AS(ppo::ppo_update(*game, joint, critics, buffer, cfg, shuffle, optim),
                  std::invalid_argument);
}

TEST_CASE("ppo_update with lr = 0 changes nothing and clears the buffer") {
  nn::Rng rng(17);
  const auto game = env::make_game("g1");
  policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  std::vector<ppo::Critic> critics;
  for (int i = 0; i < 2; ++i) {
    critics.push_back(ppo::make_critic(*game, i, ppo::CriticInput::kJointState, rng));
  }
  ppo::PpoOptimState optim = ppo::PpoOptimState::make(joint, critics);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  ppo::PpoConfig cfg;
  cfg.batch_size = 20;
  cfg.lr = 0.0;
  TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 20, rng);
  const Eigen::VectorXd actor_before = joint.agent(0).params.values();
  const Eigen::VectorXd critic_before = critics[0].params.values();
  nn::Rng shuffle(1);
  ppo::ppo_update(*game, joint, critics, buffer, cfg, shuffle, optim);
  CHECK(joint.agent(0).params.values() == actor_before);
  CHECK(critics[0].params.values() == critic_before);
  CHECK(buffer.empty());
}

TEST_CASE("a consistently advantaged action gains probability") {
  nn::Rng rng(19);
  const auto game = env::make_game("g1");
  std::vector<policy::AgentPolicy> agents;
  agents.push_back(constant_logit_agent(1, Eigen::Vector2d(0, 0)));
  agents.push_back(constant_logit_agent(1, Eigen::Vector2d(0, 0)));
  policy::JointTargetPolicy joint(std::move(agents));
  std::vector<ppo::Critic> critics;
  for (int i = 0; i < 2; ++i) {
    critics.push_back(ppo::make_critic(*game, i, ppo::CriticInput::kOwnObs, rng));
  }
  ppo::PpoOptimState optim = ppo::PpoOptimState::make(joint, critics);

  // agent 1's action A earns +1, action B earns -1, regardless of agent 2
  TransitionBuffer buffer;
  for (int k = 0; k < 20; ++k) {
    const int a = k % 4;
    Transition t;
    t.state = 0;
    t.next_state = 0;
    for (int i = 0; i < 2; ++i) {
      t.agent_obs.push_back(game->observation(0, i));
      t.next_agent_obs.push_back(game->observation(0, i));
    }
    t.joint_obs = game->joint_observation(0);
    t.next_joint_obs = t.joint_obs;
    t.actions = game->joint_actions().decode(a);
    t.joint_action = a;
    t.target_log_probs = {std::log(0.5), std::log(0.5)};
    t.joint_target_log = Eigen::VectorXd::Constant(4, std::log(0.25));
    const double r = t.actions[0] == 0 ? 1.0 : -1.0;
    t.rewards = Eigen::Vector2d(r, r);
    t.terminal = false;
    t.truncated = true;
    buffer.push(t);
  }

  const double p_before = policy::agent_dist(joint.agent(0), game->observation(0, 0))[0];
  ppo::PpoConfig cfg;
  cfg.batch_size = 20;
  cfg.lr = 0.01;
  cfg.entropy_coef = 0.0;
  nn::Rng shuffle(1);
  ppo::ppo_update(*game, joint, critics, buffer, cfg, shuffle, optim);
  const double p_after = policy::agent_dist(joint.agent(0), game->observation(0, 0))[0];
  CHECK(p_after > p_before);
}

TEST_CASE("ppo ratios are exactly 1 before the first update, for every sampler") {
  nn::Rng rng(23);
  const auto game = env::make_game("climbing");
  const policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  for (const auto mode : {policy::SamplerMode::kOnPolicy, policy::SamplerMode::kProps,
                          policy::SamplerMode::kMaProps}) {
    const policy::BehaviorPolicy b = policy::init_behavior(mode, *game, joint, rng);
    const TransitionBuffer buffer = test::collect_buffer(*game, joint, b, 10, rng);
    for (const Transition& t : buffer.items()) {
      for (int i = 0; i < 2; ++i) {
        const Eigen::VectorXd logs = nn::log_softmax(
            policy::agent_logits(joint.agent(i), game->observation(t.state, i)));
        const double ratio = std::exp(logs[t.actions[i]] - t.target_log_probs[i]);
        CHECK(ratio == 1.0);
      }
    }
  }
}

TEST_CASE("tabular policy-gradient coefficients reproduce the worked example") {
  Eigen::MatrixXd advantages(2, 2);
  advantages << 7, -5, 1, -3;

  // all four joint actions observed once: the estimate is +2 grad log pi(A)
  const std::vector<std::pair<int, int>> all_four = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(ppo::pg_first_action_coefficient(all_four, advantages) == doctest::Approx(2.0));
  const Eigen::VectorXd c = ppo::pg_action_coefficients(all_four, advantages);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(-1.0));

  // sign flip under joint sampling error: off-diagonal samples make the
  // estimate point away from A even though each marginal is perfectly sampled
  const std::vector<std::pair<int, int>> skewed = {{0, 1}, {0, 1}, {1, 0}, {1, 0}};
  CHECK(ppo::pg_first_action_coefficient(skewed, advantages) < 0.0);
}
