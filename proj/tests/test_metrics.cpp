#include <doctest.h>

#include <cmath>

#include "jointsampler/errors.hpp"
#include "jointsampler/metrics/metrics.hpp"
#include "test_support.hpp"

using namespace jointsampler;

namespace {

policy::AgentPolicy constant_logit_agent(int obs_dim, const Eigen::VectorXd& logits) {
  nn::MlpSpec spec;
  spec.input_dim = obs_dim;
  spec.hidden_dims = {};
  spec.output_dim = static_cast<int>(logits.size());
  nn::ParamVector p(spec);
  p.bias(0) = logits;
  return {spec, p};
}

policy::JointTargetPolicy uniform_joint(const env::Game& game) {
  std::vector<policy::AgentPolicy> agents;
  for (int i = 0; i < game.num_agents(); ++i) {
    agents.push_back(constant_logit_agent(game.observation_dim(i),
                                          Eigen::VectorXd::Zero(game.action_counts()[i])));
  }
  return policy::JointTargetPolicy(std::move(agents));
}

TransitionBuffer matrix_buffer(const env::Game& game, const policy::JointTargetPolicy& joint,
                               const std::vector<int>& joint_actions) {
  TransitionBuffer buffer;
  for (int a : joint_actions) {
    Transition t;
    t.state = 0;
    t.next_state = 0;
    for (int i = 0; i < game.num_agents(); ++i) {
      t.agent_obs.push_back(game.observation(0, i));
      t.next_agent_obs.push_back(game.observation(0, i));
    }
    t.joint_obs = game.joint_observation(0);
    t.next_joint_obs = t.joint_obs;
    t.actions = game.joint_actions().decode(a);
    t.joint_action = a;
    t.joint_target_log = joint.joint_log_vector(game, 0);
    t.target_log_probs.resize(game.num_agents());
    for (int i = 0; i < game.num_agents(); ++i) {
      t.target_log_probs[i] = std::log(
          policy::agent_dist(joint.agent(i), game.observation(0, i))[t.actions[i]]);
    }
    t.rewards = Eigen::Vector2d(0, 0);
    t.terminal = false;
    t.truncated = true;
    buffer.push(t);
  }
  return buffer;
}

env::VisitationDistribution dist_from(const std::vector<double>& row) {
  env::VisitationDistribution d;
  d.mass = Eigen::MatrixXd::Zero(1, row.size());
  for (size_t i = 0; i < row.size(); ++i) d.mass(0, i) = row[i];
  return d;
}

}  // namespace

TEST_CASE("tv_distance basics") {
  const auto same = dist_from({0.25, 0.25, 0.25, 0.25});
  CHECK(metrics::tv_distance(same, same) == 0.0);

  const auto a = dist_from({1.0, 0.0});
  const auto b = dist_from({0.0, 1.0});
  CHECK(metrics::tv_distance(a, b) == 1.0);

  const auto skew = dist_from({0.0, 0.5, 0.5, 0.0});
  const auto uniform = dist_from({0.25, 0.25, 0.25, 0.25});
  CHECK(metrics::tv_distance(skew, uniform) == 0.5);
  CHECK(metrics::tv_distance(uniform, skew) == 0.5);  // symmetric

  env::VisitationDistribution other;
  other.mass = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(metrics::tv_distance(a, other), std::invalid_argument);
}

TEST_CASE("empirical_visitation counts buffer frequencies") {
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  const TransitionBuffer buffer = matrix_buffer(*game, joint, {1, 1, 2, 2});
  const auto d = metrics::empirical_visitation(*game, buffer);
  CHECK(d.mass(0, 1) == 0.5);
  CHECK(d.mass(0, 2) == 0.5);
  CHECK(d.mass(0, 0) == 0.0);
  CHECK(d.sum() == doctest::Approx(1.0));
}

TEST_CASE("tabular fit reproduces empirical frequencies exactly") {
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  const TransitionBuffer buffer = matrix_buffer(*game, joint, {0, 0, 0, 1});
  const auto fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint());
  const Eigen::VectorXd d = fit.distribution_at(*game, 0);
  CHECK(d[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("kl_sampling_error: fitted equal to the reference gives zero") {
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  const TransitionBuffer buffer = matrix_buffer(*game, joint, {0, 1, 2, 3});
  std::unordered_map<env::StateId, Eigen::VectorXd> table;
  table[0] = Eigen::VectorXd::Constant(4, std::log(0.25));
  const auto fitted = metrics::FittedPolicy::tabular(metrics::MetricScope::Joint(), table);
  CHECK(metrics::kl_sampling_error(buffer, metrics::MetricScope::Joint(), fitted) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kl_sampling_error on the alternating buffer: ln 2 joint, zero per agent") {
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  // alternating (A,B)/(B,A): joint actions 1 and 2
  const TransitionBuffer buffer = matrix_buffer(*game, joint, {1, 2, 1, 2, 1, 2, 1, 2});

  const auto joint_fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint());
  CHECK(metrics::kl_sampling_error(buffer, metrics::MetricScope::Joint(), joint_fit) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));

  for (int agent = 0; agent < 2; ++agent) {
    const auto fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Agent(agent));
    CHECK(metrics::kl_sampling_error(buffer, metrics::MetricScope::Agent(agent), fit) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("exact tabular kl equals the closed-form sum over actions") {
  nn::Rng rng(3);
  const auto game = env::make_game("climbing");
  const policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  const TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 300, rng);
  const auto fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint());
  const double got = metrics::kl_sampling_error(buffer, metrics::MetricScope::Joint(), fit);

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(9);
  for (const Transition& t : buffer.items()) counts[t.joint_action] += 1.0;
  const Eigen::VectorXd empirical = counts / buffer.size();
  const Eigen::VectorXd target = joint.joint_distribution(*game, 0);
  double want = 0.0;
  for (int a = 0; a < 9; ++a) {
    if (empirical[a] > 0) want += empirical[a] * std::log(empirical[a] / target[a]);
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("sampling error of on-policy data vanishes with buffer size") {
  nn::Rng rng(5);
  const auto game = env::make_game("g1");
  const policy::JointTargetPolicy joint = policy::make_joint_policy(*game, rng);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  const TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 100000, rng);
  const auto fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint());
  CHECK(metrics::kl_sampling_error(buffer, metrics::MetricScope::Joint(), fit) <= 0.05);
}

TEST_CASE("kl_sampling_error rejects degenerate reference support") {
  const auto game = env::make_game("g1");
  std::vector<policy::AgentPolicy> agents;
  agents.push_back(constant_logit_agent(1, Eigen::Vector2d(60.0, 0.0)));
  agents.push_back(constant_logit_agent(1, Eigen::Vector2d(0.0, 0.0)));
  const policy::JointTargetPolicy joint(std::move(agents));
  const TransitionBuffer buffer = matrix_buffer(*game, joint, {2});
  const auto fit = metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint());
  CHECK_THROWS_AS(metrics::kl_sampling_error(buffer, metrics::MetricScope::Joint(), fit),
                  DegenerateSupportError);
}

TEST_CASE("network MLE fit: degenerate buffer concentrates on the repeated action") {
  nn::Rng rng(7);
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  const TransitionBuffer buffer = matrix_buffer(*game, joint, std::vector<int>(50, 2));
  const metrics::MleConfig cfg;
  const auto fit = metrics::fit_mle_policy(*game, buffer, metrics::MetricScope::Joint(), cfg, rng);
  CHECK(fit.distribution_at(*game, 0)[2] >= 0.95);
}

TEST_CASE("network MLE fit approaches the uniform source distribution") {
  nn::Rng rng(9);
  const auto game = env::make_game("g1");
  const auto joint = uniform_joint(*game);
  const policy::BehaviorPolicy on_policy =
      policy::init_behavior(policy::SamplerMode::kOnPolicy, *game, joint, rng);
  const TransitionBuffer buffer = test::collect_buffer(*game, joint, on_policy, 2000, rng);
  const metrics::MleConfig cfg;
  const auto fit = metrics::fit_mle_policy(*game, buffer, metrics::MetricScope::Joint(), cfg, rng);
  const Eigen::VectorXd d = fit.distribution_at(*game, 0);
  const double tv = 0.5 * (d - Eigen::VectorXd::Constant(4, 0.25)).cwiseAbs().sum();
  CHECK(tv < 0.05);
}

TEST_CASE("network MLE fit recovers per-state empirical frequencies") {
  nn::Rng rng(11);
  const auto gw = env::make_game("gridworld");
  const auto joint = uniform_joint(*gw);
  const env::StateId s0 = gw->initial_state();
  nn::Rng step_rng(0);
  const env::StateId s1 = gw->step(s0, {4, 0}, step_rng).next_state;
  REQUIRE(s0 != s1);

  TransitionBuffer buffer;
  const auto add = [&](env::StateId s, int a0, int reps) {
    for (int k = 0; k < reps; ++k) {
      Transition t;
      t.state = s;
      t.next_state = s;
      for (int i = 0; i < 2; ++i) {
        t.agent_obs.push_back(gw->observation(s, i));
        t.next_agent_obs.push_back(gw->observation(s, i));
      }
      t.joint_obs = gw->joint_observation(s);
      t.next_joint_obs = t.joint_obs;
      t.actions = {a0, 0};
      t.joint_action = gw->joint_actions().encode(t.actions);
      t.joint_target_log = joint.joint_log_vector(*gw, s);
      t.target_log_probs = {std::log(0.2), std::log(0.2)};
      t.rewards = Eigen::Vector2d(0, 0);
      t.terminal = false;
      t.truncated = false;
      buffer.push(t);
    }
  };
  add(s0, 0, 6);
  add(s0, 1, 2);
  add(s1, 2, 4);

  metrics::MleConfig cfg;
  cfg.epochs = 400;
  const auto fit = metrics::fit_mle_policy(*gw, buffer, metrics::MetricScope::Agent(0), cfg, rng);
  CHECK(fit.distribution_at(*gw, s0)[0] == doctest::Approx(0.75).epsilon(0.07));
  CHECK(fit.distribution_at(*gw, s1)[2] >= 0.9);
}

TEST_CASE("success_rate on deterministic policies") {
  const auto game = env::make_game("g19");
  nn::Rng rng(13);
  {
    std::vector<policy::AgentPolicy> agents;
    agents.push_back(constant_logit_agent(1, Eigen::Vector2d(40.0, 0.0)));
    agents.push_back(constant_logit_agent(1, Eigen::Vector2d(40.0, 0.0)));
    const policy::JointTargetPolicy optimal(std::move(agents));
    CHECK(metrics::success_rate(*game, optimal, 100, rng) == 1.0);
  }
  {
    std::vector<policy::AgentPolicy> agents;
    agents.push_back(constant_logit_agent(1, Eigen::Vector2d(0.0, 40.0)));
    agents.push_back(constant_logit_agent(1, Eigen::Vector2d(0.0, 40.0)));
    const policy::JointTargetPolicy suboptimal(std::move(agents));
    CHECK(metrics::success_rate(*game, suboptimal, 100, rng) == 0.0);
  }
  {
    const auto uniform = uniform_joint(*game);
    // 100 episodes of a binomial(0.25): within 0.1 of the mean, inclusive
    const double sr = metrics::success_rate(*game, uniform, 100, rng);
    CHECK(sr >= 0.15);
    CHECK(sr <= 0.35);
  }
}

TEST_CASE("bootstrap_ci basics") {
  nn::Rng rng(17);
  const auto [lo, hi] = metrics::bootstrap_ci({2.0, 2.0, 2.0, 2.0}, 0.95, 500, rng);
  CHECK(lo == 2.0);
  CHECK(hi == 2.0);

  std::vector<double> samples;
  nn::Rng data_rng(19);
  for (int i = 0; i < 40; ++i) samples.push_back(data_rng.normal() + 1.0);
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= samples.size();
  const auto [l2, h2] = metrics::bootstrap_ci(samples, 0.95, 1000, rng);
  CHECK(l2 <= mean);
  CHECK(h2 >= mean);
}

TEST_CASE("bootstrap interval width matches the CLT prediction") {
  nn::Rng data_rng(23), rng(29);
  std::vector<double> samples;
  for (int i = 0; i < 1000; ++i) samples.push_back(data_rng.normal());
  const auto [lo, hi] = metrics::bootstrap_ci(samples, 0.95, 1000, rng);
  const double width = hi - lo;
  CHECK(width > 0.10);
  CHECK(width < 0.16);
}
