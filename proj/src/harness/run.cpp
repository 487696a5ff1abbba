#include "jointsampler/harness/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "jointsampler/env/visitation.hpp"
#include "jointsampler/errors.hpp"

namespace jointsampler::harness {

namespace fs = std::filesystem;

nn::Rng stream_rng(uint64_t seed, Stream stream, uint64_t index) {
  return nn::Rng::derive(seed, static_cast<uint64_t>(stream), index);
}

namespace {

Transition make_transition(const env::Game& game, env::StateId state,
                           const policy::JointSample& sample, const env::Episode::Result& res) {
  Transition t;
  t.state = state;
  t.next_state = res.next_state;
  t.agent_obs.reserve(game.num_agents());
  t.next_agent_obs.reserve(game.num_agents());
  for (int i = 0; i < game.num_agents(); ++i) {
    t.agent_obs.push_back(game.observation(state, i));
    t.next_agent_obs.push_back(game.observation(res.next_state, i));
  }
  t.joint_obs = game.joint_observation(state);
  t.next_joint_obs = game.joint_observation(res.next_state);
  t.actions = sample.actions;
  t.joint_action = sample.joint_index;
  t.target_log_probs = sample.target_log_probs;
  t.joint_target_log = sample.joint_target_log;
  t.rewards = res.rewards;
  t.terminal = res.terminal;
  t.truncated = res.truncated;
  return t;
}

// Incremental run-directory writer. The config snapshot goes out first, rows
// stream into metrics.csv as they are produced.
class RunWriter {
 public:
  RunWriter(const std::string& dir, const ExperimentConfig& cfg) : dir_(dir) {
    if (dir_.empty()) return;
    fs::create_directories(dir_);
    {
      std::ofstream out(fs::path(dir_) / "config");
      out << serialize_config(cfg);
    }
    csv_.open(fs::path(dir_) / "metrics.csv");
    csv_ << kMetricsHeader << "\n";
    csv_.flush();
  }

  void append(const MetricsRow& row, uint64_t seed) {
    if (dir_.empty()) return;
    csv_ << format_metrics_row(row, seed) << "\n";
    csv_.flush();
  }

  void append_shadow(const MetricsRow& row, uint64_t seed) {
    if (dir_.empty()) return;
    if (!shadow_.is_open()) {
      shadow_.open(fs::path(dir_) / "metrics_shadow.csv");
      shadow_ << kMetricsHeader << "\n";
    }
    shadow_ << format_metrics_row(row, seed) << "\n";
    shadow_.flush();
  }

  void finish(double wall_seconds, const TrainedPolicies* params) {
    if (dir_.empty()) return;
    {
      std::ofstream out(fs::path(dir_) / "config", std::ios::app);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "# wall_seconds = %.6f\n", wall_seconds);
      out << buf;
    }
    if (params) save_params((fs::path(dir_) / "final_params").string(), *params);
  }

 private:
  std::string dir_;
  std::ofstream csv_;
  std::ofstream shadow_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SamplingErrorResult sampling_error_metrics(const env::Game& game,
                                           const policy::JointTargetPolicy& joint,
                                           const TransitionBuffer& buffer,
                                           const metrics::MleConfig& mle_cfg, nn::Rng& mle_rng) {
  SamplingErrorResult out;
  const long pairs = static_cast<long>(game.state_count()) * game.joint_actions().size();
  if (pairs <= kExactMetricCap) {
    const env::VisitationDistribution truth = env::true_visitation(
        game, [&](env::StateId s) { return joint.joint_distribution(game, s); });
    out.tv_joint = metrics::tv_distance(metrics::empirical_visitation(game, buffer), truth);
    out.kl_joint = metrics::kl_sampling_error(
        buffer, metrics::MetricScope::Joint(),
        metrics::fit_tabular_policy(buffer, metrics::MetricScope::Joint()));
    for (int i = 0; i < 2; ++i) {
      out.kl_agent[i] = metrics::kl_sampling_error(
          buffer, metrics::MetricScope::Agent(i),
          metrics::fit_tabular_policy(buffer, metrics::MetricScope::Agent(i)));
    }
  } else {
    out.kl_joint = metrics::kl_sampling_error(
        buffer, metrics::MetricScope::Joint(),
        metrics::fit_mle_policy(game, buffer, metrics::MetricScope::Joint(), mle_cfg, mle_rng));
    for (int i = 0; i < 2; ++i) {
      out.kl_agent[i] = metrics::kl_sampling_error(
          buffer, metrics::MetricScope::Agent(i),
          metrics::fit_mle_policy(game, buffer, metrics::MetricScope::Agent(i), mle_cfg,
                                  mle_rng));
    }
  }
  return out;
}

RunRecord run_training(const ExperimentConfig& cfg, const std::string& out_dir,
                       TrainedPolicies* final) {
  cfg.validate();
  if (cfg.fixed_policy) {
    throw std::invalid_argument("run_training: config is in fixed-policy mode");
  }
  const auto game = env::make_game(cfg.game);
  nn::Rng policy_init = stream_rng(cfg.seed, Stream::kPolicyInit);
  nn::Rng behavior_init = stream_rng(cfg.seed, Stream::kBehaviorInit);
  nn::Rng sampling = stream_rng(cfg.seed, Stream::kSampling);
  nn::Rng shuffle = stream_rng(cfg.seed, Stream::kShuffle);
  nn::Rng eval = stream_rng(cfg.seed, Stream::kEval);
  nn::Rng shadow_rng = stream_rng(cfg.seed, Stream::kShadow);
  nn::Rng mle_rng = stream_rng(cfg.seed, Stream::kMle);

  policy::JointTargetPolicy joint = policy::make_joint_policy(*game, policy_init);
  std::vector<ppo::Critic> critics;
  const ppo::CriticInput critic_input =
      cfg.algo == Algo::kMappo ? ppo::CriticInput::kJointState : ppo::CriticInput::kOwnObs;
  for (int i = 0; i < game->num_agents(); ++i) {
    critics.push_back(ppo::make_critic(*game, i, critic_input, policy_init));
  }
  ppo::PpoOptimState optim = ppo::PpoOptimState::make(joint, critics);
  policy::BehaviorPolicy behavior =
      policy::init_behavior(cfg.sampler, *game, joint, behavior_init);

  TransitionBuffer buffer;
  env::Episode ep(*game);
  env::Episode shadow_ep(*game);
  const metrics::MleConfig mle_cfg;

  RunRecord record;
  record.config = cfg;
  record.seed = cfg.seed;
  RunWriter writer(out_dir, cfg);
  const auto start = Clock::now();

  const int64_t n = cfg.ppo.batch_size;
  const int64_t m = cfg.behavior.batch_size;
  const int64_t total_batches = cfg.steps / n;
  int64_t batch_index = 0;
  int64_t step = 0;

  try {
    for (step = 1; step <= cfg.steps; ++step) {
      const env::StateId s = ep.state();
      const policy::JointSample sample = policy::sample_joint(behavior, *game, joint, s, sampling);
      const env::Episode::Result res = ep.step(sample.actions, sampling);
      buffer.push(make_transition(*game, s, sample, res));
      if (res.terminal || res.truncated) ep.reset();

      if (cfg.sampler != policy::SamplerMode::kOnPolicy && step % m == 0) {
        behavior = props::update_behavior(
            policy::init_behavior(cfg.sampler, *game, joint, behavior_init), *game, joint, buffer,
            cfg.behavior, shuffle);
      }

      if (step % n == 0) {
        ++batch_index;
        MetricsRow row;
        row.step = step;
        bool have_row = false;

        if (cfg.metric_every_batches > 0 && batch_index % cfg.metric_every_batches == 0) {
          const SamplingErrorResult se =
              sampling_error_metrics(*game, joint, buffer, mle_cfg, mle_rng);
          row.tv_joint = se.tv_joint;
          row.kl_joint = se.kl_joint;
          row.kl_agent = se.kl_agent;
          have_row = true;

          if (cfg.shadow_metrics && cfg.sampler != policy::SamplerMode::kOnPolicy) {
            // On-policy comparison buffer from the same target-policy sequence;
            // never touches training state.
            TransitionBuffer shadow;
            const policy::BehaviorPolicy on_policy = policy::init_behavior(
                policy::SamplerMode::kOnPolicy, *game, joint, shadow_rng);
            for (int64_t k = 0; k < n; ++k) {
              const env::StateId ss = shadow_ep.state();
              const policy::JointSample sp =
                  policy::sample_joint(on_policy, *game, joint, ss, shadow_rng);
              const env::Episode::Result rr = shadow_ep.step(sp.actions, shadow_rng);
              shadow.push(make_transition(*game, ss, sp, rr));
              if (rr.terminal || rr.truncated) shadow_ep.reset();
            }
            const SamplingErrorResult sse =
                sampling_error_metrics(*game, joint, shadow, mle_cfg, mle_rng);
            MetricsRow srow;
            srow.step = step;
            srow.tv_joint = sse.tv_joint;
            srow.kl_joint = sse.kl_joint;
            srow.kl_agent = sse.kl_agent;
            writer.append_shadow(srow, cfg.seed);
          }
        }

        ppo::ppo_update(*game, joint, critics, buffer, cfg.ppo, shuffle, optim);
        behavior = policy::init_behavior(cfg.sampler, *game, joint, behavior_init);

        const bool final_batch = batch_index == total_batches;
        if ((cfg.eval_every_batches > 0 && batch_index % cfg.eval_every_batches == 0) ||
            final_batch) {
          row.success_rate = metrics::success_rate(*game, joint, cfg.n_eval_episodes, eval);
          have_row = true;
        }

        if (have_row) {
          record.rows.push_back(row);
          writer.append(row, cfg.seed);
        }
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("run aborted at env step " + std::to_string(step) + ": " + e.what());
  }

  record.wall_seconds = seconds_since(start);
  TrainedPolicies params{std::move(joint), std::move(critics)};
  writer.finish(record.wall_seconds, &params);
  if (final) *final = std::move(params);
  return record;
}

RunRecord run_sampling_error(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (!cfg.fixed_policy) {
    throw std::invalid_argument("run_sampling_error: config must be in fixed-policy mode");
  }
  const auto game = env::make_game(cfg.game);
  nn::Rng policy_init = stream_rng(cfg.seed, Stream::kPolicyInit);
  nn::Rng behavior_init = stream_rng(cfg.seed, Stream::kBehaviorInit);
  nn::Rng sampling = stream_rng(cfg.seed, Stream::kSampling);
  nn::Rng shuffle = stream_rng(cfg.seed, Stream::kShuffle);
  nn::Rng mle_rng = stream_rng(cfg.seed, Stream::kMle);

  const policy::JointTargetPolicy joint = policy::make_joint_policy(*game, policy_init);
  policy::BehaviorPolicy behavior =
      policy::init_behavior(cfg.sampler, *game, joint, behavior_init);

  TransitionBuffer buffer;
  env::Episode ep(*game);
  const metrics::MleConfig mle_cfg;

  RunRecord record;
  record.config = cfg;
  record.seed = cfg.seed;
  RunWriter writer(out_dir, cfg);
  const auto start = Clock::now();

  size_t next_checkpoint = 0;
  int64_t step = 0;
  const int64_t m = cfg.behavior.batch_size;
  try {
    for (step = 1; step <= cfg.steps; ++step) {
      const env::StateId s = ep.state();
      const policy::JointSample sample = policy::sample_joint(behavior, *game, joint, s, sampling);
      const env::Episode::Result res = ep.step(sample.actions, sampling);
      buffer.push(make_transition(*game, s, sample, res));
      if (res.terminal || res.truncated) ep.reset();

      if (cfg.sampler != policy::SamplerMode::kOnPolicy && step % m == 0) {
        behavior = props::update_behavior(
            policy::init_behavior(cfg.sampler, *game, joint, behavior_init), *game, joint, buffer,
            cfg.behavior, shuffle);
      }

      if (next_checkpoint < cfg.checkpoints.size() && step == cfg.checkpoints[next_checkpoint]) {
        ++next_checkpoint;
        const SamplingErrorResult se =
            sampling_error_metrics(*game, joint, buffer, mle_cfg, mle_rng);
        MetricsRow row;
        row.step = step;
        row.tv_joint = se.tv_joint;
        row.kl_joint = se.kl_joint;
        row.kl_agent = se.kl_agent;
        record.rows.push_back(row);
        writer.append(row, cfg.seed);
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("run aborted at env step " + std::to_string(step) + ": " + e.what());
  }

  record.wall_seconds = seconds_since(start);
  writer.finish(record.wall_seconds, nullptr);
  return record;
}

}  // namespace jointsampler::harness
