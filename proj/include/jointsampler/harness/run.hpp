#ifndef JOINTSAMPLER_HARNESS_RUN_HPP_
#define JOINTSAMPLER_HARNESS_RUN_HPP_

#include <string>

#include "jointsampler/harness/record.hpp"
#include "jointsampler/metrics/metrics.hpp"

namespace jointsampler::harness {

// Named rng streams derived from the master seed, so adding a consumer never
// perturbs the others.
enum class Stream : uint64_t {
  kEnv = 1,
  kPolicyInit,
  kBehaviorInit,
  kSampling,
  kShuffle,
  kEval,
  kBootstrap,
  kShadow,
  kMle,
};

nn::Rng stream_rng(uint64_t seed, Stream stream, uint64_t index = 0);

// Sampling-error measurements of one buffer against the frozen target policy.
// Small games (enumerable within the cap) get the exact treatment: TV against
// the exact visitation plus tabular KL fits. Larger games get network-MLE KLs.
struct SamplingErrorResult {
  std::optional<double> tv_joint;
  std::optional<double> kl_joint;
  std::array<std::optional<double>, 2> kl_agent;
};

SamplingErrorResult sampling_error_metrics(const env::Game& game,
                                           const policy::JointTargetPolicy& joint,
                                           const TransitionBuffer& buffer,
                                           const metrics::MleConfig& mle_cfg, nn::Rng& mle_rng);

// State-action pair cap under which sampling error uses the exact pathway.
inline constexpr int kExactMetricCap = 4096;

// The interleaved collect / behavior-update / target-update loop. When
// `out_dir` is nonempty the run directory is written incrementally. The final
// actor/critic parameters land in `final` when provided.
RunRecord run_training(const ExperimentConfig& cfg, const std::string& out_dir = "",
                       TrainedPolicies* final = nullptr);

// Fixed-policy sampling-error experiment: random target policies per seed,
// no target updates, metrics recorded at the configured checkpoints.
RunRecord run_sampling_error(const ExperimentConfig& cfg, const std::string& out_dir = "");

}  // namespace jointsampler::harness

#endif  // JOINTSAMPLER_HARNESS_RUN_HPP_
