#ifndef JOINTSAMPLER_HARNESS_SWEEP_HPP_
#define JOINTSAMPLER_HARNESS_SWEEP_HPP_

#include <functional>
#include <string>
#include <vector>

#include "jointsampler/harness/run.hpp"

namespace jointsampler::harness {

// Multi-run expansion of one base config over samplers x seeds. Runs share
// nothing and write to disjoint directories under out_root.
struct SweepSpec {
  ExperimentConfig base;
  std::vector<policy::SamplerMode> samplers;
  std::vector<uint64_t> seeds;
  bool sampling_error_mode = false;
  int jobs = 0;  // 0 = hardware concurrency
  std::string out_root;
};

struct SweepRun {
  policy::SamplerMode sampler;
  uint64_t seed;
  RunRecord record;
};

std::vector<SweepRun> run_sweep(const SweepSpec& spec);

// Aggregate per (sampler, step): mean and 95% percentile-bootstrap CI of each
// metric across seeds. Deterministic for a fixed bootstrap seed.
std::string summarize_runs(const std::vector<SweepRun>& runs, uint64_t bootstrap_seed);

inline constexpr const char* kSummaryHeader =
    "sampler,step,seeds,success_rate_mean,success_rate_lo,success_rate_hi,"
    "tv_joint_mean,tv_joint_lo,tv_joint_hi,kl_joint_mean,kl_joint_lo,kl_joint_hi,"
    "kl_agent_1_mean,kl_agent_1_lo,kl_agent_1_hi,kl_agent_2_mean,kl_agent_2_lo,kl_agent_2_hi";

// Runs `tasks` on up to `jobs` worker threads; rethrows the first failure.
void parallel_for_tasks(const std::vector<std::function<void()>>& tasks, int jobs);

}  // namespace jointsampler::harness

#endif  // JOINTSAMPLER_HARNESS_SWEEP_HPP_
