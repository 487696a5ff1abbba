#ifndef JOINTSAMPLER_HARNESS_RECORD_HPP_
#define JOINTSAMPLER_HARNESS_RECORD_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jointsampler/harness/config.hpp"
#include "jointsampler/policy/policy.hpp"
#include "jointsampler/ppo/ppo.hpp"

namespace jointsampler::harness {

// One metrics.csv line. Missing metrics stay unset and serialize as empty
// fields, never as zero.
struct MetricsRow {
  int64_t step = 0;
  std::optional<double> success_rate;
  std::optional<double> tv_joint;
  std::optional<double> kl_joint;
  std::array<std::optional<double>, 2> kl_agent;

  bool operator==(const MetricsRow&) const = default;
};

inline constexpr const char* kMetricsHeader =
    "step,seed,success_rate,tv_joint,kl_joint,kl_agent_1,kl_agent_2";

struct RunRecord {
  ExperimentConfig config;
  uint64_t seed = 0;
  std::vector<MetricsRow> rows;
  double wall_seconds = 0.0;
};

// Final parameters of a run: per-agent actors plus critics.
struct TrainedPolicies {
  policy::JointTargetPolicy joint;
  std::vector<ppo::Critic> critics;
};

std::string format_metrics_row(const MetricsRow& row, uint64_t seed);
MetricsRow parse_metrics_row(const std::string& line, const std::string& filename, int line_no);

// Run directory layout: `config` (flat key=value), `metrics.csv`,
// `final_params` (binary, versioned header), and `metrics_shadow.csv` when
// shadow metrics were recorded.
void persist_run(const RunRecord& record, const TrainedPolicies* params, const std::string& dir);
RunRecord load_run(const std::string& dir);

void save_params(const std::string& path, const TrainedPolicies& params);
TrainedPolicies load_params(const std::string& path);

}  // namespace jointsampler::harness

#endif  // JOINTSAMPLER_HARNESS_RECORD_HPP_
