#ifndef JOINTSAMPLER_HARNESS_CONFIG_HPP_
#define JOINTSAMPLER_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "jointsampler/policy/policy.hpp"
#include "jointsampler/ppo/ppo.hpp"
#include "jointsampler/props/behavior_update.hpp"

namespace jointsampler::harness {

enum class Algo { kMappo, kIppo };

std::string to_string(Algo algo);
Algo algo_from_string(const std::string& name);

// Everything a run needs beyond its output location. (config, seed) determines
// every sampled action, update, and metric.
struct ExperimentConfig {
  std::string game = "g1";
  Algo algo = Algo::kMappo;
  policy::SamplerMode sampler = policy::SamplerMode::kOnPolicy;
  uint64_t seed = 0;
  int64_t steps = 20000;

  // Cadences are in units of completed target batches; 0 disables.
  int64_t eval_every_batches = 10;
  int64_t metric_every_batches = 1;
  int n_eval_episodes = 100;
  bool shadow_metrics = true;

  // Fixed-policy sampling-error mode: no target updates, metrics at checkpoints.
  bool fixed_policy = false;
  std::vector<int64_t> checkpoints;

  ppo::PpoConfig ppo;
  props::BehaviorUpdateConfig behavior;

  void validate() const;  // throws std::invalid_argument
};

// Per-game defaults (batch sizes and learning rates per game family).
ExperimentConfig default_config(const std::string& game_id);

// Flat key registry shared by config files, CLI overrides, and snapshots.
const std::vector<std::string>& config_keys();
bool is_config_key(const std::string& key);
std::string get_config_value(const ExperimentConfig& cfg, const std::string& key);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// "key = value" lines in registry order.
std::string serialize_config(const ExperimentConfig& cfg);

// Parses flat key=value text. Unknown keys, duplicate keys, and malformed
// values raise ParseError naming the file and line. '#' starts a comment.
void apply_config_text(ExperimentConfig& cfg, const std::string& text,
                       const std::string& filename);

}  // namespace jointsampler::harness

#endif  // JOINTSAMPLER_HARNESS_CONFIG_HPP_
