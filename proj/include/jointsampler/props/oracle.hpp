#ifndef JOINTSAMPLER_PROPS_ORACLE_HPP_
#define JOINTSAMPLER_PROPS_ORACLE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "jointsampler/env/game.hpp"

namespace jointsampler::props {

// Per-state visit counts over joint actions.
class CountTable {
 public:
  explicit CountTable(int n_actions) : n_actions_(n_actions) {}

  void record(env::StateId s, int action);
  int64_t total(env::StateId s) const;
  const std::vector<int64_t>& counts(env::StateId s) const;
  Eigen::VectorXd frequencies(env::StateId s) const;  // zeros when the state is unseen

 private:
  int n_actions_;
  mutable std::unordered_map<env::StateId, std::vector<int64_t>> counts_;
  std::unordered_map<env::StateId, int64_t> totals_;
};

// argmax over a of [target(a) - count(a)/total], ties broken by lowest index.
// With no visits, the argmax of the target (ties -> lowest index).
int most_under_sampled(const std::vector<int64_t>& counts, int64_t total,
                       const Eigen::VectorXd& target);

int most_under_sampled_joint(const CountTable& counts, const Eigen::VectorXd& target,
                             env::StateId s);

// Per-agent variant on that agent's own counts.
int most_under_sampled_per_agent(const std::vector<int64_t>& counts_i, int64_t total,
                                 const Eigen::VectorXd& target_i);

// Stateful under-sampled-action selector for one agent at one state. Ties among
// maximal deficits resolve to the least recently selected action (never-selected
// first, then lowest index), so two independent selectors that start on
// different actions keep alternating instead of collapsing onto the same pick.
class RecencyTieBreakSelector {
 public:
  explicit RecencyTieBreakSelector(int n_actions)
      : counts_(n_actions, 0), last_pick_(n_actions, 0) {}

  // Chooses the most under-sampled action and records the pick.
  int select(const Eigen::VectorXd& target);

  // Registers an externally drawn action (e.g. a forced first sample).
  void record(int action);

  const std::vector<int64_t>& counts() const { return counts_; }
  int64_t total() const { return clock_; }

 private:
  std::vector<int64_t> counts_;
  std::vector<int64_t> last_pick_;  // 0 = never selected
  int64_t clock_ = 0;
};

}  // namespace jointsampler::props

#endif  // JOINTSAMPLER_PROPS_ORACLE_HPP_
