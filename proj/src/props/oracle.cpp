#include "jointsampler/props/oracle.hpp"

#include <limits>
#include <stdexcept>

namespace jointsampler::props {

void CountTable::record(env::StateId s, int action) {
  if (action < 0 || action >= n_actions_) {
    throw std::invalid_argument("CountTable::record: action out of range");
  }
  auto& c = counts_[s];
  if (c.empty()) c.assign(n_actions_, 0);
  c[action] += 1;
  totals_[s] += 1;
}

int64_t CountTable::total(env::StateId s) const {
  auto it = totals_.find(s);
  return it == totals_.end() ? 0 : it->second;
}

const std::vector<int64_t>& CountTable::counts(env::StateId s) const {
  auto& c = counts_[s];
  if (c.empty()) c.assign(n_actions_, 0);
  return c;
}

Eigen::VectorXd CountTable::frequencies(env::StateId s) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_actions_);
  const int64_t t = total(s);
  if (t == 0) return f;
  const auto& c = counts(s);
  for (int a = 0; a < n_actions_; ++a) f[a] = static_cast<double>(c[a]) / t;
  return f;
}

int most_under_sampled(const std::vector<int64_t>& counts, int64_t total,
                       const Eigen::VectorXd& target) {
  const int n = static_cast<int>(target.size());
  int best = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const double freq =
        total == 0 ? 0.0 : static_cast<double>(counts.empty() ? 0 : counts[a]) / total;
    const double deficit = target[a] - freq;
    if (deficit > best_deficit) {
      best_deficit = deficit;
      best = a;
    }
  }
  return best;
}

int most_under_sampled_joint(const CountTable& counts, const Eigen::VectorXd& target,
                             env::StateId s) {
  return most_under_sampled(counts.counts(s), counts.total(s), target);
}

int most_under_sampled_per_agent(const std::vector<int64_t>& counts_i, int64_t total,
                                 const Eigen::VectorXd& target_i) {
  return most_under_sampled(counts_i, total, target_i);
}

int RecencyTieBreakSelector::select(const Eigen::VectorXd& target) {
  const int n = static_cast<int>(target.size());
  int best = -1;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const double freq = clock_ == 0 ? 0.0 : static_cast<double>(counts_[a]) / clock_;
    const double deficit = target[a] - freq;
    // Strictly-better deficit wins; on an exact tie prefer the action whose
    // last selection is oldest.
    if (deficit > best_deficit ||
        (deficit == best_deficit && best >= 0 && last_pick_[a] < last_pick_[best])) {
      best_deficit = deficit;
      best = a;
    }
  }
  record(best);
  return best;
}

void RecencyTieBreakSelector::record(int action) {
  if (action < 0 || action >= static_cast<int>(counts_.size())) {
    throw std::invalid_argument("RecencyTieBreakSelector::record: action out of range");
  }
  counts_[action] += 1;
  clock_ += 1;
  last_pick_[action] = clock_;
}

}  // namespace jointsampler::props
