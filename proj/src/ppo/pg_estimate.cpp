#include "jointsampler/ppo/pg_estimate.hpp"

#include <set>
#include <stdexcept>

namespace jointsampler::ppo {

Eigen::VectorXd pg_action_coefficients(const std::vector<std::pair<int, int>>& samples,
                                       const Eigen::MatrixXd& advantages) {
  if (samples.empty()) throw std::invalid_argument("pg_action_coefficients: no samples");
  const int own_count = static_cast<int>(advantages.rows());
  Eigen::VectorXd own_visits = Eigen::VectorXd::Zero(own_count);
  std::set<std::pair<int, int>> cells;
  for (const auto& [own, other] : samples) {
    if (own < 0 || own >= own_count || other < 0 || other >= advantages.cols()) {
      throw std::invalid_argument("pg_action_coefficients: sample out of range");
    }
    own_visits[own] += 1.0;
    cells.insert({own, other});
  }
  own_visits /= static_cast<double>(samples.size());

  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(own_count);
  for (const auto& [own, other] : cells) {
    coeff[own] += advantages(own, other);
  }
  return coeff.cwiseProduct(own_visits);
}

double pg_first_action_coefficient(const std::vector<std::pair<int, int>>& samples,
                                   const Eigen::MatrixXd& advantages) {
  const Eigen::VectorXd c = pg_action_coefficients(samples, advantages);
  if (c.size() != 2) {
    throw std::invalid_argument("pg_first_action_coefficient: needs a two-action policy");
  }
  return c[0] - c[1];
}

}  // namespace jointsampler::ppo
