#ifndef JOINTSAMPLER_PPO_PG_ESTIMATE_HPP_
#define JOINTSAMPLER_PPO_PG_ESTIMATE_HPP_

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace jointsampler::ppo {

// REINFORCE-style gradient decomposition for a tabular policy at a single
// state, written as  g = sum_a c_a * grad log pi(a):  each own action `a` is
// weighted by its empirical visitation d(a) times the sum of the stored joint
// advantages over the distinct (own, other) cells observed with it. Samples
// are (own action, other action) pairs; `advantages` is indexed the same way.
Eigen::VectorXd pg_action_coefficients(const std::vector<std::pair<int, int>>& samples,
                                       const Eigen::MatrixXd& advantages);

// Coefficient on grad log pi(0) for a two-action direct parameterization
// (where grad log pi(1) = -grad log pi(0) at pi = (1/2, 1/2)): c_0 - c_1.
double pg_first_action_coefficient(const std::vector<std::pair<int, int>>& samples,
                                   const Eigen::MatrixXd& advantages);

}  // namespace jointsampler::ppo

#endif  // JOINTSAMPLER_PPO_PG_ESTIMATE_HPP_
