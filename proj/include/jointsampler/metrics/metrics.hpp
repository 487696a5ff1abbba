#ifndef JOINTSAMPLER_METRICS_METRICS_HPP_
#define JOINTSAMPLER_METRICS_METRICS_HPP_

#include <Eigen/Dense>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jointsampler/buffer.hpp"
#include "jointsampler/env/game.hpp"
#include "jointsampler/env/visitation.hpp"
#include "jointsampler/nn/mlp.hpp"
#include "jointsampler/policy/policy.hpp"

namespace jointsampler::metrics {

// Total variation distance between two distributions on the same
// (state, joint action) index space.
double tv_distance(const env::VisitationDistribution& a, const env::VisitationDistribution& b);

// Empirical (state, joint action) frequencies of a buffer.
env::VisitationDistribution empirical_visitation(const env::Game& game,
                                                 const TransitionBuffer& buffer);

struct MleConfig {
  int epochs = 200;
  double lr = 0.01;
  int minibatch = 64;
  bool mirror_architecture = true;  // reuse the actor's hidden layout
  double early_stop_tol = 1e-5;     // stop when epoch loss stops improving
};

// Which policy a sampling-error measurement refers to.
struct MetricScope {
  bool joint = true;
  int agent = 0;
  static MetricScope Joint() { return {true, 0}; }
  static MetricScope Agent(int i) { return {false, i}; }
};

// Maximum-likelihood estimate of the empirical policy in a buffer. Tabular
// fits are exact per-state frequencies; network fits are trained by minibatch
// gradient ascent on the buffer log-likelihood.
class FittedPolicy {
 public:
  static FittedPolicy tabular(MetricScope scope,
                              std::unordered_map<env::StateId, Eigen::VectorXd> log_table);
  static FittedPolicy network(MetricScope scope, nn::MlpSpec spec, nn::ParamVector params);

  const MetricScope& scope() const { return scope_; }

  // log probability this fit assigns to the transition's action (in scope).
  double log_prob(const Transition& t) const;

  // Action distribution at a state (network fits need the game for the obs).
  Eigen::VectorXd distribution_at(const env::Game& game, env::StateId s) const;

 private:
  MetricScope scope_;
  bool tabular_ = true;
  std::unordered_map<env::StateId, Eigen::VectorXd> log_table_;
  nn::MlpSpec spec_;
  nn::ParamVector params_;
};

// Exact MLE: per-state empirical action frequencies.
FittedPolicy fit_tabular_policy(const TransitionBuffer& buffer, MetricScope scope);

// Network MLE per the config; fresh initialization per fit.
FittedPolicy fit_mle_policy(const env::Game& game, const TransitionBuffer& buffer,
                            MetricScope scope, const MleConfig& cfg, nn::Rng& rng);

// Monte Carlo KL(pi_D || pi_theta): mean over buffer samples of
// log fitted(a|s) - log reference(a|s), with the reference read from the
// collection-time target log-probs. Throws DegenerateSupportError when the
// reference probability at an observed sample is below 1e-12.
double kl_sampling_error(const TransitionBuffer& buffer, MetricScope scope,
                         const FittedPolicy& fitted);

// Fraction of evaluation episodes achieving the task's optimal event, with
// actions sampled stochastically from the target policies.
double success_rate(const env::Game& game, const policy::JointTargetPolicy& joint,
                    int n_episodes, nn::Rng& rng);

// Percentile bootstrap confidence interval of the mean.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, double level,
                                       int resamples, nn::Rng& rng);

}  // namespace jointsampler::metrics

#endif  // JOINTSAMPLER_METRICS_METRICS_HPP_
