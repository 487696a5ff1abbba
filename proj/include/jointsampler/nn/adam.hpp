#ifndef JOINTSAMPLER_NN_ADAM_HPP_
#define JOINTSAMPLER_NN_ADAM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "jointsampler/nn/mlp.hpp"

namespace jointsampler::nn {

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(int n) {
    AdamState s;
    s.first_moment = Eigen::VectorXd::Zero(n);
    s.second_moment = Eigen::VectorXd::Zero(n);
    return s;
  }
};

// One Adam update with bias correction, in place. Throws NumericError on a
// non-finite gradient.
void adam_step_inplace(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& gradient,
                       double lr);

// Value-returning form over a ParamVector.
std::pair<ParamVector, AdamState> adam_step(const ParamVector& params, const AdamState& state,
                                            const Eigen::VectorXd& gradient, double lr);

}  // namespace jointsampler::nn

#endif  // JOINTSAMPLER_NN_ADAM_HPP_
