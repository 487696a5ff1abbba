#ifndef JOINTSAMPLER_NN_LOSS_HPP_
#define JOINTSAMPLER_NN_LOSS_HPP_

#include <Eigen/Dense>

#include "jointsampler/nn/mlp.hpp"

namespace jointsampler::nn {

// A scalar loss over a fixed minibatch, differentiable with respect to a flat
// parameter vector (one ParamVector, or several stacked back to back).
// Implementations provide the analytic gradient; tests check every loss used
// in the project against central finite differences.
class ScalarLoss {
 public:
  virtual ~ScalarLoss() = default;
  virtual int param_size() const = 0;
  virtual double value(const Eigen::VectorXd& params) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& params) const = 0;
};

// dLoss/dParams with size and finiteness checks on the result.
Eigen::VectorXd grad(const ScalarLoss& loss, const Eigen::VectorXd& params);
Eigen::VectorXd grad(const ScalarLoss& loss, const ParamVector& params);

// Rescale `gradient` in place so its L2 norm is at most `max_norm`.
// Returns the post-clip norm.
double clip_grad_norm(Eigen::VectorXd& gradient, double max_norm);

}  // namespace jointsampler::nn

#endif  // JOINTSAMPLER_NN_LOSS_HPP_
