#include "jointsampler/nn/loss.hpp"

#include <stdexcept>

#include "jointsampler/errors.hpp"

namespace jointsampler::nn {

Eigen::VectorXd grad(const ScalarLoss& loss, const Eigen::VectorXd& params) {
  if (params.size() != loss.param_size()) {
    throw std::invalid_argument("grad: parameter vector has wrong length");
  }
  Eigen::VectorXd g = loss.gradient(params);
  if (!g.allFinite()) {
    throw NumericError("grad: non-finite gradient");
  }
  return g;
}

Eigen::VectorXd grad(const ScalarLoss& loss, const ParamVector& params) {
  return grad(loss, params.values());
}

double clip_grad_norm(Eigen::VectorXd& gradient, double max_norm) {
  const double norm = gradient.norm();
  if (norm > max_norm && norm > 0.0) {
    gradient *= max_norm / norm;
    return max_norm;
  }
  return norm;
}

}  // namespace jointsampler::nn
