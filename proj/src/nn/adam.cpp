#include "jointsampler/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "jointsampler/errors.hpp"

namespace jointsampler::nn {

void adam_step_inplace(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& gradient,
                       double lr) {
  if (gradient.size() != params.size()) {
    throw std::invalid_argument("adam_step: gradient length mismatch");
  }
  if (!gradient.allFinite()) {
    throw NumericError("adam_step: non-finite gradient");
  }
  state.step_count += 1;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient;
  state.second_moment = state.beta2 * state.second_moment.array().matrix() +
                        (1.0 - state.beta2) * gradient.array().square().matrix();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  params.array() -= lr * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + state.epsilon);
}

std::pair<ParamVector, AdamState> adam_step(const ParamVector& params, const AdamState& state,
                                            const Eigen::VectorXd& gradient, double lr) {
  ParamVector p = params;
  AdamState s = state;
  adam_step_inplace(p.values(), s, gradient, lr);
  return {std::move(p), std::move(s)};
}

}  // namespace jointsampler::nn
