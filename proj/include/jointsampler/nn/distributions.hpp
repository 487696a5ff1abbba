#ifndef JOINTSAMPLER_NN_DISTRIBUTIONS_HPP_
#define JOINTSAMPLER_NN_DISTRIBUTIONS_HPP_

#include <Eigen/Dense>

#include "jointsampler/nn/rng.hpp"

namespace jointsampler::nn {

// Max-subtracted softmax, normalized so entries sum to 1.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Numerically stable log(softmax(logits)).
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

// Inverse-CDF draw from a probability vector.
int categorical_sample(const Eigen::VectorXd& probs, Rng& rng);

// Entropy of a probability vector (0 log 0 := 0).
double entropy(const Eigen::VectorXd& probs);

}  // namespace jointsampler::nn

#endif  // JOINTSAMPLER_NN_DISTRIBUTIONS_HPP_
