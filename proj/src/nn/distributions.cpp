#include "jointsampler/nn/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace jointsampler::nn {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw std::invalid_argument("softmax: empty logits");
  const double m = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - m).exp();
  return p / p.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw std::invalid_argument("log_softmax: empty logits");
  const double m = logits.maxCoeff();
  const Eigen::ArrayXd shifted = logits.array() - m;
  const double lse = std::log(shifted.exp().sum());
  return (shifted - lse).matrix();
}

int categorical_sample(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Rounding left u past the accumulated total; return the last positive entry.
  for (int i = n - 1; i >= 0; --i) {
    if (probs[i] > 0.0) return i;
  }
  return n - 1;
}

double entropy(const Eigen::VectorXd& probs) {
  double h = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) h -= probs[i] * std::log(probs[i]);
  }
  return h;
}

}  // namespace jointsampler::nn
