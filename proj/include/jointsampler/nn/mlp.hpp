#ifndef JOINTSAMPLER_NN_MLP_HPP_
#define JOINTSAMPLER_NN_MLP_HPP_

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "jointsampler/nn/rng.hpp"

namespace jointsampler::nn {

enum class Activation { kTanh };

// Architecture of a small fully connected network: input -> hidden... -> output,
// tanh on hidden layers, linear output.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims = {64, 64};
  int output_dim = 1;
  Activation activation = Activation::kTanh;
  bool zero_final_layer = false;

  int layer_count() const { return static_cast<int>(hidden_dims.size()) + 1; }
  int fan_in(int layer) const;
  int fan_out(int layer) const;
  int param_count() const;
  void validate() const;  // throws std::invalid_argument

  bool operator==(const MlpSpec&) const = default;
};

// Flat parameter store for one MlpSpec. Layout per layer: weights (row-major,
// out x in), then biases. flatten/unflatten round-trips exactly.
class ParamVector {
 public:
  using WeightMap =
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstWeightMap =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  ParamVector() = default;
  explicit ParamVector(const MlpSpec& spec);  // zero-initialized
  ParamVector(const MlpSpec& spec, Eigen::VectorXd values);

  const MlpSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  ConstWeightMap weight(int layer) const;
  WeightMap weight(int layer);
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::VectorXd> bias(int layer);

  // Layer-shaped view of the flat vector and its inverse.
  std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> unflatten() const;
  static ParamVector flatten(const MlpSpec& spec,
                             const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& layers);

 private:
  int weight_offset(int layer) const;
  int bias_offset(int layer) const;

  MlpSpec spec_;
  Eigen::VectorXd values_;
};

// Orthogonal rows scaled by `gain` (the usual PPO recipe): hidden layers use
// gain sqrt(2), the final layer uses `final_gain` (small for actor heads) or is
// zeroed when the spec says so. Biases start at zero.
ParamVector init_mlp_params(const MlpSpec& spec, Rng& rng, double final_gain = 0.01);

// Single-input forward pass. Throws std::invalid_argument on dimension
// mismatch and NumericError (with layer index) on non-finite intermediates.
Eigen::VectorXd mlp_forward(const MlpSpec& spec, const ParamVector& params,
                            const Eigen::VectorXd& input);

// Activations retained by a batched forward pass for the matching backward pass.
struct MlpForwardCache {
  Eigen::MatrixXd inputs;                  // input_dim x batch
  std::vector<Eigen::MatrixXd> hidden;     // post-tanh activations per hidden layer
  Eigen::MatrixXd outputs;                 // output_dim x batch
};

// Batched forward: inputs are columns. Optionally fills `cache`.
Eigen::MatrixXd mlp_forward_batch(const MlpSpec& spec, const ParamVector& params,
                                  const Eigen::MatrixXd& inputs,
                                  MlpForwardCache* cache = nullptr);

// Reverse pass: given dLoss/dOutputs (same shape as cache.outputs), returns
// dLoss/dParams as a flat vector. Does not touch dLoss/dInputs.
Eigen::VectorXd mlp_backward_batch(const MlpSpec& spec, const ParamVector& params,
                                   const MlpForwardCache& cache,
                                   const Eigen::MatrixXd& dl_doutputs);

}  // namespace jointsampler::nn

#endif  // JOINTSAMPLER_NN_MLP_HPP_
