#include "jointsampler/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "jointsampler/errors.hpp"

namespace jointsampler::nn {

int MlpSpec::fan_in(int layer) const {
  return layer == 0 ? input_dim : hidden_dims[layer - 1];
}

int MlpSpec::fan_out(int layer) const {
  return layer == layer_count() - 1 ? output_dim : hidden_dims[layer];
}

int MlpSpec::param_count() const {
  int n = 0;
  for (int l = 0; l < layer_count(); ++l) n += fan_out(l) * (fan_in(l) + 1);
  return n;
}

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) {
    throw std::invalid_argument("MlpSpec: dims must be >= 1");
  }
  for (int h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
  }
}

ParamVector::ParamVector(const MlpSpec& spec)
    : spec_(spec), values_(Eigen::VectorXd::Zero(spec.param_count())) {
  spec_.validate();
}

ParamVector::ParamVector(const MlpSpec& spec, Eigen::VectorXd values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.param_count()) {
    throw std::invalid_argument("ParamVector: got " + std::to_string(values_.size()) +
                                " values, spec implies " + std::to_string(spec_.param_count()));
  }
}

int ParamVector::weight_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l) off += spec_.fan_out(l) * (spec_.fan_in(l) + 1);
  return off;
}

int ParamVector::bias_offset(int layer) const {
  return weight_offset(layer) + spec_.fan_out(layer) * spec_.fan_in(layer);
}

ParamVector::ConstWeightMap ParamVector::weight(int layer) const {
  return ConstWeightMap(values_.data() + weight_offset(layer), spec_.fan_out(layer),
                        spec_.fan_in(layer));
}

ParamVector::WeightMap ParamVector::weight(int layer) {
  return WeightMap(values_.data() + weight_offset(layer), spec_.fan_out(layer),
                   spec_.fan_in(layer));
}

Eigen::Map<const Eigen::VectorXd> ParamVector::bias(int layer) const {
  return {values_.data() + bias_offset(layer), spec_.fan_out(layer)};
}

Eigen::Map<Eigen::VectorXd> ParamVector::bias(int layer) {
  return {values_.data() + bias_offset(layer), spec_.fan_out(layer)};
}

std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> ParamVector::unflatten() const {
  std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> layers;
  layers.reserve(spec_.layer_count());
  for (int l = 0; l < spec_.layer_count(); ++l) {
    layers.emplace_back(weight(l), bias(l));
  }
  return layers;
}

ParamVector ParamVector::flatten(
    const MlpSpec& spec,
    const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& layers) {
  ParamVector out(spec);
  if (static_cast<int>(layers.size()) != spec.layer_count()) {
    throw std::invalid_argument("flatten: wrong layer count");
  }
  for (int l = 0; l < spec.layer_count(); ++l) {
    if (layers[l].first.rows() != spec.fan_out(l) || layers[l].first.cols() != spec.fan_in(l) ||
        layers[l].second.size() != spec.fan_out(l)) {
      throw std::invalid_argument("flatten: layer " + std::to_string(l) + " has wrong shape");
    }
    out.weight(l) = layers[l].first;
    out.bias(l) = layers[l].second;
  }
  return out;
}

namespace {

// Orthogonal matrix via QR of a Gaussian draw, with the usual sign fix so the
// distribution is uniform over the orthogonal group.
Eigen::MatrixXd orthogonal(int rows, int cols, Rng& rng) {
  const int n = std::max(rows, cols);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q.topLeftCorner(rows, cols);
}

void check_finite(const Eigen::MatrixXd& m, int layer, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite value in ") + where + " at layer " +
                           std::to_string(layer),
                       layer);
  }
}

}  // namespace

ParamVector init_mlp_params(const MlpSpec& spec, Rng& rng, double final_gain) {
  spec.validate();
  ParamVector p(spec);
  const int last = spec.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    if (l == last && spec.zero_final_layer) break;  // already zero
    const double gain = (l == last) ? final_gain : std::sqrt(2.0);
    p.weight(l) = gain * orthogonal(spec.fan_out(l), spec.fan_in(l), rng);
    // biases stay zero
  }
  return p;
}

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const ParamVector& params,
                            const Eigen::VectorXd& input) {
  if (input.size() != spec.input_dim) {
    throw std::invalid_argument("mlp_forward: input has " + std::to_string(input.size()) +
                                " entries, expected " + std::to_string(spec.input_dim));
  }
  return mlp_forward_batch(spec, params, input);
}

Eigen::MatrixXd mlp_forward_batch(const MlpSpec& spec, const ParamVector& params,
                                  const Eigen::MatrixXd& inputs, MlpForwardCache* cache) {
  if (inputs.rows() != spec.input_dim) {
    throw std::invalid_argument("mlp_forward_batch: inputs have " +
                                std::to_string(inputs.rows()) + " rows, expected " +
                                std::to_string(spec.input_dim));
  }
  if (params.spec() != spec) {
    throw std::invalid_argument("mlp_forward_batch: params built for a different spec");
  }
  const int last = spec.layer_count() - 1;
  if (cache) {
    cache->inputs = inputs;
    cache->hidden.assign(spec.hidden_dims.size(), {});
  }
  Eigen::MatrixXd h = inputs;
  for (int l = 0; l < last; ++l) {
    Eigen::MatrixXd z = (params.weight(l) * h).colwise() + params.bias(l);
    h = z.array().tanh();
    check_finite(h, l, "forward");
    if (cache) cache->hidden[l] = h;
  }
  Eigen::MatrixXd out = (params.weight(last) * h).colwise() + params.bias(last);
  check_finite(out, last, "forward");
  if (cache) cache->outputs = out;
  return out;
}

Eigen::VectorXd mlp_backward_batch(const MlpSpec& spec, const ParamVector& params,
                                   const MlpForwardCache& cache,
                                   const Eigen::MatrixXd& dl_doutputs) {
  const int last = spec.layer_count() - 1;
  ParamVector grad(spec);
  Eigen::MatrixXd delta = dl_doutputs;  // dLoss/d(pre-activation of current layer)
  for (int l = last; l >= 0; --l) {
    check_finite(delta, l, "backward");
    const Eigen::MatrixXd& below = (l == 0) ? cache.inputs : cache.hidden[l - 1];
    grad.weight(l) = delta * below.transpose();
    grad.bias(l) = delta.rowwise().sum();
    if (l > 0) {
      // through the tanh of the layer below
      Eigen::MatrixXd dh = params.weight(l).transpose() * delta;
      delta = dh.array() * (1.0 - cache.hidden[l - 1].array().square());
    }
  }
  return grad.values();
}

}  // namespace jointsampler::nn
