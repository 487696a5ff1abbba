#include <doctest.h>

#include <cmath>

#include "jointsampler/errors.hpp"
#include "jointsampler/nn/adam.hpp"
#include "jointsampler/nn/distributions.hpp"
#include "jointsampler/nn/loss.hpp"
#include "jointsampler/nn/mlp.hpp"
#include "test_support.hpp"

using namespace jointsampler;

namespace {

// Loss fixtures for the grad contract.
class ConstantLoss : public nn::ScalarLoss {
 public:
  explicit ConstantLoss(int n) : n_(n) {}
  int param_size() const override { return n_; }
  double value(const Eigen::VectorXd&) const override { return 3.5; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const override {
    return Eigen::VectorXd::Zero(p.size());
  }

 private:
  int n_;
};

class HalfSquaredNormLoss : public nn::ScalarLoss {
 public:
  explicit HalfSquaredNormLoss(int n) : n_(n) {}
  int param_size() const override { return n_; }
  double value(const Eigen::VectorXd& p) const override { return 0.5 * p.squaredNorm(); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const override { return p; }

 private:
  int n_;
};

}  // namespace

TEST_CASE("mlp spec and params") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {5, 4};
  spec.output_dim = 2;
  CHECK(spec.param_count() == (3 * 5 + 5) + (5 * 4 + 4) + (4 * 2 + 2));

  nn::MlpSpec bad = spec;
  bad.output_dim = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("flatten/unflatten round-trips exactly") {
  nn::MlpSpec spec;
  spec.input_dim = 4;
  spec.hidden_dims = {7};
  spec.output_dim = 3;
  nn::Rng rng(11);
  const nn::ParamVector p = nn::init_mlp_params(spec, rng, 0.5);
  const auto layers = p.unflatten();
  const nn::ParamVector q = nn::ParamVector::flatten(spec, layers);
  CHECK(p.values() == q.values());
}

TEST_CASE("zero final layer forces zero outputs") {
  nn::MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {8, 8};
  spec.output_dim = 4;
  spec.zero_final_layer = true;
  nn::Rng rng(3);
  const nn::ParamVector p = nn::init_mlp_params(spec, rng);
  const Eigen::VectorXd out = nn::mlp_forward(spec, p, Eigen::Vector2d(0.3, -1.2));
  CHECK(out.isZero(0.0));
}

TEST_CASE("single linear layer with identity weights is the identity") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {};
  spec.output_dim = 3;
  nn::ParamVector p(spec);
  p.weight(0) = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::Vector3d x(0.5, -2.0, 7.25);
  CHECK(nn::mlp_forward(spec, p, x) == x);
}

TEST_CASE("forward pass matches a scalar loop oracle") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {6, 5};
  spec.output_dim = 2;
  nn::Rng rng(42);
  const nn::ParamVector p = nn::init_mlp_params(spec, rng, 1.0);
  Eigen::VectorXd x(3);
  x << 0.2, -0.7, 1.4;

  // independent re-computation: explicit loops, no Eigen products
  const auto layers = p.unflatten();
  std::vector<double> h(x.data(), x.data() + 3);
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& [w, b] = layers[l];
    std::vector<double> next(w.rows());
    for (int r = 0; r < w.rows(); ++r) {
      double acc = b[r];
      for (int c = 0; c < w.cols(); ++c) acc += w(r, c) * h[c];
      next[r] = l + 1 < layers.size() ? std::tanh(acc) : acc;
    }
    h = std::move(next);
  }

  const Eigen::VectorXd out = nn::mlp_forward(spec, p, x);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == doctest::Approx(h[0]).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(h[1]).epsilon(1e-12));
}

TEST_CASE("forward dimension mismatch throws") {
  nn::MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {4};
  spec.output_dim = 1;
  nn::Rng rng(1);
  const nn::ParamVector p = nn::init_mlp_params(spec, rng);
  CHECK_THROWS_AS(nn::mlp_forward(spec, p, Eigen::Vector3d(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("non-finite intermediates raise NumericError with the layer index") {
  nn::MlpSpec spec;
  spec.input_dim = 1;
  spec.hidden_dims = {2};
  spec.output_dim = 1;
  nn::ParamVector p(spec);
  p.weight(1)(0, 0) = std::numeric_limits<double>::infinity();
  try {
    nn::mlp_forward(spec, p, Eigen::VectorXd::Constant(1, 1.0));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.layer() == 1);
  }
}

TEST_CASE("grad contract: constant and quadratic losses") {
  const ConstantLoss c(5);
  CHECK(nn::grad(c, Eigen::VectorXd::Random(5)) == Eigen::VectorXd::Zero(5));

  const HalfSquaredNormLoss q(4);
  const Eigen::VectorXd p = Eigen::VectorXd::Random(4);
  CHECK(nn::grad(q, p) == p);
  CHECK(test::max_relative_error(nn::grad(q, p), test::finite_difference_gradient(q, p)) < 1e-4);
}

TEST_CASE("adam: zero gradient leaves params unchanged") {
  nn::MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {3};
  spec.output_dim = 1;
  nn::Rng rng(5);
  const nn::ParamVector p = nn::init_mlp_params(spec, rng);
  nn::AdamState st = nn::AdamState::for_size(p.size());
  const auto [p2, st2] = nn::adam_step(p, st, Eigen::VectorXd::Zero(p.size()), 0.01);
  CHECK(p2.values() == p.values());
  CHECK(st2.step_count == 1);
}

TEST_CASE("adam: lr = 0 leaves params unchanged but moves moments") {
  Eigen::VectorXd params = Eigen::VectorXd::Constant(3, 1.0);
  nn::AdamState st = nn::AdamState::for_size(3);
  Eigen::VectorXd g(3);
  g << 1.0, -2.0, 0.5;
  nn::adam_step_inplace(params, st, g, 0.0);
  CHECK(params == Eigen::VectorXd::Constant(3, 1.0));
  CHECK(st.first_moment.norm() > 0.0);
  CHECK(st.second_moment.norm() > 0.0);
}

TEST_CASE("adam single step matches the closed form") {
  // After one step with fresh moments, the update is lr * g / (|g| + eps)
  // per coordinate.
  Eigen::VectorXd params(3);
  params << 1.0, -0.5, 2.0;
  const Eigen::VectorXd before = params;
  Eigen::VectorXd g(3);
  g << 0.3, -4.0, 1e-7;
  nn::AdamState st = nn::AdamState::for_size(3);
  const double lr = 0.05;
  nn::adam_step_inplace(params, st, g, lr);
  for (int i = 0; i < 3; ++i) {
    const double expected = before[i] - lr * g[i] / (std::abs(g[i]) + st.epsilon);
    CHECK(params[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(st.step_count == 1);
}

TEST_CASE("adam is bit-reproducible") {
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  Eigen::VectorXd b = a;
  nn::AdamState sa = nn::AdamState::for_size(6);
  nn::AdamState sb = nn::AdamState::for_size(6);
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(6, 0.2, -0.4);
  for (int k = 0; k < 10; ++k) {
    nn::adam_step_inplace(a, sa, g, 0.01);
    nn::adam_step_inplace(b, sb, g, 0.01);
  }
  CHECK(a == b);
}

TEST_CASE("adam rejects NaN gradients") {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(2);
  nn::AdamState st = nn::AdamState::for_size(2);
  Eigen::VectorXd g(2);
  g << 1.0, std::nan("");
  CHECK_THROWS_AS(nn::adam_step_inplace(params, st, g, 0.1), NumericError);
}

TEST_CASE("softmax basics") {
  CHECK(nn::softmax(Eigen::VectorXd::Zero(4)) == Eigen::VectorXd::Constant(4, 0.25));

  Eigen::VectorXd logits(3);
  logits << 0.3, -2.0, 5.0;
  const Eigen::VectorXd p1 = nn::softmax(logits);
  const Eigen::VectorXd p2 = nn::softmax((logits.array() + 123.0).matrix());
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(p1.sum() - 1.0) < 1e-9);
  CHECK(p1.minCoeff() > 0.0);

  Eigen::VectorXd two(2);
  two << 1.0, 2.0;
  const Eigen::VectorXd p = nn::softmax(two);
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  CHECK(p[0] == doctest::Approx(e1 / (e1 + e2)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(e2 / (e1 + e2)).epsilon(1e-12));

  // huge logits stay finite
  Eigen::VectorXd big(2);
  big << 1e4, -1e4;
  CHECK(nn::softmax(big).allFinite());
}

TEST_CASE("log_softmax agrees with softmax") {
  Eigen::VectorXd logits(5);
  logits << 0.1, -3.0, 2.2, 0.0, 1.1;
  const Eigen::VectorXd ls = nn::log_softmax(logits);
  const Eigen::VectorXd p = nn::softmax(logits);
  for (int i = 0; i < 5; ++i) CHECK(ls[i] == doctest::Approx(std::log(p[i])).epsilon(1e-12));
}

TEST_CASE("categorical_sample: degenerate, frequencies, determinism") {
  nn::Rng rng(9);
  Eigen::VectorXd sure(3);
  sure << 1.0, 0.0, 0.0;
  for (int i = 0; i < 50; ++i) CHECK(nn::categorical_sample(sure, rng) == 0);

  Eigen::VectorXd uniform2 = Eigen::VectorXd::Constant(2, 0.5);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (nn::categorical_sample(uniform2, rng) == 0) ++zeros;
  }
  const double freq = static_cast<double>(zeros) / n;
  CHECK(freq > 0.49);
  CHECK(freq < 0.51);

  nn::Rng a(77), b(77);
  Eigen::VectorXd probs(4);
  probs << 0.1, 0.2, 0.3, 0.4;
  for (int i = 0; i < 100; ++i) CHECK(nn::categorical_sample(probs, a) == nn::categorical_sample(probs, b));
}

TEST_CASE("rng streams are independent of derivation order") {
  nn::Rng a = nn::Rng::derive(123, 4);
  nn::Rng b = nn::Rng::derive(123, 4);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  nn::Rng c = nn::Rng::derive(123, 5);
  CHECK(nn::Rng::derive(123, 4).next_u64() != c.next_u64());
}

TEST_CASE("clip_grad_norm caps the norm") {
  Eigen::VectorXd g = Eigen::VectorXd::Constant(16, 1.0);
  nn::clip_grad_norm(g, 0.5);
  CHECK(g.norm() <= 0.5 + 1e-9);
  Eigen::VectorXd small = Eigen::VectorXd::Constant(4, 0.01);
  const Eigen::VectorXd saved = small;
  nn::clip_grad_norm(small, 0.5);
  CHECK(small == saved);
}
