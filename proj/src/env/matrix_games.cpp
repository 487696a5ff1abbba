#include <map>
#include <stdexcept>
#include <utility>

#include "jointsampler/env/game.hpp"

namespace jointsampler::env {

namespace {

// One-step simultaneous game on a single dummy state. Payoff matrices are
// indexed (agent 1 action, agent 2 action). Episodes end by horizon (H = 1),
// not by a terminal event.
class MatrixGame : public Game {
 public:
  MatrixGame(std::string id, Eigen::MatrixXd r1, Eigen::MatrixXd r2)
      : Game(std::move(id), {static_cast<int>(r1.rows()), static_cast<int>(r1.cols())}),
        r1_(std::move(r1)),
        r2_(std::move(r2)) {
    const double best = (r1_ + r2_).maxCoeff();
    for (int a = 0; a < r1_.rows(); ++a) {
      for (int b = 0; b < r1_.cols(); ++b) {
        if (r1_(a, b) + r2_(a, b) == best) optimal_.emplace_back(a, b);
      }
    }
  }

  int horizon() const override { return 1; }
  StateId initial_state() const override { return 0; }
  int state_count() const override { return 1; }
  int observation_dim(int) const override { return 1; }
  Eigen::VectorXd observation(StateId state, int) const override {
    check_state(state);
    return Eigen::VectorXd::Constant(1, 1.0);
  }
  bool cooperative() const override { return r1_ == r2_; }

  const std::vector<std::pair<int, int>>& optimal_joint_actions() const { return optimal_; }

  std::vector<Successor> transitions(StateId state, const std::vector<int>& actions) const override {
    check_state(state);
    check_actions(actions);
    StepOutcome out;
    out.next_state = 0;
    out.rewards = Eigen::Vector2d(r1_(actions[0], actions[1]), r2_(actions[0], actions[1]));
    out.terminal = false;
    out.success = false;
    for (const auto& [a, b] : optimal_) {
      if (actions[0] == a && actions[1] == b) out.success = true;
    }
    return {{out, 1.0}};
  }

 private:
  Eigen::MatrixXd r1_, r2_;
  std::vector<std::pair<int, int>> optimal_;
};

Eigen::MatrixXd mat2(double aa, double ab, double ba, double bb) {
  Eigen::MatrixXd m(2, 2);
  m << aa, ab, ba, bb;
  return m;
}

struct Payoffs {
  Eigen::MatrixXd r1, r2;
};

// The 21 structurally distinct 2x2 no-conflict games, with the optimal outcome
// raised to (4,5) in games 7-12 and (5,5) in games 19-21 so that the expected
// gradient at uniform policies points toward (A,A).
Payoffs two_by_two(int game) {
  switch (game) {
    case 1:  return {mat2(4, 3, 2, 1), mat2(4, 3, 2, 1)};
    case 2:  return {mat2(4, 3, 2, 2), mat2(4, 3, 1, 1)};
    case 3:  return {mat2(4, 3, 2, 1), mat2(4, 2, 3, 1)};
    case 4:  return {mat2(4, 3, 3, 1), mat2(4, 2, 2, 1)};
    case 5:  return {mat2(4, 3, 2, 1), mat2(4, 1, 1, 3)};
    case 6:  return {mat2(4, 3, 2, 1), mat2(4, 3, 1, 2)};
    case 7:  return {mat2(4, 3, 1, 1), mat2(5, 2, 1, 1)};
    case 8:  return {mat2(4, 3, 1, 2), mat2(5, 2, 1, 3)};
    case 9:  return {mat2(4, 3, 2, 1), mat2(5, 2, 3, 1)};
    case 10: return {mat2(4, 3, 1, 2), mat2(5, 1, 1, 2)};
    case 11: return {mat2(4, 3, 1, 2), mat2(5, 1, 1, 3)};
    case 12: return {mat2(4, 3, 2, 2), mat2(5, 1, 3, 1)};
    case 13: return {mat2(4, 2, 3, 1), mat2(4, 3, 1, 3)};
    case 14: return {mat2(4, 2, 3, 2), mat2(4, 3, 1, 2)};
    case 15: return {mat2(4, 2, 3, 1), mat2(4, 2, 1, 3)};
    case 16: return {mat2(4, 2, 3, 1), mat2(4, 2, 2, 3)};
    case 17: return {mat2(4, 3, 2, 1), mat2(4, 1, 2, 3)};
    case 18: return {mat2(4, 2, 1, 3), mat2(4, 1, 2, 3)};
    case 19: return {mat2(5, 1, 3, 2), mat2(5, 3, 1, 2)};
    case 20: return {mat2(5, 1, 3, 2), mat2(5, 2, 1, 2)};
    case 21: return {mat2(5, 1, 2, 3), mat2(5, 2, 1, 3)};
    default:
      throw std::invalid_argument("unknown 2x2 game index");
  }
}

Eigen::MatrixXd climbing_payoff() {
  Eigen::MatrixXd m(3, 3);
  m << 11, -3, 0,
       -3,  7, 0,
        0,  3, 2;
  return m;
}

Eigen::MatrixXd penalty_payoff() {
  // k = 7
  Eigen::MatrixXd m(3, 3);
  m << -7, 0, 10,
        0, 2,  0,
       10, 0, -7;
  return m;
}

}  // namespace

std::unique_ptr<Game> make_matrix_game(const std::string& id) {
  if (id == "intro") {
    return std::make_unique<MatrixGame>(id, mat2(12, 0, 6, 2), mat2(12, 6, 0, 2));
  }
  if (id == "climbing") {
    return std::make_unique<MatrixGame>(id, climbing_payoff(), climbing_payoff());
  }
  if (id == "penalty") {
    return std::make_unique<MatrixGame>(id, penalty_payoff(), penalty_payoff());
  }
  if (id.size() >= 2 && id[0] == 'g') {
    int n = 0;
    try {
      size_t pos = 0;
      n = std::stoi(id.substr(1), &pos);
      if (pos != id.size() - 1) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n >= 1 && n <= 21) {
      Payoffs p = two_by_two(n);
      return std::make_unique<MatrixGame>(id, std::move(p.r1), std::move(p.r2));
    }
  }
  throw std::invalid_argument("unknown game id: " + id);
}

}  // namespace jointsampler::env
