#include "jointsampler/env/game.hpp"

namespace jointsampler::env {

namespace {

// 3x3 grid, two agents. Both on the top-left cell -> +0.9 to both; exactly one
// on the top-left -> -0.1 to both; otherwise either agent on the bottom-right
// -> +0.1 to both. All reward events are terminal. 5 actions per agent
// (up/down/left/right/stay); off-grid moves are no-ops; agents may share a
// cell. Agents start at the top-right and bottom-left corners.
class GridWorld : public Game {
 public:
  static constexpr int kSide = 3;
  static constexpr int kCells = kSide * kSide;
  static constexpr int kTopLeft = 0;
  static constexpr int kBottomRight = kCells - 1;

  GridWorld() : Game("gridworld", {5, 5}) {}

  int horizon() const override { return 8; }
  StateId initial_state() const override {
    const int top_right = kSide - 1;
    const int bottom_left = (kSide - 1) * kSide;
    return encode(top_right, bottom_left);
  }
  int state_count() const override { return kCells * kCells; }
  int observation_dim(int) const override { return 4; }

  Eigen::VectorXd observation(StateId state, int agent) const override {
    check_state(state);
    auto [p0, p1] = decode(state);
    const int own = agent == 0 ? p0 : p1;
    const int other = agent == 0 ? p1 : p0;
    Eigen::VectorXd obs(4);
    const double d = kSide - 1;
    obs << (own / kSide) / d, (own % kSide) / d, (other / kSide) / d, (other % kSide) / d;
    return obs;
  }

  bool cooperative() const override { return true; }

  std::vector<Successor> transitions(StateId state, const std::vector<int>& actions) const override {
    check_state(state);
    check_actions(actions);
    auto [p0, p1] = decode(state);
    const int n0 = move(p0, actions[0]);
    const int n1 = move(p1, actions[1]);

    StepOutcome out;
    out.next_state = encode(n0, n1);
    const bool a0_tl = n0 == kTopLeft;
    const bool a1_tl = n1 == kTopLeft;
    double r = 0.0;
    bool terminal = false;
    bool success = false;
    if (a0_tl && a1_tl) {
      r = 0.9;
      terminal = true;
      success = true;
    } else if (a0_tl || a1_tl) {
      r = -0.1;
      terminal = true;
    } else if (n0 == kBottomRight || n1 == kBottomRight) {
      r = 0.1;
      terminal = true;
    }
    out.rewards = Eigen::Vector2d(r, r);
    out.terminal = terminal;
    out.success = success;
    return {{out, 1.0}};
  }

 private:
  static StateId encode(int p0, int p1) { return p0 * kCells + p1; }
  static std::pair<int, int> decode(StateId s) { return {s / kCells, s % kCells}; }

  static int move(int pos, int action) {
    int r = pos / kSide, c = pos % kSide;
    switch (action) {
      case 0: r -= 1; break;  // up
      case 1: r += 1; break;  // down
      case 2: c -= 1; break;  // left
      case 3: c += 1; break;  // right
      case 4: break;          // stay
    }
    if (r < 0 || r >= kSide || c < 0 || c >= kSide) return pos;
    return r * kSide + c;
  }
};

}  // namespace

std::unique_ptr<Game> make_gridworld() { return std::make_unique<GridWorld>(); }

}  // namespace jointsampler::env
