#include "jointsampler/env/game.hpp"

namespace jointsampler::env {

namespace {

// 5x5 level-based foraging board with a single food item at the center. Both
// agents adjacent to the food and foraging simultaneously collect it (+0.5 to
// both, terminal); a lone adjacent forage attempt costs both -0.015. Action 4
// is forage, 0-3 are moves; the food cell blocks movement; agents may share a
// cell. Agents start at opposite corners.
class Lbf : public Game {
 public:
  static constexpr int kSide = 5;
  static constexpr int kCells = kSide * kSide;
  static constexpr int kFood = kCells / 2;  // center cell
  static constexpr int kForage = 4;

  Lbf() : Game("lbf", {5, 5}) {}

  int horizon() const override { return 20; }
  StateId initial_state() const override { return encode(0, kCells - 1); }
  int state_count() const override { return kCells * kCells; }
  int observation_dim(int) const override { return 4; }

  Eigen::VectorXd observation(StateId state, int agent) const override {
    check_state(state);
    auto [p0, p1] = decode(state);
    const int own = agent == 0 ? p0 : p1;
    const int other = agent == 0 ? p1 : p0;
    Eigen::VectorXd obs(4);
    const double d = kSide - 1;
    obs << row(own) / d, col(own) / d, row(other) / d, col(other) / d;
    return obs;
  }

  bool cooperative() const override { return true; }

  std::vector<Successor> transitions(StateId state, const std::vector<int>& actions) const override {
    check_state(state);
    check_actions(actions);
    auto [p0, p1] = decode(state);

    const bool forage0 = actions[0] == kForage && adjacent(p0);
    const bool forage1 = actions[1] == kForage && adjacent(p1);

    StepOutcome out;
    double r = 0.0;
    if (forage0 && forage1) {
      r = 0.5;
      out.terminal = true;
      out.success = true;
      out.next_state = encode(p0, p1);
    } else {
      if (forage0 != forage1) r = -0.015;
      const int n0 = actions[0] == kForage ? p0 : move(p0, actions[0]);
      const int n1 = actions[1] == kForage ? p1 : move(p1, actions[1]);
      out.next_state = encode(n0, n1);
    }
    out.rewards = Eigen::Vector2d(r, r);
    return {{out, 1.0}};
  }

 private:
  static int row(int p) { return p / kSide; }
  static int col(int p) { return p % kSide; }
  static StateId encode(int p0, int p1) { return p0 * kCells + p1; }
  static std::pair<int, int> decode(StateId s) { return {s / kCells, s % kCells}; }

  static bool adjacent(int p) {
    const int dr = row(p) - row(kFood), dc = col(p) - col(kFood);
    return std::abs(dr) + std::abs(dc) == 1;
  }

  static int move(int pos, int action) {
    int r = row(pos), c = col(pos);
    switch (action) {
      case 0: r -= 1; break;
      case 1: r += 1; break;
      case 2: c -= 1; break;
      case 3: c += 1; break;
    }
    if (r < 0 || r >= kSide || c < 0 || c >= kSide) return pos;
    const int target = r * kSide + c;
    if (target == kFood) return pos;
    return target;
  }
};

}  // namespace

std::unique_ptr<Game> make_lbf() { return std::make_unique<Lbf>(); }

}  // namespace jointsampler::env
