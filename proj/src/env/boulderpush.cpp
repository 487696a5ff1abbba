#include "jointsampler/env/game.hpp"

namespace jointsampler::env {

namespace {

// 5x4 grid. A width-2 boulder sits on row `b`, columns 1-2, and must be pushed
// upward to the top row. The push cells are the two cells directly below the
// boulder; the boulder advances one row when both push cells are occupied and
// both agents move up, and the pushing agents advance with it. A lone push
// attempt costs both agents -0.02 and moves nothing. Reaching the top row pays
// +0.1 to both and ends the episode. 4 move actions; off-grid moves and moves
// into the boulder are no-ops; agents may share a cell.
class BoulderPush : public Game {
 public:
  static constexpr int kRows = 5;
  static constexpr int kCols = 4;
  static constexpr int kCells = kRows * kCols;
  static constexpr int kBoulderRows = 4;  // boulder row in 0..3; 0 is the goal
  static constexpr int kBoulderColLeft = 1;

  BoulderPush() : Game("boulderpush", {4, 4}) {}

  int horizon() const override { return 20; }

  StateId initial_state() const override {
    // agents at the bottom corners, boulder one row above the bottom
    return encode(cell(kRows - 1, 0), cell(kRows - 1, kCols - 1), 3);
  }

  int state_count() const override { return kCells * kCells * kBoulderRows; }
  int observation_dim(int) const override { return 5; }

  Eigen::VectorXd observation(StateId state, int agent) const override {
    check_state(state);
    auto [p0, p1, b] = decode(state);
    const int own = agent == 0 ? p0 : p1;
    const int other = agent == 0 ? p1 : p0;
    Eigen::VectorXd obs(5);
    obs << row(own) / double(kRows - 1), col(own) / double(kCols - 1),
        row(other) / double(kRows - 1), col(other) / double(kCols - 1),
        b / double(kBoulderRows - 1);
    return obs;
  }

  bool cooperative() const override { return true; }

  std::vector<Successor> transitions(StateId state, const std::vector<int>& actions) const override {
    check_state(state);
    check_actions(actions);
    auto [p0, p1, b] = decode(state);
    const int push_left = cell(b + 1, kBoulderColLeft);
    const int push_right = cell(b + 1, kBoulderColLeft + 1);

    const bool attempt0 = (p0 == push_left || p0 == push_right) && actions[0] == 0;
    const bool attempt1 = (p1 == push_left || p1 == push_right) && actions[1] == 0;
    const bool covered = (p0 == push_left && p1 == push_right) || (p0 == push_right && p1 == push_left);

    StepOutcome out;
    double r = 0.0;
    if (covered && attempt0 && attempt1) {
      const int nb = b - 1;
      const int n0 = cell(row(p0) - 1, col(p0));
      const int n1 = cell(row(p1) - 1, col(p1));
      out.next_state = encode(n0, n1, nb);
      if (nb == 0) {
        r = 0.1;
        out.terminal = true;
        out.success = true;
      }
    } else {
      if (attempt0 != attempt1) r = -0.02;
      const int n0 = move(p0, actions[0], b);
      const int n1 = move(p1, actions[1], b);
      out.next_state = encode(n0, n1, b);
    }
    out.rewards = Eigen::Vector2d(r, r);
    return {{out, 1.0}};
  }

 private:
  static int cell(int r, int c) { return r * kCols + c; }
  static int row(int p) { return p / kCols; }
  static int col(int p) { return p % kCols; }

  static StateId encode(int p0, int p1, int b) { return (p0 * kCells + p1) * kBoulderRows + b; }
  static std::tuple<int, int, int> decode(StateId s) {
    const int b = s % kBoulderRows;
    s /= kBoulderRows;
    return {s / kCells, s % kCells, b};
  }

  static bool is_boulder(int r, int c, int b) {
    return r == b && (c == kBoulderColLeft || c == kBoulderColLeft + 1);
  }

  static int move(int pos, int action, int b) {
    int r = row(pos), c = col(pos);
    switch (action) {
      case 0: r -= 1; break;
      case 1: r += 1; break;
      case 2: c -= 1; break;
      case 3: c += 1; break;
    }
    if (r < 0 || r >= kRows || c < 0 || c >= kCols) return pos;
    if (is_boulder(r, c, b)) return pos;
    return cell(r, c);
  }
};

}  // namespace

std::unique_ptr<Game> make_boulderpush() { return std::make_unique<BoulderPush>(); }

}  // namespace jointsampler::env
