#ifndef JOINTSAMPLER_ENV_GAME_HPP_
#define JOINTSAMPLER_ENV_GAME_HPP_

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "jointsampler/nn/rng.hpp"

namespace jointsampler::env {

// Canonical integer state encoding. Games own the mapping to their internal
// structure; callers only ever see StateId plus observation vectors.
using StateId = int;

// Bijection between joint action indices and per-agent action tuples,
// row-major over agents in index order.
class JointActionSpace {
 public:
  explicit JointActionSpace(std::vector<int> counts);
  int size() const { return total_; }
  int num_agents() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& counts() const { return counts_; }
  int encode(const std::vector<int>& actions) const;
  std::vector<int> decode(int joint_index) const;

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int total_;
};

struct StepOutcome {
  StateId next_state = 0;
  Eigen::VectorXd rewards;
  bool terminal = false;  // terminal event; horizon truncation is tracked by Episode
  bool success = false;   // the task's optimal event happened on this step
};

struct Successor {
  StepOutcome outcome;
  double prob = 1.0;
};

// Finite-horizon stochastic game with a uniform stepping interface. Immutable
// after construction; stepping uses caller-supplied rng.
class Game {
 public:
  virtual ~Game() = default;

  const std::string& id() const { return id_; }
  int num_agents() const { return joint_actions_.num_agents(); }
  const std::vector<int>& action_counts() const { return joint_actions_.counts(); }
  const JointActionSpace& joint_actions() const { return joint_actions_; }

  virtual int horizon() const = 0;
  virtual StateId initial_state() const = 0;
  virtual int state_count() const = 0;
  virtual int observation_dim(int agent) const = 0;
  virtual Eigen::VectorXd observation(StateId state, int agent) const = 0;
  virtual bool cooperative() const = 0;

  // Full successor distribution for (state, joint action). Rows sum to 1.
  virtual std::vector<Successor> transitions(StateId state,
                                             const std::vector<int>& actions) const = 0;

  // Draws a successor. Deterministic games never touch the rng.
  StepOutcome step(StateId state, const std::vector<int>& actions, nn::Rng& rng) const;

  int joint_observation_dim() const;
  Eigen::VectorXd joint_observation(StateId state) const;

 protected:
  Game(std::string id, std::vector<int> action_counts)
      : id_(std::move(id)), joint_actions_(std::move(action_counts)) {}
  void check_actions(const std::vector<int>& actions) const;
  void check_state(StateId state) const;

 private:
  std::string id_;
  JointActionSpace joint_actions_;
};

// Tracks one episode: current state + timestep, applying the horizon.
class Episode {
 public:
  explicit Episode(const Game& game) : game_(&game) { reset(); }

  void reset() {
    state_ = game_->initial_state();
    t_ = 0;
  }

  StateId state() const { return state_; }
  int t() const { return t_; }
  const Game& game() const { return *game_; }

  struct Result {
    Eigen::VectorXd rewards;
    bool terminal = false;
    bool truncated = false;
    bool success = false;
    StateId next_state = 0;
  };

  // Steps; the caller resets when terminal || truncated.
  Result step(const std::vector<int>& actions, nn::Rng& rng);

 private:
  const Game* game_;
  StateId state_ = 0;
  int t_ = 0;
};

// Game identifiers accepted by make_game: g1..g21, intro, climbing, penalty,
// gridworld, boulderpush, lbf.
std::unique_ptr<Game> make_game(const std::string& id);
std::vector<std::string> game_ids();

std::unique_ptr<Game> make_matrix_game(const std::string& id);
std::unique_ptr<Game> make_gridworld();
std::unique_ptr<Game> make_boulderpush();
std::unique_ptr<Game> make_lbf();

}  // namespace jointsampler::env

#endif  // JOINTSAMPLER_ENV_GAME_HPP_
