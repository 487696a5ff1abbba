#include "jointsampler/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "jointsampler/env/game.hpp"
#include "jointsampler/errors.hpp"

namespace jointsampler::harness {

std::string to_string(Algo algo) { return algo == Algo::kMappo ? "mappo" : "ippo"; }

Algo algo_from_string(const std::string& name) {
  if (name == "mappo") return Algo::kMappo;
  if (name == "ippo") return Algo::kIppo;
  throw std::invalid_argument("unknown algo: " + name);
}

void ExperimentConfig::validate() const {
  env::make_game(game);  // throws on unknown id
  ppo.validate();
  behavior.validate();
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (n_eval_episodes < 1) throw std::invalid_argument("n_eval_episodes must be >= 1");
  if (behavior.batch_size > ppo.batch_size || ppo.batch_size % behavior.batch_size != 0) {
    throw std::invalid_argument(
        "behavior batch size must divide the target batch size (m <= n, n mod m = 0)");
  }
  if (fixed_policy) {
    if (checkpoints.empty()) throw std::invalid_argument("fixed-policy runs need checkpoints");
    int64_t prev = 0;
    for (int64_t c : checkpoints) {
      if (c <= prev || c > steps) {
        throw std::invalid_argument("checkpoints must be increasing and within the step budget");
      }
      prev = c;
    }
  }
}

ExperimentConfig default_config(const std::string& game_id) {
  ExperimentConfig cfg;
  cfg.game = game_id;
  const auto g = env::make_game(game_id);
  const bool matrix = g->state_count() == 1;
  const bool three_by_three = matrix && g->joint_actions().size() == 9;

  if (matrix) {
    cfg.ppo.batch_size = three_by_three ? 45 : 20;
    cfg.ppo.lr = 0.1;
    cfg.behavior.lr = three_by_three ? 0.3 : 0.03;
    cfg.behavior.batch_size = 1;
    cfg.behavior.n_epoch = 16;
    cfg.steps = 20000;
    cfg.eval_every_batches = three_by_three ? 5 : 10;
  } else if (game_id == "gridworld") {
    cfg.ppo.batch_size = 256;
    cfg.ppo.lr = 0.01;
    cfg.behavior.lr = 0.3;
    cfg.behavior.batch_size = 1;
    cfg.behavior.n_epoch = 2;
    cfg.steps = 50000;
    cfg.eval_every_batches = 2;
  } else if (game_id == "boulderpush") {
    cfg.ppo.batch_size = 4096;
    cfg.ppo.lr = 0.003;
    cfg.behavior.lr = 0.03;
    cfg.behavior.batch_size = 64;
    cfg.behavior.n_epoch = 4;
    cfg.steps = 100000;
    cfg.eval_every_batches = 1;
  } else if (game_id == "lbf") {
    cfg.ppo.batch_size = 2048;
    cfg.ppo.lr = 0.01;
    cfg.behavior.lr = 0.03;
    cfg.behavior.batch_size = 64;
    cfg.behavior.n_epoch = 4;
    cfg.steps = 100000;
    cfg.eval_every_batches = 1;
  }
  return cfg;
}

namespace {

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

int64_t parse_int(const std::string& s) {
  size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("bad bool: " + s);
}

std::string fmt_checkpoints(const std::vector<int64_t>& cs) {
  std::string out;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(cs[i]);
  }
  return out;
}

std::vector<int64_t> parse_checkpoints(const std::string& s) {
  std::vector<int64_t> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(item));
  return out;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"game", [](const ExperimentConfig& c) { return c.game; },
       [](ExperimentConfig& c, const std::string& v) { c.game = v; }},
      {"algo", [](const ExperimentConfig& c) { return to_string(c.algo); },
       [](ExperimentConfig& c, const std::string& v) { c.algo = algo_from_string(v); }},
      {"sampler", [](const ExperimentConfig& c) { return policy::to_string(c.sampler); },
       [](ExperimentConfig& c, const std::string& v) {
         c.sampler = policy::sampler_mode_from_string(v);
       }},
      {"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
       [](ExperimentConfig& c, const std::string& v) {
         c.seed = static_cast<uint64_t>(parse_int(v));
       }},
      {"steps", [](const ExperimentConfig& c) { return std::to_string(c.steps); },
       [](ExperimentConfig& c, const std::string& v) { c.steps = parse_int(v); }},
      {"eval_every_batches",
       [](const ExperimentConfig& c) { return std::to_string(c.eval_every_batches); },
       [](ExperimentConfig& c, const std::string& v) { c.eval_every_batches = parse_int(v); }},
      {"metric_every_batches",
       [](const ExperimentConfig& c) { return std::to_string(c.metric_every_batches); },
       [](ExperimentConfig& c, const std::string& v) { c.metric_every_batches = parse_int(v); }},
      {"n_eval_episodes",
       [](const ExperimentConfig& c) { return std::to_string(c.n_eval_episodes); },
       [](ExperimentConfig& c, const std::string& v) {
         c.n_eval_episodes = static_cast<int>(parse_int(v));
       }},
      {"shadow_metrics",
       [](const ExperimentConfig& c) { return c.shadow_metrics ? std::string("true") : "false"; },
       [](ExperimentConfig& c, const std::string& v) { c.shadow_metrics = parse_bool(v); }},
      {"fixed_policy",
       [](const ExperimentConfig& c) { return c.fixed_policy ? std::string("true") : "false"; },
       [](ExperimentConfig& c, const std::string& v) { c.fixed_policy = parse_bool(v); }},
      {"checkpoints", [](const ExperimentConfig& c) { return fmt_checkpoints(c.checkpoints); },
       [](ExperimentConfig& c, const std::string& v) { c.checkpoints = parse_checkpoints(v); }},
      {"target_batch", [](const ExperimentConfig& c) { return std::to_string(c.ppo.batch_size); },
       [](ExperimentConfig& c, const std::string& v) {
         c.ppo.batch_size = static_cast<int>(parse_int(v));
       }},
      {"lr", [](const ExperimentConfig& c) { return fmt_double(c.ppo.lr); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.lr = parse_double(v); }},
      {"n_epochs", [](const ExperimentConfig& c) { return std::to_string(c.ppo.n_epochs); },
       [](ExperimentConfig& c, const std::string& v) {
         c.ppo.n_epochs = static_cast<int>(parse_int(v));
       }},
      {"n_minibatches",
       [](const ExperimentConfig& c) { return std::to_string(c.ppo.n_minibatches); },
       [](ExperimentConfig& c, const std::string& v) {
         c.ppo.n_minibatches = static_cast<int>(parse_int(v));
       }},
      {"gamma", [](const ExperimentConfig& c) { return fmt_double(c.ppo.gamma); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.gamma = parse_double(v); }},
      {"gae_lambda", [](const ExperimentConfig& c) { return fmt_double(c.ppo.gae_lambda); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.gae_lambda = parse_double(v); }},
      {"clip", [](const ExperimentConfig& c) { return fmt_double(c.ppo.clip); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.clip = parse_double(v); }},
      {"entropy_coef", [](const ExperimentConfig& c) { return fmt_double(c.ppo.entropy_coef); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.entropy_coef = parse_double(v); }},
      {"vf_coef", [](const ExperimentConfig& c) { return fmt_double(c.ppo.vf_coef); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.vf_coef = parse_double(v); }},
      {"max_grad_norm", [](const ExperimentConfig& c) { return fmt_double(c.ppo.max_grad_norm); },
       [](ExperimentConfig& c, const std::string& v) { c.ppo.max_grad_norm = parse_double(v); }},
      {"advantage_normalization",
       [](const ExperimentConfig& c) {
         return c.ppo.advantage_normalization ? std::string("true") : "false";
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.ppo.advantage_normalization = parse_bool(v);
       }},
      {"behavior_lr", [](const ExperimentConfig& c) { return fmt_double(c.behavior.lr); },
       [](ExperimentConfig& c, const std::string& v) { c.behavior.lr = parse_double(v); }},
      {"behavior_clip", [](const ExperimentConfig& c) { return fmt_double(c.behavior.clip_eps); },
       [](ExperimentConfig& c, const std::string& v) { c.behavior.clip_eps = parse_double(v); }},
      {"behavior_kl", [](const ExperimentConfig& c) { return fmt_double(c.behavior.target_kl); },
       [](ExperimentConfig& c, const std::string& v) { c.behavior.target_kl = parse_double(v); }},
      {"behavior_epochs",
       [](const ExperimentConfig& c) { return std::to_string(c.behavior.n_epoch); },
       [](ExperimentConfig& c, const std::string& v) {
         c.behavior.n_epoch = static_cast<int>(parse_int(v));
       }},
      {"behavior_minibatches",
       [](const ExperimentConfig& c) { return std::to_string(c.behavior.n_minibatch); },
       [](ExperimentConfig& c, const std::string& v) {
         c.behavior.n_minibatch = static_cast<int>(parse_int(v));
       }},
      {"behavior_batch",
       [](const ExperimentConfig& c) { return std::to_string(c.behavior.batch_size); },
       [](ExperimentConfig& c, const std::string& v) {
         c.behavior.batch_size = static_cast<int>(parse_int(v));
       }},
  };
  return kFields;
}

const Field& find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

bool is_config_key(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return true;
  }
  return false;
}

std::string get_config_value(const ExperimentConfig& cfg, const std::string& key) {
  return find_field(key).get(cfg);
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  find_field(key).set(cfg, value);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, const std::string& text,
                       const std::string& filename) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError(filename, line_no, "expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!is_config_key(key)) {
      throw ParseError(filename, line_no, "unknown config key: " + key);
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ParseError(filename, line_no, "duplicate config key: " + key);
    }
    seen.push_back(key);
    try {
      set_config_value(cfg, key, value);
    } catch (const std::exception& e) {
      throw ParseError(filename, line_no, e.what());
    }
  }
}

}  // namespace jointsampler::harness
