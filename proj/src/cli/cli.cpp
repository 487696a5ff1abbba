#include "jointsampler/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "jointsampler/errors.hpp"
#include "jointsampler/harness/sweep.hpp"
#include "jointsampler/plot/svg.hpp"

namespace jointsampler::cli {

namespace fs = std::filesystem;
using harness::ExperimentConfig;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_root() {
  const char* env = std::getenv("JOINTSAMPLER_OUT_DIR");
  return env && *env ? env : "runs";
}

// Flags shared by the run-producing subcommands. Any config key is also
// accepted as `--key value` (dashes mapped to underscores).
struct CommonArgs {
  std::string game;
  std::string algo;
  std::string sampler;
  std::string config_file;
  std::string out;
  std::optional<int64_t> seed;
  std::optional<int64_t> steps;
  std::vector<std::string> extras;
};

void add_common_options(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--game", args->game, "game id (g1..g21, intro, climbing, penalty, gridworld, boulderpush, lbf)");
  cmd->add_option("--algo", args->algo, "target-policy algorithm: mappo or ippo");
  cmd->add_option("--sampler", args->sampler, "action sampler: on-policy, props, or ma-props");
  cmd->add_option("--seed", args->seed, "master seed");
  cmd->add_option("--steps", args->steps, "total environment steps");
  cmd->add_option("--config", args->config_file, "flat key=value config file");
  cmd->add_option("--out", args->out, "output directory (default: $JOINTSAMPLER_OUT_DIR)");
  cmd->allow_extras();
}

void apply_extras(ExperimentConfig& cfg, const std::vector<std::string>& extras) {
  size_t i = 0;
  while (i < extras.size()) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0) throw UsageError("unexpected argument: " + key);
    key = key.substr(2);
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    std::string value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
      ++i;
    } else {
      if (i + 1 >= extras.size()) throw UsageError("flag --" + key + " needs a value");
      value = extras[i + 1];
      i += 2;
    }
    if (!harness::is_config_key(key)) throw UsageError("unknown flag: --" + key);
    try {
      harness::set_config_value(cfg, key, value);
    } catch (const std::exception& e) {
      throw UsageError(std::string("bad value for --") + key + ": " + e.what());
    }
  }
}

// Precedence: per-game defaults < config file < named flags < --key overrides.
ExperimentConfig build_config(const CommonArgs& args) {
  std::string game = args.game;
  std::string file_text;
  if (!args.config_file.empty()) {
    file_text = read_file_or_throw(args.config_file);
    if (game.empty()) {
      ExperimentConfig scratch;
      harness::apply_config_text(scratch, file_text, args.config_file);
      game = scratch.game;
    }
  }
  if (game.empty()) game = "g1";

  ExperimentConfig cfg = harness::default_config(game);
  if (!file_text.empty()) harness::apply_config_text(cfg, file_text, args.config_file);
  cfg.game = game;
  if (!args.algo.empty()) cfg.algo = harness::algo_from_string(args.algo);
  if (!args.sampler.empty()) cfg.sampler = policy::sampler_mode_from_string(args.sampler);
  if (args.seed) cfg.seed = static_cast<uint64_t>(*args.seed);
  if (args.steps) cfg.steps = *args.steps;
  apply_extras(cfg, args.extras);
  return cfg;
}

std::string default_run_dir(const ExperimentConfig& cfg) {
  return (fs::path(output_root()) /
          (cfg.game + "_" + harness::to_string(cfg.algo) + "_" + policy::to_string(cfg.sampler) +
           "_seed" + std::to_string(cfg.seed)))
      .string();
}

std::vector<int64_t> parse_checkpoint_list(const std::string& text) {
  std::vector<int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stoll(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("bad checkpoint list entry: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty checkpoint list");
  return out;
}

std::vector<policy::SamplerMode> parse_sampler_list(const std::string& text) {
  std::vector<policy::SamplerMode> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(policy::sampler_mode_from_string(item));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("empty sampler list");
  return out;
}

// Fixed-policy sampling-error runs default to a lighter behavior-update
// schedule tuned for the fixed-target experiment.
void apply_sampling_error_defaults(ExperimentConfig& cfg) {
  cfg.fixed_policy = true;
  cfg.behavior.batch_size = 8;
  cfg.behavior.n_epoch = 1;
  cfg.behavior.lr = 0.3;
  cfg.behavior.clip_eps = 10.0;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

Csv read_csv(const std::string& path) {
  Csv csv;
  std::stringstream in(read_file_or_throw(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (first) {
      csv.header = fields;
      first = false;
    } else {
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

int cmd_train(const CommonArgs& common) {
  ExperimentConfig cfg;
  std::string out;
  try {
    cfg = build_config(common);
    cfg.validate();
    out = common.out.empty() ? default_run_dir(cfg) : common.out;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  harness::run_training(cfg, out);
  std::cout << "run written to " << out << "\n";
  return kOk;
}

int cmd_sample_error(const CommonArgs& common, int64_t budget, const std::string& checkpoints,
                     int n_seeds, int jobs) {
  harness::SweepSpec spec;
  try {
    ExperimentConfig cfg = build_config(common);
    apply_sampling_error_defaults(cfg);
    if (budget > 0) cfg.steps = budget;
    cfg.checkpoints = parse_checkpoint_list(checkpoints);
    // named/extra flags still win over the mode defaults
    apply_extras(cfg, common.extras);
    if (n_seeds < 1) throw UsageError("--seeds must be >= 1");
    cfg.validate();
    spec.base = cfg;
    spec.samplers = {cfg.sampler};
    for (int s = 0; s < n_seeds; ++s) spec.seeds.push_back(cfg.seed + s);
    spec.sampling_error_mode = true;
    spec.jobs = jobs;
    spec.out_root = common.out.empty()
                        ? (fs::path(output_root()) / ("se_" + cfg.game)).string()
                        : common.out;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  const auto runs = harness::run_sweep(spec);
  std::ofstream summary(fs::path(spec.out_root) / "summary.csv");
  summary << harness::summarize_runs(runs, spec.base.seed);
  std::cout << "sampling-error sweep written to " << spec.out_root << "\n";
  return kOk;
}

int cmd_sweep(const CommonArgs& common, const std::string& samplers, int n_seeds, int jobs,
              const std::string& mode, int64_t budget, const std::string& checkpoints) {
  harness::SweepSpec spec;
  try {
    ExperimentConfig cfg = build_config(common);
    spec.sampling_error_mode = mode == "sample-error";
    if (!spec.sampling_error_mode && mode != "train") {
      throw UsageError("--mode must be train or sample-error");
    }
    if (spec.sampling_error_mode) {
      apply_sampling_error_defaults(cfg);
      if (budget > 0) cfg.steps = budget;
      cfg.checkpoints = parse_checkpoint_list(checkpoints);
      apply_extras(cfg, common.extras);
    }
    if (n_seeds < 1) throw UsageError("--seeds must be >= 1");
    cfg.validate();
    spec.base = cfg;
    spec.samplers = parse_sampler_list(samplers);
    for (int s = 0; s < n_seeds; ++s) spec.seeds.push_back(cfg.seed + s);
    spec.jobs = jobs;
    spec.out_root = common.out.empty()
                        ? (fs::path(output_root()) / ("sweep_" + cfg.game)).string()
                        : common.out;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  const auto runs = harness::run_sweep(spec);
  std::ofstream summary(fs::path(spec.out_root) / "summary.csv");
  summary << harness::summarize_runs(runs, spec.base.seed);
  std::cout << "sweep written to " << spec.out_root << "\n";
  return kOk;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& metric,
             const std::string& out, const std::string& title, bool log_x, bool log_y) {
  std::vector<plot::Series> series;
  try {
    for (const std::string& input : inputs) {
      const Csv csv = read_csv(input);
      const int step_col = csv.column("step");
      if (step_col < 0) throw UsageError(input + ": no 'step' column");
      const int sampler_col = csv.column("sampler");
      if (sampler_col >= 0) {
        // summary file: one banded series per sampler
        const int mean_col = csv.column(metric + "_mean");
        const int lo_col = csv.column(metric + "_lo");
        const int hi_col = csv.column(metric + "_hi");
        if (mean_col < 0) throw UsageError(input + ": no column '" + metric + "_mean'");
        std::vector<std::string> order;
        for (const auto& row : csv.rows) {
          if (std::find(order.begin(), order.end(), row[sampler_col]) == order.end()) {
            order.push_back(row[sampler_col]);
          }
        }
        for (const std::string& sampler : order) {
          plot::Series s;
          s.label = sampler;
          for (const auto& row : csv.rows) {
            if (row[sampler_col] != sampler || row[mean_col].empty()) continue;
            s.x.push_back(std::stod(row[step_col]));
            s.y.push_back(std::stod(row[mean_col]));
            if (lo_col >= 0 && hi_col >= 0 && !row[lo_col].empty() && !row[hi_col].empty()) {
              s.lo.push_back(std::stod(row[lo_col]));
              s.hi.push_back(std::stod(row[hi_col]));
            }
          }
          if (s.lo.size() != s.x.size()) {
            s.lo.clear();
            s.hi.clear();
          }
          if (!s.x.empty()) series.push_back(std::move(s));
        }
      } else {
        const int col = csv.column(metric);
        if (col < 0) throw UsageError(input + ": no column '" + metric + "'");
        plot::Series s;
        s.label = fs::path(input).parent_path().filename().string();
        if (s.label.empty()) s.label = fs::path(input).stem().string();
        for (const auto& row : csv.rows) {
          if (row[col].empty()) continue;
          s.x.push_back(std::stod(row[step_col]));
          s.y.push_back(std::stod(row[col]));
        }
        if (!s.x.empty()) series.push_back(std::move(s));
      }
    }
    if (series.empty()) throw UsageError("no plottable data for metric '" + metric + "'");

    plot::ChartOptions options;
    options.title = title;
    options.x_label = "env steps";
    options.y_label = metric;
    options.log_x = log_x;
    options.log_y = log_y;
    const std::string svg = plot::render_line_chart(series, options);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << svg;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  std::cout << "chart written to " << out << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"multi-agent policy-gradient lab with adaptive action sampling"};
  app.require_subcommand(1);

  CommonArgs train_args;
  CLI::App* train = app.add_subcommand("train", "run one training experiment");
  add_common_options(train, &train_args);

  CommonArgs se_args;
  int64_t se_budget = 0;
  std::string se_checkpoints = "16,64,256,1024,4096";
  int se_seeds = 10;
  int se_jobs = 0;
  CLI::App* sample_error =
      app.add_subcommand("sample-error", "fixed-policy sampling-error experiment");
  add_common_options(sample_error, &se_args);
  sample_error->add_option("--budget", se_budget, "sample budget (overrides --steps)");
  sample_error->add_option("--checkpoints", se_checkpoints, "comma-separated checkpoint steps");
  sample_error->add_option("--seeds", se_seeds, "number of seeds");
  sample_error->add_option("--jobs", se_jobs, "max concurrent runs (default: cores)");

  CommonArgs sweep_args;
  std::string sweep_samplers = "on-policy,props,ma-props";
  int sweep_seeds = 1;
  int sweep_jobs = 0;
  std::string sweep_mode = "train";
  int64_t sweep_budget = 0;
  std::string sweep_checkpoints = "16,64,256,1024,4096";
  CLI::App* sweep = app.add_subcommand("sweep", "seed x sampler sweep with an aggregate summary");
  add_common_options(sweep, &sweep_args);
  sweep->add_option("--samplers", sweep_samplers, "comma-separated sampler set");
  sweep->add_option("--seeds", sweep_seeds, "number of seeds");
  sweep->add_option("--jobs", sweep_jobs, "max concurrent runs (default: cores)");
  sweep->add_option("--mode", sweep_mode, "train or sample-error");
  sweep->add_option("--budget", sweep_budget, "sample budget for sample-error mode");
  sweep->add_option("--checkpoints", sweep_checkpoints, "checkpoints for sample-error mode");

  std::vector<std::string> plot_inputs;
  std::string plot_metric, plot_out, plot_title;
  bool plot_log_x = false, plot_log_y = false;
  CLI::App* plot_cmd = app.add_subcommand("plot", "render metric curves from CSVs to SVG");
  plot_cmd->add_option("inputs", plot_inputs, "metrics.csv or summary.csv files")->required();
  plot_cmd->add_option("--metric", plot_metric, "metric column to plot")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->add_option("--title", plot_title, "chart title");
  plot_cmd->add_flag("--log-x", plot_log_x, "logarithmic x axis");
  plot_cmd->add_flag("--log-y", plot_log_y, "logarithmic y axis");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (train->parsed()) {
      train_args.extras = train->remaining();
      return cmd_train(train_args);
    }
    if (sample_error->parsed()) {
      se_args.extras = sample_error->remaining();
      return cmd_sample_error(se_args, se_budget, se_checkpoints, se_seeds, se_jobs);
    }
    if (sweep->parsed()) {
      sweep_args.extras = sweep->remaining();
      return cmd_sweep(sweep_args, sweep_samplers, sweep_seeds, sweep_jobs, sweep_mode,
                       sweep_budget, sweep_checkpoints);
    }
    if (plot_cmd->parsed()) {
      return cmd_plot(plot_inputs, plot_metric, plot_out, plot_title, plot_log_x, plot_log_y);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace jointsampler::cli
