#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "jointsampler/cli/cli.hpp"
#include "jointsampler/harness/sweep.hpp"
#include "jointsampler/plot/svg.hpp"
#include "test_support.hpp"

using namespace jointsampler;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path p =
      fs::temp_directory_path() / ("jointsampler_cli_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) { return cli::run_cli(args); }

}  // namespace

TEST_CASE("train writes a full run directory") {
  const std::string dir = temp_dir("train");
  const int code = run({"train", "--game", "g19", "--algo", "mappo", "--sampler", "ma-props",
                        "--seed", "7", "--steps", "100", "--out", dir + "/x",
                        "--eval-every-batches", "5", "--metric-every-batches", "0",
                        "--behavior-batch", "10", "--behavior-epochs", "1"});
  CHECK(code == 0);
  CHECK(fs::exists(dir + "/x/config"));
  CHECK(fs::exists(dir + "/x/metrics.csv"));
  CHECK(fs::exists(dir + "/x/final_params"));
  const harness::RunRecord rec = harness::load_run(dir + "/x");
  CHECK(rec.config.game == "g19");
  CHECK(rec.config.seed == 7);
  CHECK_FALSE(rec.rows.empty());
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"train", "--game", "nosuchgame", "--steps", "10"}) == 2);
  CHECK(run({"train", "--game", "g1", "--bogus-flag", "3"}) == 2);
  CHECK(run({"sample-error", "--game", "g1", "--checkpoints", "4,banana"}) == 2);
  CHECK(run({"nosuchcommand"}) == 2);
  CHECK(run({}) == 2);
}

TEST_CASE("explicit flags equal to the per-game defaults do not change the run") {
  const std::string dir = temp_dir("defaults");
  // 2x2 defaults: target batch 20, ppo lr 0.1, behavior lr 0.03, behavior batch 1
  CHECK(run({"train", "--game", "g1", "--seed", "3", "--steps", "100", "--out", dir + "/a",
             "--metric-every-batches", "0"}) == 0);
  CHECK(run({"train", "--game", "g1", "--seed", "3", "--steps", "100", "--out", dir + "/b",
             "--metric-every-batches", "0", "--target-batch", "20", "--lr", "0.1",
             "--behavior-lr", "0.03", "--behavior-batch", "1"}) == 0);
  CHECK(slurp(dir + "/a/config") == slurp(dir + "/b/config"));
  CHECK(slurp(dir + "/a/metrics.csv") == slurp(dir + "/b/metrics.csv"));
  fs::remove_all(dir);
}

TEST_CASE("config files feed runs and flags override them") {
  const std::string dir = temp_dir("cfgfile");
  {
    std::ofstream f(dir + "/exp.cfg");
    f << "game = g2\n";
    f << "steps = 100\n";
    f << "seed = 5\n";
    f << "metric_every_batches = 0\n";
  }
  CHECK(run({"train", "--config", dir + "/exp.cfg", "--out", dir + "/a"}) == 0);
  const harness::RunRecord a = harness::load_run(dir + "/a");
  CHECK(a.config.game == "g2");
  CHECK(a.config.seed == 5);

  CHECK(run({"train", "--config", dir + "/exp.cfg", "--seed", "9", "--out", dir + "/b"}) == 0);
  const harness::RunRecord b = harness::load_run(dir + "/b");
  CHECK(b.config.seed == 9);

  {
    std::ofstream f(dir + "/bad.cfg");
    f << "no_such_key = 1\n";
  }
  CHECK(run({"train", "--config", dir + "/bad.cfg", "--out", dir + "/c"}) == 2);
  fs::remove_all(dir);
}

TEST_CASE("sweep produces per-run directories plus a reproducible summary") {
  const std::string a = temp_dir("sweep_a");
  const std::string b = temp_dir("sweep_b");
  const std::vector<std::string> base = {
      "sweep",       "--game",  "g1",      "--samplers", "on-policy,props,ma-props",
      "--seeds",     "2",       "--jobs",  "2",          "--steps",
      "60",          "--seed",  "1",       "--metric-every-batches", "3",
      "--eval-every-batches", "3", "--behavior-batch", "10", "--behavior-epochs", "1"};
  auto with_out = [&](const std::string& out) {
    std::vector<std::string> args = base;
    args.push_back("--out");
    args.push_back(out);
    return args;
  };
  CHECK(run(with_out(a)) == 0);
  int run_dirs = 0;
  for (const char* sampler : {"on-policy", "props", "ma-props"}) {
    for (int seed = 1; seed <= 2; ++seed) {
      const fs::path p = fs::path(a) / sampler / ("seed_" + std::to_string(seed));
      if (fs::exists(p / "metrics.csv")) ++run_dirs;
    }
  }
  CHECK(run_dirs == 6);
  REQUIRE(fs::exists(fs::path(a) / "summary.csv"));

  CHECK(run(with_out(b)) == 0);
  CHECK(slurp(fs::path(a) / "summary.csv") == slurp(fs::path(b) / "summary.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sample-error sweep records checkpoint rows per seed") {
  const std::string dir = temp_dir("se");
  CHECK(run({"sample-error", "--game", "g1", "--sampler", "ma-props", "--budget", "64",
             "--checkpoints", "16,64", "--seeds", "2", "--jobs", "2", "--out", dir}) == 0);
  const harness::RunRecord rec = harness::load_run(dir + "/ma-props/seed_0");
  REQUIRE(rec.rows.size() == 2);
  CHECK(rec.rows[0].step == 16);
  CHECK(rec.rows[1].step == 64);
  CHECK(rec.config.fixed_policy);
  CHECK(fs::exists(fs::path(dir) / "summary.csv"));
  fs::remove_all(dir);
}

TEST_CASE("plot renders single-run metrics to a well-formed SVG") {
  const std::string dir = temp_dir("plot");
  {
    std::ofstream f(dir + "/metrics.csv");
    f << harness::kMetricsHeader << "\n";
    f << "20,0,,0.4,,,\n40,0,,0.3,,,\n60,0,,0.25,,,\n";
  }
  CHECK(run({"plot", dir + "/metrics.csv", "--metric", "tv_joint", "--out", dir + "/c.svg"}) == 0);
  const std::string svg = slurp(dir + "/c.svg");
  CHECK(test::xml_well_formed(svg));
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);  // self-contained

  CHECK(run({"plot", dir + "/metrics.csv", "--metric", "no_such_metric", "--out",
             dir + "/d.svg"}) == 2);
  fs::remove_all(dir);
}

TEST_CASE("plot renders banded series per sampler from summary files") {
  const std::string dir = temp_dir("plotsum");
  {
    std::ofstream f(dir + "/summary.csv");
    f << harness::kSummaryHeader << "\n";
    f << "on-policy,16,2,,,,0.4,0.35,0.45,,,,,,,,,\n";
    f << "on-policy,64,2,,,,0.2,0.15,0.25,,,,,,,,,\n";
    f << "ma-props,16,2,,,,0.3,0.25,0.35,,,,,,,,,\n";
    f << "ma-props,64,2,,,,0.1,0.05,0.15,,,,,,,,,\n";
  }
  CHECK(run({"plot", dir + "/summary.csv", "--metric", "tv_joint", "--out", dir + "/s.svg",
             "--log-y"}) == 0);
  const std::string svg = slurp(dir + "/s.svg");
  CHECK(test::xml_well_formed(svg));
  CHECK(svg.find(">on-policy</text>") != std::string::npos);
  CHECK(svg.find(">ma-props</text>") != std::string::npos);
  CHECK(svg.find("fill-opacity") != std::string::npos);  // CI bands
  fs::remove_all(dir);
}

TEST_CASE("svg escaping and band rendering") {
  plot::Series s;
  s.label = "a<b>&\"c\"";
  s.x = {1, 2, 3};
  s.y = {1.0, 0.5, 0.25};
  s.lo = {0.9, 0.4, 0.2};
  s.hi = {1.1, 0.6, 0.3};
  plot::ChartOptions options;
  options.title = "t&t";
  const std::string svg = plot::render_line_chart({s}, options);
  CHECK(test::xml_well_formed(svg));
  CHECK(svg.find("a&lt;b&gt;&amp;&quot;c&quot;") != std::string::npos);
  CHECK(svg.find("t&amp;t") != std::string::npos);
}
