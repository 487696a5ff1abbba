#include "jointsampler/harness/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace jointsampler::harness {

namespace fs = std::filesystem;

void parallel_for_tasks(const std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepRun> run_sweep(const SweepSpec& spec) {
  std::vector<SweepRun> runs;
  for (policy::SamplerMode sampler : spec.samplers) {
    for (uint64_t seed : spec.seeds) {
      runs.push_back({sampler, seed, {}});
    }
  }

  std::vector<std::function<void()>> tasks;
  tasks.reserve(runs.size());
  for (SweepRun& run : runs) {
    tasks.push_back([&run, &spec] {
      ExperimentConfig cfg = spec.base;
      cfg.sampler = run.sampler;
      cfg.seed = run.seed;
      std::string dir;
      if (!spec.out_root.empty()) {
        dir = (fs::path(spec.out_root) / policy::to_string(run.sampler) /
               ("seed_" + std::to_string(run.seed)))
                  .string();
      }
      run.record = spec.sampling_error_mode ? run_sampling_error(cfg, dir)
                                            : run_training(cfg, dir);
    });
  }
  parallel_for_tasks(tasks, spec.jobs);
  return runs;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

using Getter = std::function<std::optional<double>(const MetricsRow&)>;

void append_stats(std::ostringstream& out, const std::vector<const MetricsRow*>& rows,
                  const Getter& get, nn::Rng& rng) {
  std::vector<double> values;
  for (const MetricsRow* r : rows) {
    if (const auto v = get(*r)) values.push_back(*v);
  }
  if (values.empty()) {
    out << ",,,";
    return;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  const auto [lo, hi] = metrics::bootstrap_ci(values, 0.95, 1000, rng);
  out << "," << fmt_opt(mean) << "," << fmt_opt(lo) << "," << fmt_opt(hi);
}

}  // namespace

std::string summarize_runs(const std::vector<SweepRun>& runs, uint64_t bootstrap_seed) {
  std::ostringstream out;
  out << kSummaryHeader << "\n";
  nn::Rng rng = stream_rng(bootstrap_seed, Stream::kBootstrap);

  // Stable sampler order: first appearance in `runs`.
  std::vector<policy::SamplerMode> samplers;
  for (const SweepRun& r : runs) {
    bool seen = false;
    for (policy::SamplerMode m : samplers) seen = seen || m == r.sampler;
    if (!seen) samplers.push_back(r.sampler);
  }

  const Getter getters[] = {
      [](const MetricsRow& r) { return r.success_rate; },
      [](const MetricsRow& r) { return r.tv_joint; },
      [](const MetricsRow& r) { return r.kl_joint; },
      [](const MetricsRow& r) { return r.kl_agent[0]; },
      [](const MetricsRow& r) { return r.kl_agent[1]; },
  };

  for (policy::SamplerMode sampler : samplers) {
    std::vector<const RunRecord*> records;
    for (const SweepRun& r : runs) {
      if (r.sampler == sampler) records.push_back(&r.record);
    }
    if (records.empty() || records[0]->rows.empty()) continue;
    // Determinism gives every seed the same step sequence.
    for (size_t row_i = 0; row_i < records[0]->rows.size(); ++row_i) {
      const int64_t step = records[0]->rows[row_i].step;
      std::vector<const MetricsRow*> rows;
      for (const RunRecord* rec : records) {
        if (row_i < rec->rows.size() && rec->rows[row_i].step == step) {
          rows.push_back(&rec->rows[row_i]);
        }
      }
      out << policy::to_string(sampler) << "," << step << "," << rows.size();
      for (const Getter& g : getters) append_stats(out, rows, g, rng);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace jointsampler::harness
