#include "jointsampler/harness/record.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jointsampler/errors.hpp"

namespace jointsampler::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::optional<double> parse_opt(const std::string& field, const std::string& filename,
                                int line_no) {
  if (field.empty()) return std::nullopt;
  try {
    size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(filename, line_no, "bad numeric field: '" + field + "'");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr uint32_t kParamsMagic = 0x4a535052;  // "JSPR"
constexpr uint32_t kParamsVersion = 1;

void write_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ParseError(path, 0, "truncated params file");
  return v;
}

void write_spec(std::ofstream& out, const nn::MlpSpec& spec) {
  write_u32(out, static_cast<uint32_t>(spec.input_dim));
  write_u32(out, static_cast<uint32_t>(spec.hidden_dims.size()));
  for (int h : spec.hidden_dims) write_u32(out, static_cast<uint32_t>(h));
  write_u32(out, static_cast<uint32_t>(spec.output_dim));
  write_u32(out, spec.zero_final_layer ? 1 : 0);
}

nn::MlpSpec read_spec(std::ifstream& in, const std::string& path) {
  nn::MlpSpec spec;
  spec.input_dim = static_cast<int>(read_u32(in, path));
  const uint32_t n_hidden = read_u32(in, path);
  spec.hidden_dims.clear();
  for (uint32_t i = 0; i < n_hidden; ++i) {
    spec.hidden_dims.push_back(static_cast<int>(read_u32(in, path)));
  }
  spec.output_dim = static_cast<int>(read_u32(in, path));
  spec.zero_final_layer = read_u32(in, path) != 0;
  return spec;
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  write_u32(out, static_cast<uint32_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd read_vector(std::ifstream& in, const std::string& path) {
  const uint32_t n = read_u32(in, path);
  Eigen::VectorXd v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw ParseError(path, 0, "truncated params file");
  return v;
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row, uint64_t seed) {
  std::ostringstream os;
  os << row.step << "," << seed << "," << fmt_opt(row.success_rate) << ","
     << fmt_opt(row.tv_joint) << "," << fmt_opt(row.kl_joint) << "," << fmt_opt(row.kl_agent[0])
     << "," << fmt_opt(row.kl_agent[1]);
  return os.str();
}

MetricsRow parse_metrics_row(const std::string& line, const std::string& filename, int line_no) {
  const std::vector<std::string> fields = split_csv(line);
  if (fields.size() != 7) {
    throw ParseError(filename, line_no, "expected 7 fields, got " + std::to_string(fields.size()));
  }
  MetricsRow row;
  try {
    row.step = std::stoll(fields[0]);
  } catch (const std::exception&) {
    throw ParseError(filename, line_no, "bad step field: '" + fields[0] + "'");
  }
  row.success_rate = parse_opt(fields[2], filename, line_no);
  row.tv_joint = parse_opt(fields[3], filename, line_no);
  row.kl_joint = parse_opt(fields[4], filename, line_no);
  row.kl_agent[0] = parse_opt(fields[5], filename, line_no);
  row.kl_agent[1] = parse_opt(fields[6], filename, line_no);
  return row;
}

void persist_run(const RunRecord& record, const TrainedPolicies* params, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream cfg(fs::path(dir) / "config");
    cfg << serialize_config(record.config);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# wall_seconds = %.6f\n", record.wall_seconds);
    cfg << buf;
  }
  {
    std::ofstream csv(fs::path(dir) / "metrics.csv");
    csv << kMetricsHeader << "\n";
    for (const MetricsRow& row : record.rows) csv << format_metrics_row(row, record.seed) << "\n";
  }
  if (params) save_params((fs::path(dir) / "final_params").string(), *params);
}

RunRecord load_run(const std::string& dir) {
  RunRecord record;
  const std::string cfg_path = (fs::path(dir) / "config").string();
  const std::string text = read_file(cfg_path);
  apply_config_text(record.config, text, cfg_path);
  record.seed = record.config.seed;

  // wall_seconds is stored as a trailing comment so the snapshot stays a pure
  // re-runnable key=value file.
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const std::string prefix = "# wall_seconds = ";
    if (line.rfind(prefix, 0) == 0) record.wall_seconds = std::stod(line.substr(prefix.size()));
  }

  const std::string csv_path = (fs::path(dir) / "metrics.csv").string();
  std::stringstream csv(read_file(csv_path));
  int line_no = 0;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kMetricsHeader) throw ParseError(csv_path, 1, "unexpected header");
      continue;
    }
    record.rows.push_back(parse_metrics_row(line, csv_path, line_no));
  }
  return record;
}

void save_params(const std::string& path, const TrainedPolicies& params) {
  std::ofstream out(path, std::ios::binary);
  write_u32(out, kParamsMagic);
  write_u32(out, kParamsVersion);
  write_u32(out, static_cast<uint32_t>(params.joint.num_agents()));
  for (int i = 0; i < params.joint.num_agents(); ++i) {
    write_spec(out, params.joint.agent(i).spec);
    write_vector(out, params.joint.agent(i).params.values());
  }
  write_u32(out, static_cast<uint32_t>(params.critics.size()));
  for (const ppo::Critic& c : params.critics) {
    write_u32(out, c.input == ppo::CriticInput::kJointState ? 1 : 0);
    write_spec(out, c.spec);
    write_vector(out, c.params.values());
  }
}

TrainedPolicies load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  if (read_u32(in, path) != kParamsMagic) throw ParseError(path, 0, "bad magic");
  if (read_u32(in, path) != kParamsVersion) throw ParseError(path, 0, "unsupported version");
  TrainedPolicies out;
  const uint32_t n_agents = read_u32(in, path);
  std::vector<policy::AgentPolicy> agents;
  for (uint32_t i = 0; i < n_agents; ++i) {
    const nn::MlpSpec spec = read_spec(in, path);
    Eigen::VectorXd values = read_vector(in, path);
    if (values.size() != spec.param_count()) throw ParseError(path, 0, "param count mismatch");
    agents.push_back({spec, nn::ParamVector(spec, std::move(values))});
  }
  out.joint = policy::JointTargetPolicy(std::move(agents));
  const uint32_t n_critics = read_u32(in, path);
  for (uint32_t i = 0; i < n_critics; ++i) {
    ppo::Critic c;
    c.input = read_u32(in, path) != 0 ? ppo::CriticInput::kJointState : ppo::CriticInput::kOwnObs;
    c.spec = read_spec(in, path);
    Eigen::VectorXd values = read_vector(in, path);
    if (values.size() != c.spec.param_count()) throw ParseError(path, 0, "param count mismatch");
    c.params = nn::ParamVector(c.spec, std::move(values));
    out.critics.push_back(std::move(c));
  }
  return out;
}

}  // namespace jointsampler::harness
