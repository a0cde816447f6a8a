// bpsched: generate benchmark models, run schedulers, sweep configurations,
// and verify marginals against exact inference.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bpsched/errors.hpp"
#include "bpsched/exact.hpp"
#include "bpsched/generators.hpp"
#include "bpsched/model_io.hpp"
#include "bpsched/mrf.hpp"
#include "bpsched/schedulers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bpsched::error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bpsched::error("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw bpsched::error("write failure on " + path.string());
}

struct SchedulerFlags {
  std::string scheduler = "lbp";
  double epsilon = 1e-5;
  double p = 1.0;
  double low_p = 0.7;
  double high_p = 1.0;
  double edge_ratio_threshold = 0.9;
  uint32_t splash_depth = 2;
  uint64_t max_iterations = 10000;
  double time_limit = 90.0;
  uint64_t seed = 0;
  int workers = -1; // -1: fall back to BP_SCHED_WORKERS, then auto

  void add_to(CLI::App& cmd) {
    cmd.add_option("--scheduler", scheduler, "Scheduler: lbp, srbp, rbp, rs, rnbp")
        ->default_val(scheduler);
    cmd.add_option("--p", p, "Frontier fraction for rbp/rs, in (0,1]")->default_val(p);
    cmd.add_option("--low-p", low_p, "RnBP low parallelism")->default_val(low_p);
    add_common_to(cmd);
  }

  // Everything except --scheduler/--p/--low-p, which bench sweeps as lists.
  void add_common_to(CLI::App& cmd) {
    cmd.add_option("--epsilon", epsilon, "Convergence threshold")->default_val(epsilon);
    cmd.add_option("--high-p", high_p, "RnBP high parallelism")->default_val(high_p);
    cmd.add_option("--edge-ratio-threshold", edge_ratio_threshold,
                   "EdgeRatio above which RnBP drops to low parallelism")
        ->default_val(edge_ratio_threshold);
    cmd.add_option("--splash-depth", splash_depth, "Residual Splash BFS depth h")
        ->default_val(splash_depth);
    cmd.add_option("--max-iterations", max_iterations, "Iteration cap")->default_val(max_iterations);
    cmd.add_option("--time-limit", time_limit, "Wall-clock cap in seconds")->default_val(time_limit);
    cmd.add_option("--seed", seed, "RNG seed")->default_val(seed);
    cmd.add_option("--workers", workers, "Worker threads (0 = auto, default from BP_SCHED_WORKERS)");
  }

  unsigned resolve_workers() const {
    if (workers >= 0) return static_cast<unsigned>(workers);
    if (const char* env = std::getenv("BP_SCHED_WORKERS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;
  }

  bpsched::SchedulerConfig to_config() const {
    const auto kind = bpsched::scheduler_from_string(scheduler);
    if (!kind) throw bpsched::error("unknown scheduler '" + scheduler + "'");
    bpsched::SchedulerConfig cfg;
    cfg.kind = *kind;
    cfg.epsilon = epsilon;
    cfg.p = p;
    cfg.low_p = low_p;
    cfg.high_p = high_p;
    cfg.edge_ratio_threshold = edge_ratio_threshold;
    cfg.splash_depth = splash_depth;
    cfg.max_iterations = max_iterations;
    cfg.time_limit = time_limit;
    cfg.seed = seed;
    cfg.worker_count = resolve_workers();
    cfg.validate();
    return cfg;
  }
};

json summary_json(const bpsched::RunResult& result) {
  return json{{"converged", result.converged},
              {"iterations", result.iterations},
              {"wall_time", result.wall_time},
              {"messages_updated_total", result.messages_updated_total}};
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string kind = "ising";
  uint32_t n = 10;
  double c = 2.0;
  uint32_t count = 25;
  uint64_t seed = 0;
  std::string out_dir;
};

int cmd_generate(const GenerateArgs& args) {
  if (args.kind != "ising" && args.kind != "chain") {
    throw bpsched::error("unknown kind '" + args.kind + "' (expected ising or chain)");
  }
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  std::string manifest = "path,kind,n,c,seed\n";
  for (uint32_t i = 0; i < args.count; ++i) {
    const uint64_t seed = args.seed + i;
    bpsched::PairwiseMRF graph =
        args.kind == "ising"
            ? bpsched::generate_ising({args.n, args.c, seed})
            : bpsched::generate_chain({args.n, args.c, seed});
    const std::string name =
        args.kind + "_n" + std::to_string(args.n) + "_c" + format_double(args.c) + "_s" +
        std::to_string(seed) + ".pgm";
    write_file(out_dir / name, bpsched::serialize_model(graph));
    manifest += name + "," + args.kind + "," + std::to_string(args.n) + "," +
                format_double(args.c) + "," + std::to_string(seed) + "\n";
  }
  write_file(out_dir / "manifest.csv", manifest);
  std::cout << "wrote " << args.count << " models + manifest to " << out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const std::string& model_path, const SchedulerFlags& flags,
            const std::string& trace_out) {
  const bpsched::PairwiseMRF graph = bpsched::parse_model(read_file(model_path));
  const bpsched::SchedulerConfig cfg = flags.to_config();
  const bpsched::RunResult result = bpsched::run(graph, cfg);

  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary);
    if (!out) throw bpsched::error("cannot open " + trace_out + " for writing");
    bpsched::write_trace_csv(result, out);
  }
  std::cout << summary_json(result).dump() << "\n";
  return result.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// bench

struct ManifestEntry {
  fs::path path;
  uint64_t seed = 0;
};

std::vector<ManifestEntry> load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw bpsched::error("cannot open manifest " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false; // header
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 5) throw bpsched::error("malformed manifest line: " + line);
    entries.push_back({base / fields[0], std::stoull(fields[4])});
  }
  if (entries.empty()) throw bpsched::error("manifest lists no models");
  return entries;
}

std::string config_label(const bpsched::SchedulerConfig& cfg) {
  switch (cfg.kind) {
    case bpsched::SchedulerKind::lbp:
      return "lbp";
    case bpsched::SchedulerKind::serial_rbp:
      return "srbp";
    case bpsched::SchedulerKind::rbp:
      return "rbp_p" + format_double(cfg.p);
    case bpsched::SchedulerKind::rs:
      return "rs_p" + format_double(cfg.p) + "_h" + std::to_string(cfg.splash_depth);
    case bpsched::SchedulerKind::rnbp:
      return "rnbp_low" + format_double(cfg.low_p) + "_high" + format_double(cfg.high_p);
  }
  return "unknown";
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

struct BenchArgs {
  std::string manifest;
  std::vector<std::string> schedulers;
  std::vector<double> p_values;
  std::vector<double> low_p_values;
  SchedulerFlags base;
  std::string out_dir;
};

int cmd_bench(const BenchArgs& args) {
  const std::vector<ManifestEntry> suite = load_manifest(args.manifest);
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  // Cross the scheduler list with the parameter lists that apply to it.
  std::vector<bpsched::SchedulerConfig> grid;
  for (const std::string& name : args.schedulers) {
    SchedulerFlags flags = args.base;
    flags.scheduler = name;
    const bpsched::SchedulerConfig base_cfg = flags.to_config();
    switch (base_cfg.kind) {
      case bpsched::SchedulerKind::rbp:
      case bpsched::SchedulerKind::rs:
        for (double p : args.p_values.empty() ? std::vector<double>{args.base.p} : args.p_values) {
          bpsched::SchedulerConfig cfg = base_cfg;
          cfg.p = p;
          cfg.validate();
          grid.push_back(cfg);
        }
        break;
      case bpsched::SchedulerKind::rnbp:
        for (double low :
             args.low_p_values.empty() ? std::vector<double>{args.base.low_p} : args.low_p_values) {
          bpsched::SchedulerConfig cfg = base_cfg;
          cfg.low_p = low;
          cfg.validate();
          grid.push_back(cfg);
        }
        break;
      default:
        grid.push_back(base_cfg);
        break;
    }
  }

  std::string runs_csv = "config,model,seed,status,converged,iterations,wall_time_s,messages_updated\n";
  std::string summary_csv = "config,runs,converged,median_time_s,median_iterations\n";

  for (const bpsched::SchedulerConfig& cfg : grid) {
    const std::string label = config_label(cfg);
    std::vector<double> converged_times;
    std::vector<double> converged_iterations;
    uint32_t converged_count = 0;

    for (size_t i = 0; i < suite.size(); ++i) {
      bpsched::SchedulerConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + i; // distinct, recorded stream per run
      std::string status = "ok";
      bpsched::RunResult result;
      try {
        const bpsched::PairwiseMRF graph = bpsched::parse_model(read_file(suite[i].path));
        result = bpsched::run(graph, run_cfg);
      } catch (const std::exception& ex) {
        std::string msg = ex.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        status = "error: " + msg;
      }
      const bool ok = status == "ok";
      if (ok && result.converged) {
        ++converged_count;
        converged_times.push_back(result.wall_time);
        converged_iterations.push_back(static_cast<double>(result.iterations));
      }
      runs_csv += label + "," + suite[i].path.filename().string() + "," +
                  std::to_string(run_cfg.seed) + "," + status + "," +
                  (ok ? (result.converged ? "true" : "false") : "") + "," +
                  (ok ? std::to_string(result.iterations) : "") + "," +
                  (ok ? format_double(result.wall_time) : "") + "," +
                  (ok ? std::to_string(result.messages_updated_total) : "") + "\n";
      std::cerr << label << " " << suite[i].path.filename().string() << ": "
                << (ok ? (result.converged ? "converged" : "not converged") : status) << " in "
                << format_double(result.wall_time) << "s\n";
    }

    // Cumulative convergence curve: fraction of the suite converged by time t.
    std::sort(converged_times.begin(), converged_times.end());
    std::string curve = "time_s,fraction_converged\n";
    for (size_t i = 0; i < converged_times.size(); ++i) {
      curve += format_double(converged_times[i]) + "," +
               format_double(static_cast<double>(i + 1) / static_cast<double>(suite.size())) + "\n";
    }
    write_file(out_dir / ("curve_" + label + ".csv"), curve);

    summary_csv += label + "," + std::to_string(suite.size()) + "," +
                   std::to_string(converged_count) + "," + format_double(median(converged_times)) +
                   "," + format_double(median(converged_iterations)) + "\n";
  }

  write_file(out_dir / "runs.csv", runs_csv);
  write_file(out_dir / "summary.csv", summary_csv);
  std::cout << summary_csv;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& model_path, const SchedulerFlags& flags) {
  const bpsched::PairwiseMRF graph = bpsched::parse_model(read_file(model_path));
  const bpsched::SchedulerConfig cfg = flags.to_config();
  const bpsched::RunResult result = bpsched::run(graph, cfg);

  const std::vector<bpsched::vertex_id> order = bpsched::min_degree_order(graph);
  const bpsched::BeliefTable exact = bpsched::variable_elimination(graph, order);

  std::string rows = "vertex,kl\n";
  double sum = 0.0;
  for (bpsched::vertex_id v = 0; v < graph.num_vertices(); ++v) {
    const double kl = bpsched::kl_divergence(exact.at(v), result.beliefs.at(v));
    sum += kl;
    rows += std::to_string(v) + "," + format_double(kl) + "\n";
  }
  const double mean =
      graph.num_vertices() == 0 ? 0.0 : sum / static_cast<double>(graph.num_vertices());

  std::cout << rows;
  json summary{{"mean_kl", mean},
               {"converged", result.converged},
               {"iterations", result.iterations},
               {"wall_time", result.wall_time}};
  if (!result.converged) {
    summary["warning"] = "run did not converge; KL measured against non-converged beliefs";
  }
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-propagation scheduling benchmark harness"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a benchmark model suite");
  generate->add_option("--kind", gen.kind, "ising or chain")->required();
  generate->add_option("--n", gen.n, "Grid side length / chain length")->required();
  generate->add_option("--c", gen.c, "Difficulty C")->required();
  generate->add_option("--count", gen.count, "Number of instances")->default_val(gen.count);
  generate->add_option("--seed", gen.seed, "Base seed (instance i uses seed + i)")
      ->default_val(gen.seed);
  generate->add_option("--out", gen.out_dir, "Output directory")->required();

  std::string run_model;
  std::string run_trace_out;
  SchedulerFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one scheduler on one model");
  run_cmd->add_option("--model", run_model, "Model file")->required();
  run_cmd->add_option("--out", run_trace_out, "Trace CSV output path");
  run_flags.add_to(*run_cmd);

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Sweep schedulers over a model suite");
  bench_cmd->add_option("--manifest", bench.manifest, "Manifest CSV from generate")->required();
  bench_cmd->add_option("--out", bench.out_dir, "Output directory")->required();
  bench_cmd
      ->add_option("--scheduler", bench.schedulers, "Schedulers to sweep (repeat or comma-separate)")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--p", bench.p_values, "Frontier fractions for rbp/rs")->delimiter(',');
  bench_cmd->add_option("--low-p", bench.low_p_values, "Low parallelism values for rnbp")
      ->delimiter(',');
  bench.base.add_common_to(*bench_cmd);

  std::string verify_model;
  SchedulerFlags verify_flags;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Compare scheduler beliefs to exact marginals");
  verify_cmd->add_option("--model", verify_model, "Model file")->required();
  verify_flags.add_to(*verify_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (run_cmd->parsed()) return cmd_run(run_model, run_flags, run_trace_out);
    if (bench_cmd->parsed()) return cmd_bench(bench);
    if (verify_cmd->parsed()) return cmd_verify(verify_model, verify_flags);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
