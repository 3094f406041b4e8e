#include "twincast/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "twincast/log.hpp"
#include "twincast/sim.hpp"
#include "twincast/solver.hpp"

namespace twincast::cli {

namespace {

bool write_file(const std::string& path, const std::string& content,
                std::string& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err = "cannot open output file '" + path + "'";
    return false;
  }
  out << content;
  return true;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

struct CommonOpts {
  std::string config_path;
  std::string scheme = "proposed";
  std::uint64_t seed = 1;
  int windows = 90;
  std::string out;
  std::string format = "csv";
  std::string demand_mode;
  std::string agent_weights;
};

int load_cfg_or_fail(const std::string& path, SystemConfig& cfg) {
  const ConfigParse parsed = load_config_file(path);
  if (!parsed.ok()) {
    std::cerr << "error: config '" << path << "': " << parsed.errors.front()
              << "\n";
    return 1;
  }
  cfg = parsed.config;
  return 0;
}

int apply_demand_mode(const std::string& mode, SystemConfig& cfg) {
  if (mode.empty()) return 0;
  if (mode == "literal") cfg.demand_mode = DemandMode::Literal;
  else if (mode == "dimensional") cfg.demand_mode = DemandMode::Dimensional;
  else return fail_usage("unknown --demand-mode '" + mode + "'");
  return 0;
}

int cmd_gen(const std::string& out_path) {
  const SystemConfig cfg;
  const std::string text = serialize_config(cfg);
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::string err;
  if (!write_file(out_path, text, err)) return fail_usage(err);
  log_at(LogLevel::Info, "wrote default config to %s", out_path.c_str());
  return 0;
}

int cmd_run(const CommonOpts& opt, const std::string& twins_out) {
  SystemConfig cfg;
  if (int rc = load_cfg_or_fail(opt.config_path, cfg)) return rc;
  if (int rc = apply_demand_mode(opt.demand_mode, cfg)) return rc;
  const auto scheme = parse_scheme(opt.scheme);
  if (!scheme) return fail_usage("unknown --scheme '" + opt.scheme + "'");

  std::optional<LoadedWeights> weights;
  if (!opt.agent_weights.empty()) {
    try {
      weights = load_weights(opt.agent_weights);
    } catch (const std::exception& e) {
      return fail_usage(std::string("--agent-weights: ") + e.what());
    }
  }

  Scenario scen;
  scen.scheme = *scheme;
  scen.seed = opt.seed;
  scen.windows = opt.windows;

  SimState st = init_sim(cfg, scen, weights ? &weights->net : nullptr);
  std::vector<WindowMetrics> rows;
  rows.reserve(static_cast<std::size_t>(opt.windows));
  for (int w = 0; w < opt.windows; ++w) rows.push_back(run_window(st).metrics);

  const std::string text =
      opt.format == "json" ? metrics_to_json(rows) : metrics_to_csv(rows);
  if (opt.format != "json" && opt.format != "csv")
    return fail_usage("unknown --format '" + opt.format + "'");
  std::string err;
  if (opt.out.empty())
    std::cout << text;
  else if (!write_file(opt.out, text, err))
    return fail_usage(err);
  if (!twins_out.empty()) {
    if (!write_file(twins_out, serialize_twins(st.twins), err))
      return fail_usage(err);
  }
  return 0;
}

int cmd_train(const CommonOpts& opt, const std::string& curve_path,
              int episodes, int episode_len) {
  SystemConfig cfg;
  if (int rc = load_cfg_or_fail(opt.config_path, cfg)) return rc;
  if (int rc = apply_demand_mode(opt.demand_mode, cfg)) return rc;
  if (opt.out.empty()) return fail_usage("train requires --out for weights");
  AgentConfig agent_cfg;
  if (episodes > 0) agent_cfg.episodes = episodes;
  if (episode_len > 0) agent_cfg.episode_len = episode_len;
  Scenario base;
  base.seed = opt.seed;
  const AgentTrainResult trained = train_agent(
      cfg, base, agent_cfg, {512, 256, 128, 64}, opt.seed);
  try {
    save_weights(opt.out, trained.net, opt.seed, trained.steps);
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }
  if (!curve_path.empty()) {
    std::ostringstream os;
    os << "episode,mean_reward\n";
    for (std::size_t i = 0; i < trained.episode_mean_reward.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.10g", trained.episode_mean_reward[i]);
      os << i << ',' << buf << '\n';
    }
    std::string err;
    if (!write_file(curve_path, os.str(), err)) return fail_usage(err);
  }
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& solver) {
  const auto text = read_file(instance_path);
  if (!text)
    return fail_usage("cannot open instance file '" + instance_path + "'");
  const InstanceParse parsed = parse_instance(*text, SystemConfig{});
  if (!parsed.ok()) {
    std::cerr << "error: instance '" << instance_path
              << "': " << parsed.errors.front() << "\n";
    return 1;
  }
  SolveResult result;
  if (solver == "fs") result = fs_schedule(parsed.instance);
  else if (solver == "bbs") result = branch_and_bound(parsed.instance);
  else if (solver == "oracle") result = exhaustive_oracle(parsed.instance);
  else return fail_usage("unknown --solver '" + solver + "'");
  std::cout << format_solution(result);
  return result.feasible ? 0 : 2;
}

int cmd_bench(const CommonOpts& opt, int seeds, int threads) {
  SystemConfig cfg;
  if (int rc = load_cfg_or_fail(opt.config_path, cfg)) return rc;
  if (int rc = apply_demand_mode(opt.demand_mode, cfg)) return rc;
  std::optional<LoadedWeights> weights;
  if (!opt.agent_weights.empty()) {
    try {
      weights = load_weights(opt.agent_weights);
    } catch (const std::exception& e) {
      return fail_usage(std::string("--agent-weights: ") + e.what());
    }
  }
  Scenario base;
  base.windows = opt.windows;
  std::vector<std::uint64_t> seed_list;
  for (int i = 0; i < seeds; ++i) seed_list.push_back(opt.seed + static_cast<std::uint64_t>(i));
  const auto summaries = bench_schemes(cfg, base, seed_list,
                                       weights ? &weights->net : nullptr,
                                       threads);
  const std::string text = bench_to_csv(summaries);
  std::string err;
  if (opt.out.empty())
    std::cout << text;
  else if (!write_file(opt.out, text, err))
    return fail_usage(err);
  return 0;
}

int cmd_oracle_check(int instances, std::uint64_t seed) {
  Rng rng = derive_rng(seed, RngStream::Instances);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    const Instance inst = random_instance(rng, 4, 8, 6);
    const SolveResult fs = fs_schedule(inst);
    const SolveResult oracle = exhaustive_oracle(inst);
    const SolveResult bnb = branch_and_bound(inst);
    const double fs_gap =
        std::abs(fs.objective_bw - oracle.objective_bw) +
        std::abs(fs.objective_vm - oracle.objective_vm);
    const double bnb_gap =
        std::abs(bnb.objective_bw - oracle.objective_bw) +
        std::abs(bnb.objective_vm - oracle.objective_vm);
    if (fs_gap > 1e-9 || bnb_gap > 1e-9) {
      ++failures;
      log_at(LogLevel::Error, "instance %d: fs gap %.3e, bnb gap %.3e", i,
             fs_gap, bnb_gap);
    }
  }
  std::cout << "oracle-check: " << (instances - failures) << "/" << instances
            << " instances matched\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int execute(int argc, const char* const* argv) {
  CLI::App app{"twincast: digital-twin multicast reservation simulator"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string twins_out, curve_path, instance_path, solver = "fs";
  int episodes = 0, episode_len = 0, seeds = 10, threads = 0, instances = 200;

  auto* gen = app.add_subcommand("gen", "write the default config");
  gen->add_option("--out", opt.out, "output path (stdout when absent)");

  auto* run = app.add_subcommand("run", "run one episode and emit metrics");
  run->add_option("--config", opt.config_path, "config file")->required();
  run->add_option("--scheme", opt.scheme,
                  "proposed | wdt | dbscan-fs | dt-bbs");
  run->add_option("--seed", opt.seed, "run seed");
  run->add_option("--windows", opt.windows, "windows per episode");
  run->add_option("--out", opt.out, "metrics file (stdout when absent)");
  run->add_option("--format", opt.format, "csv | json");
  run->add_option("--demand-mode", opt.demand_mode,
                  "literal | dimensional (overrides config)");
  run->add_option("--agent-weights", opt.agent_weights,
                  "trained cluster-count agent");
  run->add_option("--twins-out", twins_out, "twin pool snapshot file");

  auto* train = app.add_subcommand("train", "train the cluster-count agent");
  train->add_option("--config", opt.config_path, "config file")->required();
  train->add_option("--seed", opt.seed, "training seed");
  train->add_option("--out", opt.out, "weights output file")->required();
  train->add_option("--curve", curve_path, "training-curve CSV");
  train->add_option("--episodes", episodes, "override episode count");
  train->add_option("--episode-len", episode_len, "override windows/episode");
  train->add_option("--demand-mode", opt.demand_mode,
                    "literal | dimensional (overrides config)");

  auto* solve = app.add_subcommand("solve", "solve one reservation instance");
  solve->add_option("--instance", instance_path, "instance file")->required();
  solve->add_option("--solver", solver, "fs | bbs | oracle");

  auto* bench = app.add_subcommand("bench", "compare all schemes");
  bench->add_option("--config", opt.config_path, "config file")->required();
  bench->add_option("--seeds", seeds, "number of seeds");
  bench->add_option("--seed", opt.seed, "first seed");
  bench->add_option("--windows", opt.windows, "windows per episode");
  bench->add_option("--out", opt.out, "summary CSV (stdout when absent)");
  bench->add_option("--threads", threads, "worker threads (0 = auto)");
  bench->add_option("--agent-weights", opt.agent_weights,
                    "trained cluster-count agent");
  bench->add_option("--demand-mode", opt.demand_mode,
                    "literal | dimensional (overrides config)");

  auto* oracle_check =
      app.add_subcommand("oracle-check", "verify FS and BB against the oracle");
  oracle_check->add_option("--instances", instances, "instance count");
  oracle_check->add_option("--seed", opt.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt.out);
    if (run->parsed()) return cmd_run(opt, twins_out);
    if (train->parsed()) return cmd_train(opt, curve_path, episodes, episode_len);
    if (solve->parsed()) return cmd_solve(instance_path, solver);
    if (bench->parsed()) return cmd_bench(opt, seeds, threads);
    if (oracle_check->parsed()) return cmd_oracle_check(instances, opt.seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace twincast::cli
