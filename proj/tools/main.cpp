// drfp: run, compare and inspect D-RFP experiments from config files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "drfp/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> rounds;
  std::optional<long> trace_every;
  bool verbose_scratch = false;
  std::string out;
};

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return code;
}

drfp::RunConfig load(const std::string& path, const Overrides& o) {
  drfp::RunConfig c = drfp::load_config(path);
  if (o.seed) c.seeds = {*o.seed};
  if (o.rounds) c.rounds = *o.rounds;
  if (o.trace_every) c.trace.every = *o.trace_every;
  if (o.verbose_scratch) c.trace.verbose_scratch = true;
  c.validate();
  return c;
}

fs::path out_dir(const Overrides& o) {
  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw drfp::Error("io", "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::optional<drfp::OracleSolution> attach_oracle(const drfp::RunConfig& c) {
  if (!c.oracle.attach) return std::nullopt;
  return drfp::solve_centralized(c.problem, c.oracle.tol);
}

int cmd_run(const std::string& path, const Overrides& o) {
  const drfp::RunConfig c = load(path, o);
  const auto oracle = attach_oracle(c);
  const fs::path dir = out_dir(o);
  json runs = json::array();
  for (std::uint64_t seed : c.seeds) {
    const drfp::RunResult r = drfp::run(c, seed, oracle);
    const std::string tag = "seed" + std::to_string(seed);
    {
      std::ofstream trace(dir / ("trace_" + tag + ".csv"));
      drfp::write_trace_csv(trace, r.trace, c.problem.nodes());
    }
    if (c.trace.verbose_scratch) {
      std::ofstream scratch(dir / ("scratch_" + tag + ".csv"));
      drfp::write_scratch_csv(scratch, r.trace);
    }
    json summary = drfp::run_summary(c, r, oracle);
    write_json(dir / ("summary_" + tag + ".json"), summary);
    summary.erase("config");
    runs.push_back(std::move(summary));
  }
  std::cout << json{{"runs", std::move(runs)}}.dump(2) << '\n';
  return 0;
}

int cmd_compare(const std::string& path, const Overrides& o) {
  const drfp::RunConfig c = load(path, o);
  const json report = drfp::to_json(drfp::compare_dgd_drfp(c, c.seeds.front()));
  if (!o.out.empty()) write_json(out_dir(o) / "compare.json", report);
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_check_graph(const std::string& path, const Overrides& o) {
  drfp::RunConfig c = drfp::load_config(path);
  if (o.rounds) c.rounds = *o.rounds;
  const drfp::GraphSequence seq = c.graph.build(c.problem.nodes());
  const long horizon = c.graph.horizon > 0 ? c.graph.horizon : std::max<long>(c.rounds, seq.window());
  const bool ok = drfp::check_joint_connectivity(seq, seq.window(), horizon);
  const auto est = drfp::estimate_pi(seq, 0, c.trace.perron_tol, c.trace.perron_max_window);
  const json report{{"jointly_strongly_connected", ok},
                    {"window", seq.window()},
                    {"horizon", horizon},
                    {"gamma", seq.gamma()},
                    {"pi_0", std::vector<double>(est.pi.data(), est.pi.data() + est.pi.size())},
                    {"pi_residual", est.residual},
                    {"pi_lower_bound", drfp::perron_lower_bound(seq.gamma(), seq.size(), seq.window())}};
  if (!o.out.empty()) write_json(out_dir(o) / "check_graph.json", report);
  std::cout << report.dump(2) << '\n';
  return ok ? 0 : report_error("connectivity", "graph sequence fails the joint connectivity check", 3);
}

int cmd_oracle(const std::string& path, const Overrides& o) {
  const drfp::RunConfig c = drfp::load_config(path);
  const json solution = drfp::to_json(drfp::solve_centralized(c.problem, c.oracle.tol));
  if (!o.out.empty()) write_json(out_dir(o) / "oracle.json", solution);
  std::cout << solution.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed random-fixed projected optimization over time-varying digraphs"};
  app.require_subcommand(1);

  Overrides o;
  std::string config;
  std::uint64_t seed = 0;
  long rounds = 0;
  long every = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "Run config (JSON)")->required();
    sub->add_option("--seed", seed, "Run a single seed instead of the configured list");
    sub->add_option("--rounds", rounds, "Override the round budget");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--trace-every", every, "Trace every k rounds");
    sub->add_flag("--verbose-scratch", o.verbose_scratch, "Export per-node round intermediates");
  };
  auto* run = app.add_subcommand("run", "Run the configured experiment for each seed");
  auto* compare = app.add_subcommand("compare", "DGD versus D-RFP on a static unbalanced graph");
  auto* check = app.add_subcommand("check-graph", "Joint connectivity and Perron diagnostics");
  auto* oracle = app.add_subcommand("oracle", "Centralized reference solution");
  for (auto* sub : {run, compare, check, oracle}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--seed")) o.seed = seed;
  if (active->count("--rounds")) o.rounds = rounds;
  if (active->count("--trace-every")) o.trace_every = every;

  try {
    if (active == run) return cmd_run(config, o);
    if (active == compare) return cmd_compare(config, o);
    if (active == check) return cmd_check_graph(config, o);
    return cmd_oracle(config, o);
  } catch (const drfp::Error& e) {
    return report_error(e.kind(), e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
}
