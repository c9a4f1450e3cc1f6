#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drfp/engine.hpp"
#include "drfp/graph.hpp"
#include "drfp/problem.hpp"

namespace drfp {

// Run configuration. The on-disk form is JSON; see README.md for the
// schema. Node indices are 0-based everywhere.

struct GraphSpec {
  enum class Mode { Static, Periodic, Random };

  Mode mode = Mode::Static;
  int window = 1;          // B
  double gamma = 0.0;      // 0 means "derive from the matrices"
  // Static and periodic sequences give either edge lists or explicit
  // weight matrices (exactly one of the two is non-empty).
  std::vector<std::vector<Digraph::Edge>> edge_lists;
  std::vector<Matrix> matrices;
  int nodes = 0;
  // Random mode
  double edge_probability = 0.0;
  std::uint64_t seed = 0;
  // Refuse to run when the sequence fails the joint-connectivity check.
  bool enforce_connectivity = true;
  long horizon = 0;  // connectivity check horizon; 0 means rounds (at least window)

  GraphSequence build(int problem_nodes) const;
  friend bool operator==(const GraphSpec& a, const GraphSpec& b);
};

enum class Algorithm { Drfp, Dgd };
enum class EnginePath { Epigraph, Generic };

struct EngineSpec {
  Algorithm algorithm = Algorithm::Drfp;
  EnginePath path = EnginePath::Epigraph;
  double beta = 1.0;
  StepSchedule schedule{};
  RoundVariant variant{};

  friend bool operator==(const EngineSpec&, const EngineSpec&) = default;
};

struct TraceSpec {
  long every = 1;
  bool verbose_scratch = false;
  double perron_tol = 1e-12;
  long perron_max_window = 100000;

  friend bool operator==(const TraceSpec&, const TraceSpec&) = default;
};

struct StoppingSpec {
  // Stop early once consensus and feasibility residuals (and the gap, when
  // an oracle is attached) are all at or below this value at a traced round.
  std::optional<double> residual_threshold;

  friend bool operator==(const StoppingSpec&, const StoppingSpec&) = default;
};

struct OracleSpec {
  bool attach = true;
  double tol = 1e-4;

  friend bool operator==(const OracleSpec&, const OracleSpec&) = default;
};

struct RunConfig {
  explicit RunConfig(ProblemSpec p) : problem(std::move(p)) {}

  std::string name;
  std::string problem_source;  // file the problem was loaded from, if any
  ProblemSpec problem;
  GraphSpec graph;
  EngineSpec engine;
  long rounds = 0;
  std::vector<std::uint64_t> seeds{0};
  TraceSpec trace;
  StoppingSpec stopping;
  OracleSpec oracle;

  // Checks every module precondition that can be checked before a run.
  void validate() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

// Function, set and problem codecs.
nlohmann::json function_to_json(const ConvexFunction& f);
ConvexFunction function_from_json(const nlohmann::json& j);
nlohmann::json set_to_json(const SimpleSet& s);
SimpleSet set_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const RunConfig& c);
// `base_dir` resolves a problem given by file name.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace drfp
