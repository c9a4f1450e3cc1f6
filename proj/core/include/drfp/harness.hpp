#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drfp/config.hpp"
#include "drfp/oracle.hpp"

namespace drfp {

struct TraceRecord {
  long k = 0;
  double zeta = 0.0;  // step used by the round leaving k
  std::vector<double> node_consensus;
  double max_consensus = 0.0;
  double max_feasibility = 0.0;
  std::optional<double> gap;
  // Intermediates of the round that produced this state (verbose tracing).
  std::optional<std::vector<RoundScratch>> scratch;
};

// theta_bar = sum_j pi_j theta_j. Consensus is ||theta_j - theta_bar||_inf;
// feasibility is max_j max((f_j(x_bar) - t_bar_j)_+, ||g_j(x_bar)_+||_inf);
// gap is |c'theta_bar - F*| / n against an attached oracle solution.
TraceRecord metrics(const std::vector<NodeState>& states, const Vector& pi, const EpigraphProblem& e,
                    const std::optional<OracleSolution>& oracle);
// The same residuals for states living in x-space (DGD). Feasibility drops
// the epigraph term and the gap uses F(x_bar).
TraceRecord metrics(const std::vector<NodeState>& states, const Vector& pi, const ProblemSpec& p,
                    const std::optional<OracleSolution>& oracle);

enum class StopReason { RoundBudget, ResidualThreshold };
std::string_view to_string(StopReason r);

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<TraceRecord> trace;
  std::vector<NodeState> final_states;
  long rounds_executed = 0;
  StopReason stop_reason = StopReason::RoundBudget;
  double wall_seconds = 0.0;
};

// Validates the config, checks joint connectivity when enforcement is on
// (ConnectivityError otherwise), and runs until the round budget or the
// residual threshold is reached. Records are taken at k = 0, every
// trace.every rounds, and at the last round.
RunResult run(const RunConfig& config, std::uint64_t seed,
              const std::optional<OracleSolution>& oracle = std::nullopt);

// Decision vectors x_j of the final states.
std::vector<Vector> decisions(const RunConfig& config, const RunResult& result);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace, int nodes);
// One row per node and traced round: k, node, omega, p_1..p_d, q_1..q_d.
void write_scratch_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
nlohmann::json run_summary(const RunConfig& config, const RunResult& result,
                           const std::optional<OracleSolution>& oracle);

struct CompareReport {
  Vector pi;
  double pi_residual = 0.0;
  OracleSolution weighted;    // min sum pi_i f_i over X
  OracleSolution centralized; // the true problem
  // Weighted optimum computed by the two independent methods; a gap above
  // 0.1 means the instance was built wrong.
  double weighted_method_gap = 0.0;
  bool instance_error = false;
  Vector dgd_limit;           // pi-weighted average of the final DGD iterates
  double dgd_error = 0.0;     // max_j ||x_j - weighted.x_star||_inf
  double dgd_true_error = 0.0;  // max_j ||x_j - centralized.x_star||_inf
  Vector drfp_limit;
  double drfp_error = 0.0;    // max_j ||x_j - centralized.x_star||_inf
  double separation = 0.0;    // ||weighted.x_star - centralized.x_star||_inf
};

// Runs DGD and D-RFP (epigraph path) on the same static graph and problem.
CompareReport compare_dgd_drfp(const RunConfig& config, std::uint64_t seed);
nlohmann::json to_json(const CompareReport& r);

nlohmann::json to_json(const OracleSolution& s);
OracleSolution oracle_from_json(const nlohmann::json& j);

// "%.17g", the representation used in every emitted file.
std::string format_number(double v);

}  // namespace drfp
