#include "drfp/harness.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>

namespace drfp {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view to_string(StopReason r) {
  return r == StopReason::RoundBudget ? "round_budget" : "residual_threshold";
}

namespace {

Vector weighted_mean(const std::vector<NodeState>& states, const Vector& pi) {
  if (states.empty()) throw InvalidArgument("metrics: no node states");
  require_dim(pi, static_cast<Index>(states.size()), "metrics: pi");
  Vector bar = Vector::Zero(states.front().theta.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    require_dim(states[j].theta, bar.size(), "metrics: node state");
    bar += pi[static_cast<Index>(j)] * states[j].theta;
  }
  return bar;
}

void fill_consensus(TraceRecord& r, const std::vector<NodeState>& states, const Vector& bar) {
  r.node_consensus.clear();
  r.max_consensus = 0.0;
  for (const auto& s : states) {
    const double c = (s.theta - bar).cwiseAbs().maxCoeff();
    r.node_consensus.push_back(c);
    r.max_consensus = std::max(r.max_consensus, c);
  }
}

double constraint_violation(const NodeProblem& node, const Vector& x) {
  double worst = 0.0;
  for (const auto& g : node.constraints) worst = std::max(worst, positive_part(g.value(x)));
  return worst;
}

// pi^k for a sequence; periodic and static sequences repeat with the period.
class PerronCache {
 public:
  PerronCache(const GraphSequence& seq, const TraceSpec& spec) : seq_(seq), spec_(spec) {}

  const Vector& at(long k) {
    const bool cyclic = seq_.mode() != SequenceMode::SeededRandom;
    const long key = cyclic ? k % static_cast<long>(seq_.period()) : k;
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      if (!cyclic) cache_.clear();
      it = cache_.emplace(key, estimate_pi(seq_, k, spec_.perron_tol, spec_.perron_max_window).pi).first;
    }
    return it->second;
  }

 private:
  const GraphSequence& seq_;
  const TraceSpec& spec_;
  std::map<long, Vector> cache_;
};

double max_distance(const std::vector<Vector>& xs, const Vector& target) {
  double worst = 0.0;
  for (const auto& x : xs) worst = std::max(worst, (x - target).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TraceRecord metrics(const std::vector<NodeState>& states, const Vector& pi, const EpigraphProblem& e,
                    const std::optional<OracleSolution>& oracle) {
  const Vector bar = weighted_mean(states, pi);
  require_dim(bar, e.dimension(), "metrics: state");
  TraceRecord r;
  r.k = states.front().round;
  fill_consensus(r, states, bar);
  const auto [x, t] = split(bar, e.decision_dimension(), e.nodes());
  const auto& p = e.original();
  for (int j = 0; j < p.nodes(); ++j) {
    const auto& node = p.node(j);
    r.max_feasibility = std::max(r.max_feasibility, positive_part(node.objective.value(x) - t[j]));
    r.max_feasibility = std::max(r.max_feasibility, constraint_violation(node, x));
  }
  if (oracle) r.gap = std::abs(e.objective(bar) - oracle->value / e.nodes());
  return r;
}

TraceRecord metrics(const std::vector<NodeState>& states, const Vector& pi, const ProblemSpec& p,
                    const std::optional<OracleSolution>& oracle) {
  const Vector bar = weighted_mean(states, pi);
  require_dim(bar, p.dimension(), "metrics: state");
  TraceRecord r;
  r.k = states.front().round;
  fill_consensus(r, states, bar);
  for (int j = 0; j < p.nodes(); ++j) r.max_feasibility = std::max(r.max_feasibility, constraint_violation(p.node(j), bar));
  if (oracle) r.gap = std::abs(p.total_objective(bar) - oracle->value) / p.nodes();
  return r;
}

RunResult run(const RunConfig& config, std::uint64_t seed, const std::optional<OracleSolution>& oracle) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const int n = config.problem.nodes();
  const GraphSequence seq = config.graph.build(n);
  if (config.graph.enforce_connectivity) {
    const long horizon = config.graph.horizon > 0 ? config.graph.horizon
                                                  : std::max<long>(config.rounds, seq.window());
    if (!check_joint_connectivity(seq, seq.window(), horizon)) {
      throw ConnectivityError("graph sequence is not jointly strongly connected over every window of " +
                              std::to_string(seq.window()) + " rounds up to " + std::to_string(horizon));
    }
  }

  const auto& engine = config.engine;
  const bool dgd = engine.algorithm == Algorithm::Dgd;
  const EpigraphProblem lifted(config.problem);
  const std::optional<GenericProblem> generic =
      !dgd && engine.path == EnginePath::Generic ? std::optional(to_generic(lifted)) : std::nullopt;
  const Index dim = dgd ? config.problem.dimension() : lifted.dimension();

  RunResult result;
  result.seed = seed;
  std::vector<NodeState> states = initial_states(n, dim, seed);
  PerronCache perron(seq, config.trace);
  std::vector<RoundScratch> scratch;
  const bool want_scratch = config.trace.verbose_scratch && !dgd;

  auto record = [&](long k, bool with_scratch) {
    TraceRecord r = dgd ? metrics(states, perron.at(k), config.problem, oracle)
                        : metrics(states, perron.at(k), lifted, oracle);
    r.zeta = engine.schedule(k);
    if (with_scratch) r.scratch = scratch;
    result.trace.push_back(std::move(r));
    const auto& last = result.trace.back();
    if (!config.stopping.residual_threshold) return false;
    const double thr = *config.stopping.residual_threshold;
    return last.max_consensus <= thr && last.max_feasibility <= thr && (!last.gap || *last.gap <= thr);
  };

  bool stop = record(0, false);
  long k = 0;
  while (!stop && k < config.rounds) {
    const WeightMatrix a = seq.matrix(k);
    const double zeta = engine.schedule(k);
    auto* sink = want_scratch ? &scratch : nullptr;
    if (dgd) {
      states = dgd_round(states, a, zeta, config.problem);
    } else if (generic) {
      states = drfp_round(states, a, zeta, engine.beta, *generic, engine.variant, sink);
    } else {
      states = epigraph_round(states, a, zeta, engine.beta, lifted, engine.variant, sink);
    }
    ++k;
    if (k % config.trace.every == 0 || k == config.rounds) stop = record(k, want_scratch);
  }
  result.rounds_executed = k;
  result.stop_reason = stop ? StopReason::ResidualThreshold : StopReason::RoundBudget;
  result.final_states = std::move(states);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<Vector> decisions(const RunConfig& config, const RunResult& result) {
  const Index m = config.problem.dimension();
  std::vector<Vector> xs;
  for (const auto& s : result.final_states) xs.push_back(s.theta.head(m));
  return xs;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace, int nodes) {
  out << "k,zeta,max_consensus,max_feasibility,gap";
  for (int j = 1; j <= nodes; ++j) out << ",per_node_consensus_" << j;
  out << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_number(r.zeta) << ',' << format_number(r.max_consensus) << ','
        << format_number(r.max_feasibility) << ',';
    if (r.gap) out << format_number(*r.gap);
    for (double c : r.node_consensus) out << ',' << format_number(c);
    out << '\n';
  }
}

void write_scratch_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  Index d = 0;
  for (const auto& r : trace) {
    if (r.scratch && !r.scratch->empty()) {
      d = r.scratch->front().p.size();
      break;
    }
  }
  out << "k,node,omega";
  for (Index i = 1; i <= d; ++i) out << ",p_" << i;
  for (Index i = 1; i <= d; ++i) out << ",q_" << i;
  out << '\n';
  for (const auto& r : trace) {
    if (!r.scratch) continue;
    for (std::size_t j = 0; j < r.scratch->size(); ++j) {
      const auto& s = (*r.scratch)[j];
      out << r.k << ',' << j << ',' << s.omega;
      for (Index i = 0; i < s.p.size(); ++i) out << ',' << format_number(s.p[i]);
      for (Index i = 0; i < s.q.size(); ++i) out << ',' << format_number(s.q[i]);
      out << '\n';
    }
  }
}

json to_json(const OracleSolution& s) {
  json out{{"x_star", std::vector<double>(s.x_star.data(), s.x_star.data() + s.x_star.size())},
           {"value", s.value},
           {"tol", s.tol},
           {"method", std::string(to_string(s.method))},
           {"feasibility_residual", s.feasibility_residual}};
  out["cross_check_gap"] = s.cross_check_gap ? json(*s.cross_check_gap) : json(nullptr);
  return out;
}

OracleSolution oracle_from_json(const json& j) {
  try {
    OracleSolution s;
    const auto x = j.at("x_star").get<std::vector<double>>();
    s.x_star = Eigen::Map<const Vector>(x.data(), static_cast<Index>(x.size()));
    s.value = j.at("value").get<double>();
    s.tol = j.at("tol").get<double>();
    const auto method = j.at("method").get<std::string>();
    if (method == "grid-refine") {
      s.method = OracleMethod::GridRefine;
    } else if (method == "ellipsoid") {
      s.method = OracleMethod::Ellipsoid;
    } else if (method == "closed-form") {
      s.method = OracleMethod::ClosedForm;
    } else {
      throw ConfigError("oracle solution: unknown method '" + method + "'");
    }
    s.feasibility_residual = j.value("feasibility_residual", 0.0);
    if (j.contains("cross_check_gap") && !j["cross_check_gap"].is_null()) {
      s.cross_check_gap = j["cross_check_gap"].get<double>();
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("oracle solution: ") + e.what());
  }
}

json run_summary(const RunConfig& config, const RunResult& result, const std::optional<OracleSolution>& oracle) {
  json out;
  out["config"] = config_to_json(config);
  out["seed"] = result.seed;
  out["rounds_executed"] = result.rounds_executed;
  out["stop_reason"] = std::string(to_string(result.stop_reason));
  out["wall_seconds"] = result.wall_seconds;
  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    out["final"] = {{"k", last.k},
                    {"max_consensus", last.max_consensus},
                    {"max_feasibility", last.max_feasibility},
                    {"gap", last.gap ? json(*last.gap) : json(nullptr)}};
  }
  json xs = json::array();
  for (const auto& x : decisions(config, result)) xs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  out["final_x"] = std::move(xs);
  if (oracle) {
    out["oracle"] = to_json(*oracle);
    out["final"]["max_distance_to_x_star"] = max_distance(decisions(config, result), oracle->x_star);
  }
  return out;
}

CompareReport compare_dgd_drfp(const RunConfig& config, std::uint64_t seed) {
  if (config.graph.mode != GraphSpec::Mode::Static) throw ConfigError("compare needs a static graph");
  config.validate();
  const GraphSequence seq = config.graph.build(config.problem.nodes());
  const PerronEstimate est = estimate_pi(seq, 0, config.trace.perron_tol, config.trace.perron_max_window);

  CompareReport r;
  r.pi = est.pi;
  r.pi_residual = est.residual;
  const double tol = config.oracle.tol;
  r.centralized = solve_centralized(config.problem, tol);

  // Both methods for the weighted target, compared directly so that a gross
  // disagreement is reported rather than thrown.
  const OracleSolution by_ellipsoid = ellipsoid(config.problem, r.pi, false, tol);
  r.weighted = by_ellipsoid;
  if (config.problem.dimension() <= 3) {
    const OracleSolution by_grid = grid_refine(config.problem, r.pi, false);
    r.weighted_method_gap = (by_grid.x_star - by_ellipsoid.x_star).cwiseAbs().maxCoeff();
    if (by_grid.value < r.weighted.value) r.weighted = by_grid;
  }
  r.instance_error = r.weighted_method_gap > 0.1;
  r.separation = (r.weighted.x_star - r.centralized.x_star).cwiseAbs().maxCoeff();

  RunConfig dgd = config;
  dgd.engine.algorithm = Algorithm::Dgd;
  dgd.stopping.residual_threshold.reset();
  const RunResult dgd_run = run(dgd, seed);
  const auto dgd_x = decisions(dgd, dgd_run);
  r.dgd_limit = Vector::Zero(config.problem.dimension());
  for (std::size_t j = 0; j < dgd_x.size(); ++j) r.dgd_limit += r.pi[static_cast<Index>(j)] * dgd_x[j];
  r.dgd_error = max_distance(dgd_x, r.weighted.x_star);
  r.dgd_true_error = max_distance(dgd_x, r.centralized.x_star);

  RunConfig drfp = config;
  drfp.engine.algorithm = Algorithm::Drfp;
  drfp.stopping.residual_threshold.reset();
  const RunResult drfp_run = run(drfp, seed);
  const auto drfp_x = decisions(drfp, drfp_run);
  r.drfp_limit = Vector::Zero(config.problem.dimension());
  for (std::size_t j = 0; j < drfp_x.size(); ++j) r.drfp_limit += r.pi[static_cast<Index>(j)] * drfp_x[j];
  r.drfp_error = max_distance(drfp_x, r.centralized.x_star);
  return r;
}

json to_json(const CompareReport& r) {
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return json{{"pi", vec(r.pi)},
              {"pi_residual", r.pi_residual},
              {"weighted_optimum", to_json(r.weighted)},
              {"centralized_optimum", to_json(r.centralized)},
              {"weighted_method_gap", r.weighted_method_gap},
              {"instance_error", r.instance_error},
              {"separation", r.separation},
              {"dgd_limit", vec(r.dgd_limit)},
              {"dgd_error", r.dgd_error},
              {"dgd_true_error", r.dgd_true_error},
              {"drfp_limit", vec(r.drfp_limit)},
              {"drfp_error", r.drfp_error}};
}

}  // namespace drfp
