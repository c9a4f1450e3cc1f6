#include "drfp/engine.hpp"

#include <cmath>
#include <string>

#include "drfp/rng.hpp"

namespace drfp {

void StepSchedule::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("step schedule: need a > 0");
  if (!(b >= 1.0) || !std::isfinite(b)) throw InvalidArgument("step schedule: need b >= 1");
  if (!(p > 0.5 && p <= 1.0)) throw InvalidArgument("step schedule: need p in (0.5, 1]");
}

double StepSchedule::operator()(long k) const {
  if (k < 0) throw InvalidArgument("step schedule: k must be >= 0");
  const double base = static_cast<double>(k) + b;
  return p == 1.0 ? a / base : a / std::pow(base, p);
}

double step(const StepSchedule& schedule, long k) { return schedule(k); }

void RoundVariant::validate() const {
  if (projections_per_round < 1) throw InvalidArgument("projections_per_round must be >= 1");
}

std::vector<NodeState> initial_states(int n, Index dim, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw InvalidArgument("initial_states: need n >= 1 and dim >= 1");
  std::vector<NodeState> states(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& s = states[static_cast<std::size_t>(j)];
    s.index = j;
    s.round = 0;
    s.theta = Vector::Zero(dim);
    s.stream = derive_key({seed, static_cast<std::uint64_t>(j)});
  }
  return states;
}

int draw_constraint(const NodeState& state, int tau, int draw) {
  if (tau < 1) throw InvalidArgument("draw_constraint: tau must be >= 1");
  CounterStream rng(derive_key({state.stream, static_cast<std::uint64_t>(state.round),
                                static_cast<std::uint64_t>(draw)}));
  return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(tau)));
}

namespace {

void check_round_inputs(std::span<const NodeState> states, const WeightMatrix& a, double zeta,
                        Index dim) {
  if (states.empty()) throw InvalidArgument("round: no node states");
  if (static_cast<int>(states.size()) != a.size()) {
    throw DimensionError("round: weight matrix is " + std::to_string(a.size()) + "x" +
                         std::to_string(a.size()) + " but there are " +
                         std::to_string(states.size()) + " nodes");
  }
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw InvalidArgument("round: step size must be >= 0");
  const long round = states.front().round;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].index != static_cast<int>(j)) throw InvalidArgument("round: node states out of order");
    if (states[j].round != round) throw InvalidArgument("round: node states at different rounds");
    require_dim(states[j].theta, dim, "round: node state");
  }
}

// sum_i a_ji v_i(block), i ascending.
Vector mix(std::span<const NodeState> states, const WeightMatrix& a, int j, Index start, Index len) {
  Vector acc = Vector::Zero(len);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double w = a(j, static_cast<int>(i));
    if (w == 0.0) continue;
    for (Index c = 0; c < len; ++c) acc[c] += w * states[i].theta[start + c];
  }
  return acc;
}

int select_constraint(const NodeState& s, const std::vector<ConvexFunction>& g, const Vector& at,
                      const RoundVariant& variant, int draw) {
  if (!variant.farthest_set) return draw_constraint(s, static_cast<int>(g.size()), draw);
  int arg = 0;
  double best = g[0].value(at);
  for (std::size_t l = 1; l < g.size(); ++l) {
    const double v = g[l].value(at);
    if (v > best) {
      best = v;
      arg = static_cast<int>(l);
    }
  }
  return arg;
}

}  // namespace

std::vector<NodeState> drfp_round(std::span<const NodeState> states, const WeightMatrix& a,
                                  double zeta, double beta, const GenericProblem& problem,
                                  const RoundVariant& variant, std::vector<RoundScratch>* scratch) {
  require_relaxation(beta);
  variant.validate();
  const Index d = problem.dimension();
  check_round_inputs(states, a, zeta, d);
  if (problem.nodes() != static_cast<int>(states.size())) {
    throw DimensionError("drfp_round: problem and state node counts differ");
  }
  const Vector fallback = unit_vector(d, 0);
  if (scratch) scratch->assign(states.size(), {});

  std::vector<NodeState> next(states.begin(), states.end());
  for (int j = 0; j < static_cast<int>(states.size()); ++j) {
    const auto& node = problem.node(j);
    const Vector p = mix(states, a, j, 0, d) - zeta * problem.cost();

    Vector q = p;
    int omega = -1;
    for (int r = 0; r < variant.projections_per_round; ++r) {
      omega = select_constraint(states[static_cast<std::size_t>(j)], node.constraints, q, variant, r);
      q = polyak_step(node.constraints[static_cast<std::size_t>(omega)], q, beta, fallback);
    }

    Vector pre_projection;
    if (variant.objective_point == ObjectivePoint::AfterConstraintStep) {
      pre_projection = polyak_step(node.objective, q, beta, fallback);
    } else {
      const double violation = positive_part(node.objective.value(p));
      pre_projection = q;
      if (violation > 0.0) {
        const Vector v = node.objective.subgradient(p);
        const double vn = squared_norm(v);
        if (vn == 0.0) throw InfeasibleProblem("drfp_round: zero subgradient of a violated objective constraint");
        pre_projection = q - (beta * violation / vn) * v;
      }
    }

    auto& out = next[static_cast<std::size_t>(j)];
    out.theta = problem.theta_set().project(pre_projection);
    out.round = states[static_cast<std::size_t>(j)].round + 1;
    if (scratch) (*scratch)[static_cast<std::size_t>(j)] = RoundScratch{p, q, omega};
  }
  return next;
}

std::vector<NodeState> epigraph_round(std::span<const NodeState> states, const WeightMatrix& a,
                                      double zeta, double beta, const EpigraphProblem& problem,
                                      const RoundVariant& variant, std::vector<RoundScratch>* scratch) {
  require_relaxation(beta);
  variant.validate();
  const Index m = problem.decision_dimension();
  const int n = problem.nodes();
  check_round_inputs(states, a, zeta, m + n);
  if (n != static_cast<int>(states.size())) {
    throw DimensionError("epigraph_round: problem and state node counts differ");
  }
  const SimpleSet& x_set = problem.original().common_set();
  if (scratch) scratch->assign(states.size(), {});

  std::vector<NodeState> next(states.begin(), states.end());
  for (int j = 0; j < n; ++j) {
    const auto& node = problem.original().node(j);
    const Vector y = mix(states, a, j, 0, m);
    Vector p = mix(states, a, j, m, n);
    for (int i = 0; i < n; ++i) p[i] -= zeta;

    Vector z = y;
    int omega = -1;
    for (int r = 0; r < variant.projections_per_round; ++r) {
      omega = select_constraint(states[static_cast<std::size_t>(j)], node.constraints, z, variant, r);
      const auto& g = node.constraints[static_cast<std::size_t>(omega)];
      const double violation = positive_part(g.value(z));
      if (violation > 0.0) {
        const Vector u = g.subgradient(z);
        const double un = squared_norm(u);
        if (un == 0.0) throw InfeasibleProblem("epigraph_round: zero subgradient of a violated constraint");
        z = z - (beta * violation / un) * u;
      }
    }

    const Vector& eval_at = variant.objective_point == ObjectivePoint::AfterConstraintStep ? z : y;
    const double gap = positive_part(node.objective.value(eval_at) - p[j]);
    Vector x_next = z;
    Vector t_next = p;
    if (gap > 0.0) {
      const Vector v = node.objective.subgradient(eval_at);
      const double step_len = beta * gap / (1.0 + squared_norm(v));
      x_next = z - step_len * v;
      t_next[j] = p[j] + step_len;
    }

    auto& out = next[static_cast<std::size_t>(j)];
    out.theta = join(x_set.project(x_next), t_next);
    out.round = states[static_cast<std::size_t>(j)].round + 1;
    if (scratch) (*scratch)[static_cast<std::size_t>(j)] = RoundScratch{join(y, p), join(z, p), omega};
  }
  return next;
}

std::vector<NodeState> dgd_round(std::span<const NodeState> states, const WeightMatrix& a,
                                 double zeta, const ProblemSpec& problem) {
  const Index m = problem.dimension();
  check_round_inputs(states, a, zeta, m);
  if (problem.nodes() != static_cast<int>(states.size())) {
    throw DimensionError("dgd_round: problem and state node counts differ");
  }
  std::vector<NodeState> next(states.begin(), states.end());
  for (int j = 0; j < static_cast<int>(states.size()); ++j) {
    const auto& own = states[static_cast<std::size_t>(j)];
    const Vector grad = problem.node(j).objective.subgradient(own.theta);
    const Vector mixed = mix(states, a, j, 0, m) - zeta * grad;
    auto& out = next[static_cast<std::size_t>(j)];
    out.theta = problem.common_set().project(mixed);
    out.round = own.round + 1;
  }
  return next;
}

}  // namespace drfp
