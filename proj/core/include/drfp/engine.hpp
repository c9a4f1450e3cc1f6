#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "drfp/graph.hpp"
#include "drfp/problem.hpp"

namespace drfp {

// zeta^k = a / (k + b)^p with a > 0, b >= 1, p in (0.5, 1].
struct StepSchedule {
  double a = 1.0;
  double b = 1.0;
  double p = 1.0;

  void validate() const;
  double operator()(long k) const;

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

double step(const StepSchedule& schedule, long k);

struct NodeState {
  int index = 0;
  long round = 0;
  Vector theta;
  std::uint64_t stream = 0;  // key of this node's random stream
};

// theta_j^0 = 0 for every node; streams keyed by (seed, j).
std::vector<NodeState> initial_states(int n, Index dim, std::uint64_t seed);

// Index in [0, tau) for draw number `draw` of node `state` in its current round.
int draw_constraint(const NodeState& state, int tau, int draw = 0);

struct RoundScratch {
  Vector p;            // after mixing and the cost step
  Vector q;            // after the constraint step(s)
  int omega = -1;      // last selected constraint (0-based)
};

enum class ObjectivePoint {
  // Evaluate the objective constraint at the post-constraint point (z / q).
  AfterConstraintStep,
  // Evaluate it at the mixed point p, as in the generic update written
  // with f_j(p_j^k).
  AtMixedPoint,
};

struct RoundVariant {
  ObjectivePoint objective_point = ObjectivePoint::AfterConstraintStep;
  int projections_per_round = 1;  // random constraint steps per round
  bool farthest_set = false;      // pick the most violated constraint instead of a random one

  void validate() const;
  friend bool operator==(const RoundVariant&, const RoundVariant&) = default;
};

// One synchronous D-RFP round on the generic form:
//   p_j = sum_i a_ji theta_i - zeta c
//   q_j = Polyak step of p_j on a random g_j^omega
//   theta_j+ = Proj_Theta(Polyak step of q_j on f_j)
// Every node reads the frozen input states; the returned states are at round+1.
std::vector<NodeState> drfp_round(std::span<const NodeState> states, const WeightMatrix& a,
                                  double zeta, double beta, const GenericProblem& problem,
                                  const RoundVariant& variant = {},
                                  std::vector<RoundScratch>* scratch = nullptr);

// The same round written on (x, t) blocks of the epigraph lift:
//   y_j = sum a_ji x_i,  p_j = sum a_ji t_i - zeta 1
//   z_j = y_j - beta g(y_j)_+ / ||u||^2 u
//   r   = (f_j(z_j) - p_jj)_+
//   x_j+ = Proj_X(z_j - beta r / (1 + ||v||^2) v),  t_j+ = p_j + beta r / (1 + ||v||^2) e_j
std::vector<NodeState> epigraph_round(std::span<const NodeState> states, const WeightMatrix& a,
                                      double zeta, double beta, const EpigraphProblem& problem,
                                      const RoundVariant& variant = {},
                                      std::vector<RoundScratch>* scratch = nullptr);

// Plain distributed gradient descent:
//   x_j+ = Proj_X(sum a_ji x_i - zeta df_j(x_j)).
std::vector<NodeState> dgd_round(std::span<const NodeState> states, const WeightMatrix& a,
                                 double zeta, const ProblemSpec& problem);

}  // namespace drfp
