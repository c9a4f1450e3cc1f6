#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "drfp/convex.hpp"
#include "drfp/sets.hpp"

namespace drfp {

struct NodeProblem {
  ConvexFunction objective;
  std::vector<ConvexFunction> constraints;  // g_j^1 .. g_j^tau, each <= 0

  friend bool operator==(const NodeProblem&, const NodeProblem&) = default;
};

// min_{x in X} sum_j f_j(x)  s.t.  g_j(x) <= 0 for every node j.
//
// A node declared without constraints gets the single constraint 0 <= 0,
// so every node has tau_j >= 1. The feasibility witness is optional here
// (oracles must be able to report infeasible instances); run configs
// require one.
class ProblemSpec {
 public:
  ProblemSpec(SimpleSet common_set, std::vector<NodeProblem> nodes,
              std::optional<Vector> witness = std::nullopt, double witness_tol = 1e-9);

  int nodes() const { return static_cast<int>(nodes_.size()); }
  Index dimension() const { return common_set_.dimension(); }
  const SimpleSet& common_set() const { return common_set_; }
  const NodeProblem& node(int j) const { return nodes_.at(static_cast<std::size_t>(j)); }
  const std::vector<NodeProblem>& node_problems() const { return nodes_; }
  const std::optional<Vector>& witness() const { return witness_; }

  // F(x) = sum_j f_j(x)
  double total_objective(const Vector& x) const;
  // max_j ||g_j(x)_+||_inf
  double max_violation(const Vector& x) const;
  bool is_feasible(const Vector& x, double tol) const;

  friend bool operator==(const ProblemSpec& a, const ProblemSpec& b);

 private:
  SimpleSet common_set_;
  std::vector<NodeProblem> nodes_;
  std::optional<Vector> witness_;
};

// Linear-objective form over theta in R^d:
//   min_{theta in Theta} c'theta  s.t.  f_j(theta) <= 0, g_j(theta) <= 0.
// `objective_scale` multiplies c'theta to give the reported objective
// (1/n for an epigraph lift).
class GenericProblem {
 public:
  GenericProblem(Vector cost, SimpleSet theta_set, std::vector<NodeProblem> nodes,
                 double objective_scale = 1.0);

  int nodes() const { return static_cast<int>(nodes_.size()); }
  Index dimension() const { return cost_.size(); }
  const Vector& cost() const { return cost_; }
  const SimpleSet& theta_set() const { return theta_set_; }
  const NodeProblem& node(int j) const { return nodes_.at(static_cast<std::size_t>(j)); }
  double objective_scale() const { return objective_scale_; }
  double objective(const Vector& theta) const { return objective_scale_ * cost_.dot(theta); }

 private:
  Vector cost_;
  SimpleSet theta_set_;
  std::vector<NodeProblem> nodes_;
  double objective_scale_;
};

// Epigraph lift with theta = (x, t), d = m + n, c = [0_m; 1_n],
// Theta = X x R^n, and node constraints
//   f~_j(theta) = f_j(x) - t_j <= 0,   g_j(x) <= 0.
// Reported objective is c'theta / n.
class EpigraphProblem {
 public:
  explicit EpigraphProblem(ProblemSpec original);

  const ProblemSpec& original() const { return original_; }
  Index decision_dimension() const { return original_.dimension(); }
  int nodes() const { return original_.nodes(); }
  Index dimension() const { return decision_dimension() + nodes(); }
  const Vector& cost() const { return cost_; }
  const SimpleSet& theta_set() const { return theta_set_; }
  double objective_scale() const { return 1.0 / nodes(); }

  const ConvexFunction& lifted_objective(int j) const {
    return lifted_.at(static_cast<std::size_t>(j)).objective;
  }
  const std::vector<ConvexFunction>& lifted_constraints(int j) const {
    return lifted_.at(static_cast<std::size_t>(j)).constraints;
  }
  const std::vector<NodeProblem>& lifted_nodes() const { return lifted_; }

  double objective(const Vector& theta) const { return objective_scale() * cost_.dot(theta); }

 private:
  ProblemSpec original_;
  Vector cost_;
  SimpleSet theta_set_;
  std::vector<NodeProblem> lifted_;
};

EpigraphProblem lift(const ProblemSpec& p);
GenericProblem to_generic(const EpigraphProblem& e);

// Extends a function of x to theta = (x, t) by ignoring the t-block.
ConvexFunction extend_to_theta(const ConvexFunction& f, Index d);

struct SplitState {
  Vector x;
  Vector t;
};

SplitState split(const Vector& theta, Index m, Index n);
Vector join(const Vector& x, const Vector& t);

}  // namespace drfp
