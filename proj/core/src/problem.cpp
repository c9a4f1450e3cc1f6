#include "drfp/problem.hpp"

#include <string>

namespace drfp {
namespace {

void check_node_dims(const std::vector<NodeProblem>& nodes, Index dim, const char* who) {
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (nodes[j].objective.dimension() != dim) {
      throw DimensionError(std::string(who) + ": objective of node " + std::to_string(j) +
                           " has dimension " + std::to_string(nodes[j].objective.dimension()) +
                           ", expected " + std::to_string(dim));
    }
    for (const auto& g : nodes[j].constraints) {
      if (g.dimension() != dim) {
        throw DimensionError(std::string(who) + ": constraint of node " + std::to_string(j) +
                             " has wrong dimension");
      }
    }
  }
}

}  // namespace

ProblemSpec::ProblemSpec(SimpleSet common_set, std::vector<NodeProblem> nodes,
                         std::optional<Vector> witness, double witness_tol)
    : common_set_(std::move(common_set)), nodes_(std::move(nodes)), witness_(std::move(witness)) {
  if (nodes_.empty()) throw InvalidArgument("ProblemSpec: need at least one node");
  const Index m = common_set_.dimension();
  if (m < 1) throw InvalidArgument("ProblemSpec: decision dimension must be >= 1");
  for (auto& node : nodes_) {
    if (node.constraints.empty()) node.constraints.push_back(ConvexFunction::always_satisfied(m));
  }
  check_node_dims(nodes_, m, "ProblemSpec");
  if (witness_) {
    require_dim(*witness_, m, "ProblemSpec witness");
    if (!is_feasible(*witness_, witness_tol)) {
      throw InfeasibleProblem("ProblemSpec: feasibility witness violates X or a constraint");
    }
  }
}

double ProblemSpec::total_objective(const Vector& x) const {
  double s = 0.0;
  for (const auto& node : nodes_) s += node.objective.value(x);
  return s;
}

double ProblemSpec::max_violation(const Vector& x) const {
  double v = 0.0;
  for (const auto& node : nodes_) {
    for (const auto& g : node.constraints) v = std::max(v, positive_part(g.value(x)));
  }
  return v;
}

bool ProblemSpec::is_feasible(const Vector& x, double tol) const {
  return common_set_.contains(x, tol) && max_violation(x) <= tol;
}

bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
  if (!(a.common_set_ == b.common_set_) || !(a.nodes_ == b.nodes_)) return false;
  if (a.witness_.has_value() != b.witness_.has_value()) return false;
  return !a.witness_ || same_values(*a.witness_, *b.witness_);
}

GenericProblem::GenericProblem(Vector cost, SimpleSet theta_set, std::vector<NodeProblem> nodes,
                               double objective_scale)
    : cost_(std::move(cost)),
      theta_set_(std::move(theta_set)),
      nodes_(std::move(nodes)),
      objective_scale_(objective_scale) {
  if (nodes_.empty()) throw InvalidArgument("GenericProblem: need at least one node");
  if (cost_.size() < 1) throw InvalidArgument("GenericProblem: dimension must be >= 1");
  if (theta_set_.dimension() != cost_.size()) throw DimensionError("GenericProblem: Theta has wrong dimension");
  if (!(objective_scale_ > 0.0)) throw InvalidArgument("GenericProblem: objective scale must be positive");
  for (auto& node : nodes_) {
    if (node.constraints.empty()) {
      node.constraints.push_back(ConvexFunction::always_satisfied(cost_.size()));
    }
  }
  check_node_dims(nodes_, cost_.size(), "GenericProblem");
}

ConvexFunction extend_to_theta(const ConvexFunction& f, Index d) {
  return ConvexFunction::embedded(f, d, Vector::Zero(d));
}

EpigraphProblem::EpigraphProblem(ProblemSpec original)
    : original_(std::move(original)), theta_set_(SimpleSet::whole_space(1)) {
  const Index m = original_.dimension();
  const int n = original_.nodes();
  const Index d = m + n;
  cost_ = Vector::Zero(d);
  cost_.tail(n).setOnes();
  theta_set_ = SimpleSet::extended(original_.common_set(), d);

  lifted_.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto& node = original_.node(j);
    Vector minus_e = Vector::Zero(d);
    minus_e[m + j] = -1.0;
    NodeProblem lifted{ConvexFunction::embedded(node.objective, d, std::move(minus_e)), {}};
    for (const auto& g : node.constraints) lifted.constraints.push_back(extend_to_theta(g, d));
    lifted_.push_back(std::move(lifted));
  }
}

EpigraphProblem lift(const ProblemSpec& p) { return EpigraphProblem(p); }

GenericProblem to_generic(const EpigraphProblem& e) {
  return GenericProblem(e.cost(), e.theta_set(), e.lifted_nodes(), e.objective_scale());
}

SplitState split(const Vector& theta, Index m, Index n) {
  if (m < 1) throw InvalidArgument("split: decision dimension must be >= 1");
  if (n < 0) throw InvalidArgument("split: node count must be >= 0");
  require_dim(theta, m + n, "split");
  return {theta.head(m), theta.tail(n)};
}

Vector join(const Vector& x, const Vector& t) {
  Vector theta(x.size() + t.size());
  theta << x, t;
  return theta;
}

}  // namespace drfp
