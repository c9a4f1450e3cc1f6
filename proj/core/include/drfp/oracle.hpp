#pragma once

#include <optional>
#include <string_view>

#include "drfp/problem.hpp"

namespace drfp {

// Centralized ground-truth solvers for desk-scale instances. They exist to
// certify the distributed engine, not as a general convex solver.

enum class OracleMethod { GridRefine, Ellipsoid, ClosedForm };

std::string_view to_string(OracleMethod m);

struct OracleSolution {
  Vector x_star;
  double value = 0.0;
  double tol = 0.0;
  OracleMethod method = OracleMethod::Ellipsoid;
  double feasibility_residual = 0.0;
  // |value difference| between the independent methods that were run,
  // when more than one was applicable.
  std::optional<double> cross_check_gap;
};

struct GridOptions {
  int passes = 3;
  int refine_factor = 10;
  long point_budget = 400000;
};

// min F(x) over X and all g_j <= 0. Runs grid refinement (m <= 3) and a
// central-cut ellipsoid method, plus the closed form when every objective
// is quadratic with a feasible unconstrained minimizer. Methods must agree
// within 10 * tol; the best feasible answer is returned.
OracleSolution solve_centralized(const ProblemSpec& p, double tol);

// min sum_i pi_i f_i(x) over X, ignoring the g_j.
OracleSolution weighted_optimum(const ProblemSpec& p, const Vector& pi, double tol);

// Individual methods, exposed so tests can compare them.
OracleSolution grid_refine(const ProblemSpec& p, const Vector& weights, bool with_constraints,
                           const GridOptions& options = {});
OracleSolution ellipsoid(const ProblemSpec& p, const Vector& weights, bool with_constraints,
                         double tol);
std::optional<OracleSolution> closed_form(const ProblemSpec& p, const Vector& weights,
                                          bool with_constraints);

// min scale * c'theta over Theta and the node constraints, by the
// ellipsoid method started from the box [lower, upper] (which must
// contain an optimal point).
OracleSolution solve_generic(const GenericProblem& gp, const Vector& lower, const Vector& upper,
                             double tol);

// Ellipsoid solve of the epigraph lift with rigorous bounds on the t-block
// derived from X. theta* = (x*, t*), value = 1't* / n.
OracleSolution solve_lifted(const EpigraphProblem& e, double tol);

// Euclidean projection onto Theta_0 = Theta intersected with every node's
// sublevel sets, by Dykstra's cyclic projections. Supported constraint
// forms: affine (half-space), norm_shift (ball), convex quadratic and their
// embeddings; pointwise max is split into its branches.
Vector project_feasible(const GenericProblem& gp, const Vector& y, double tol);

}  // namespace drfp
