#include "drfp/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace drfp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A minimization target min value(x) s.t. x in domain, constraints <= 0.
struct Target {
  Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::vector<ConvexFunction> constraints;
  const SimpleSet* domain = nullptr;

  double max_violation(const Vector& x) const {
    double v = 0.0;
    for (const auto& g : constraints) v = std::max(v, positive_part(g.value(x)));
    return v;
  }
  bool feasible(const Vector& x) const { return domain->contains(x, 0.0) && max_violation(x) == 0.0; }
};

Target weighted_target(const ProblemSpec& p, const Vector& weights, bool with_constraints) {
  require_dim(weights, p.nodes(), "oracle weights");
  Target t;
  t.dim = p.dimension();
  t.domain = &p.common_set();
  t.value = [&p, weights](const Vector& x) {
    double s = 0.0;
    for (int j = 0; j < p.nodes(); ++j) s += weights[j] * p.node(j).objective.value(x);
    return s;
  };
  t.subgradient = [&p, weights](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (int j = 0; j < p.nodes(); ++j) g += weights[j] * p.node(j).objective.subgradient(x);
    return g;
  };
  if (with_constraints) {
    for (const auto& node : p.node_problems()) {
      t.constraints.insert(t.constraints.end(), node.constraints.begin(), node.constraints.end());
    }
  }
  return t;
}

OracleSolution finish(const Target& t, Vector x, OracleMethod method, double tol) {
  OracleSolution s;
  s.value = t.value(x);
  s.feasibility_residual = std::max(t.max_violation(x), (x - t.domain->project(x)).cwiseAbs().maxCoeff());
  s.x_star = std::move(x);
  s.method = method;
  s.tol = tol;
  return s;
}

// Scans a regular grid over [lo, hi] with `points` nodes per axis; returns
// the best feasible point and its value (value = +inf when none).
std::pair<Vector, double> scan_grid(const Target& t, const Vector& lo, const Vector& hi,
                                    const std::vector<long>& points) {
  const Index m = t.dim;
  std::vector<long> idx(static_cast<std::size_t>(m), 0);
  Vector x(m);
  Vector best_x;
  double best = kInf;
  for (;;) {
    for (Index i = 0; i < m; ++i) {
      const long np = points[static_cast<std::size_t>(i)];
      const double frac = np > 1 ? static_cast<double>(idx[static_cast<std::size_t>(i)]) / (np - 1) : 0.5;
      x[i] = lo[i] + frac * (hi[i] - lo[i]);
    }
    if (t.feasible(x)) {
      const double v = t.value(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    Index axis = 0;
    while (axis < m) {
      auto& k = idx[static_cast<std::size_t>(axis)];
      if (++k < points[static_cast<std::size_t>(axis)]) break;
      k = 0;
      ++axis;
    }
    if (axis == m) break;
  }
  return {best_x, best};
}

OracleSolution run_grid(const Target& t, const GridOptions& options, double tol) {
  const Index m = t.dim;
  if (m > 3) throw InvalidArgument("grid oracle supports decision dimension <= 3");
  auto [lo, hi] = t.domain->bounding_box();
  if (!lo.allFinite() || !hi.allFinite()) throw InvalidArgument("grid oracle needs a bounded common set");

  const long per_axis = std::max<long>(
      3, static_cast<long>(std::floor(std::pow(static_cast<double>(options.point_budget), 1.0 / m))));
  std::vector<long> points(static_cast<std::size_t>(m), per_axis);
  auto [best_x, best] = scan_grid(t, lo, hi, points);
  if (!std::isfinite(best)) throw InfeasibleProblem("grid oracle: no feasible grid point");

  Vector spacing = (hi - lo) / static_cast<double>(per_axis - 1);
  const long fine_points = 4 * options.refine_factor + 1;
  std::fill(points.begin(), points.end(), fine_points);
  for (int pass = 0; pass < options.passes; ++pass) {
    // Re-center until the window stops improving; near a constraint boundary
    // the optimum can sit several coarse cells away from the first best point.
    for (int walk = 0; walk < 200; ++walk) {
      const Vector wlo = (best_x - 2.0 * spacing).cwiseMax(lo);
      const Vector whi = (best_x + 2.0 * spacing).cwiseMin(hi);
      auto [x, v] = scan_grid(t, wlo, whi, points);
      if (!(v < best)) break;
      best = v;
      best_x = x;
    }
    spacing /= static_cast<double>(options.refine_factor);
  }
  return finish(t, best_x, OracleMethod::GridRefine, tol);
}

// Cut direction at x: separating normal if x leaves the domain, subgradient
// of the worst violated constraint otherwise; empty when x is feasible.
std::optional<Vector> feasibility_cut(const Target& t, const Vector& x) {
  if (!t.domain->contains(x, 0.0)) return Vector(x - t.domain->project(x));
  double worst = 0.0;
  const ConvexFunction* arg = nullptr;
  for (const auto& g : t.constraints) {
    const double v = g.value(x);
    if (v > worst) {
      worst = v;
      arg = &g;
    }
  }
  if (arg) return arg->subgradient(x);
  return std::nullopt;
}

OracleSolution run_ellipsoid(const Target& t, const Vector& lo, const Vector& hi, double tol) {
  const Index d = t.dim;
  if (!lo.allFinite() || !hi.allFinite()) throw InvalidArgument("ellipsoid oracle needs a bounded start box");
  const double scale = 1.0 + (hi - lo).cwiseAbs().maxCoeff();
  const double x_tol = 1e-10 * scale;
  constexpr int kMaxIterations = 200000;

  Vector best_x;
  double best = kInf;

  if (d == 1) {
    double a = lo[0];
    double b = hi[0];
    Vector x(1);
    for (int it = 0; it < kMaxIterations && b - a > x_tol; ++it) {
      x[0] = 0.5 * (a + b);
      auto cut = feasibility_cut(t, x);
      if (!cut) {
        const double v = t.value(x);
        if (v < best) {
          best = v;
          best_x = x;
        }
        cut = t.subgradient(x);
      }
      const double g = (*cut)[0];
      if (g > 0.0) {
        b = x[0];
      } else if (g < 0.0) {
        a = x[0];
      } else {
        break;
      }
    }
  } else {
    Vector c = 0.5 * (lo + hi);
    Matrix P = Matrix::Identity(d, d) * (0.25 * (hi - lo).squaredNorm() * 1.01 + 1e-12);
    const double dd = static_cast<double>(d);
    for (int it = 0; it < kMaxIterations; ++it) {
      auto cut = feasibility_cut(t, c);
      if (!cut) {
        const double v = t.value(c);
        if (v < best) {
          best = v;
          best_x = c;
        }
        cut = t.subgradient(c);
        if (squared_norm(*cut) == 0.0) break;
      }
      const Vector Pa = P * *cut;
      const double aPa = cut->dot(Pa);
      if (!(aPa > 0.0)) break;
      const Vector shift = Pa / std::sqrt(aPa);
      c -= shift / (dd + 1.0);
      P = (dd * dd / (dd * dd - 1.0)) * (P - (2.0 / (dd + 1.0)) * shift * shift.transpose());
      P = 0.5 * (P + P.transpose()).eval();
      if (P.trace() < x_tol * x_tol) break;
    }
  }
  if (!std::isfinite(best)) throw InfeasibleProblem("ellipsoid oracle: no feasible point found");
  return finish(t, best_x, OracleMethod::Ellipsoid, tol);
}

std::optional<OracleSolution> run_closed_form(const ProblemSpec& p, const Target& t,
                                             const Vector& weights) {
  const Index m = p.dimension();
  Matrix H = Matrix::Zero(m, m);
  Vector g = Vector::Zero(m);
  for (int j = 0; j < p.nodes(); ++j) {
    const auto& form = p.node(j).objective.form();
    if (const auto* q = std::get_if<ConvexFunction::Quadratic>(&form)) {
      H += weights[j] * q->P;
      g += weights[j] * q->a;
    } else if (const auto* a = std::get_if<ConvexFunction::Affine>(&form)) {
      g += weights[j] * a->a;
    } else {
      return std::nullopt;
    }
  }
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Vector x = llt.solve(-g);
  if (!x.allFinite() || !t.feasible(x)) return std::nullopt;
  return finish(t, std::move(x), OracleMethod::ClosedForm, 0.0);
}

OracleSolution cross_validate(const ProblemSpec& p, const Target& t, const Vector& weights, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("oracle tolerance must be positive");
  std::vector<OracleSolution> found;
  if (auto cf = run_closed_form(p, t, weights)) found.push_back(*cf);
  auto [lo, hi] = t.domain->bounding_box();
  found.push_back(run_ellipsoid(t, lo, hi, tol));
  if (t.dim <= 3) found.push_back(run_grid(t, GridOptions{}, tol));

  double lo_v = kInf;
  double hi_v = -kInf;
  for (const auto& s : found) {
    lo_v = std::min(lo_v, s.value);
    hi_v = std::max(hi_v, s.value);
  }
  const double gap = hi_v - lo_v;
  if (gap > 10.0 * tol) {
    throw ConvergenceError("oracle methods disagree by " + std::to_string(gap), gap);
  }
  // Closed form when available, otherwise the lowest value.
  OracleSolution chosen = found.front();
  if (chosen.method != OracleMethod::ClosedForm) {
    for (const auto& s : found) {
      if (s.value < chosen.value) chosen = s;
    }
  }
  chosen.tol = tol;
  if (found.size() > 1) chosen.cross_check_gap = gap;
  return chosen;
}

}  // namespace

std::string_view to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::GridRefine: return "grid-refine";
    case OracleMethod::Ellipsoid: return "ellipsoid";
    case OracleMethod::ClosedForm: return "closed-form";
  }
  return "unknown";
}

OracleSolution solve_centralized(const ProblemSpec& p, double tol) {
  const Vector ones = Vector::Ones(p.nodes());
  return cross_validate(p, weighted_target(p, ones, true), ones, tol);
}

OracleSolution weighted_optimum(const ProblemSpec& p, const Vector& pi, double tol) {
  require_dim(pi, p.nodes(), "weighted_optimum");
  if ((pi.array() <= 0.0).any()) throw InvalidArgument("weighted_optimum: weights must be positive");
  if (std::abs(pi.sum() - 1.0) > 1e-9) throw InvalidArgument("weighted_optimum: weights must sum to 1");
  return cross_validate(p, weighted_target(p, pi, false), pi, tol);
}

OracleSolution grid_refine(const ProblemSpec& p, const Vector& weights, bool with_constraints,
                           const GridOptions& options) {
  return run_grid(weighted_target(p, weights, with_constraints), options, 0.0);
}

OracleSolution ellipsoid(const ProblemSpec& p, const Vector& weights, bool with_constraints, double tol) {
  const Target t = weighted_target(p, weights, with_constraints);
  auto [lo, hi] = t.domain->bounding_box();
  return run_ellipsoid(t, lo, hi, tol);
}

std::optional<OracleSolution> closed_form(const ProblemSpec& p, const Vector& weights,
                                          bool with_constraints) {
  const Target t = weighted_target(p, weights, with_constraints);
  return run_closed_form(p, t, weights);
}

OracleSolution solve_generic(const GenericProblem& gp, const Vector& lower, const Vector& upper,
                             double tol) {
  require_dim(lower, gp.dimension(), "solve_generic bounds");
  require_dim(upper, gp.dimension(), "solve_generic bounds");
  Target t;
  t.dim = gp.dimension();
  t.domain = &gp.theta_set();
  const Vector c = gp.cost() * gp.objective_scale();
  t.value = [c](const Vector& x) { return c.dot(x); };
  t.subgradient = [c](const Vector&) { return c; };
  for (int j = 0; j < gp.nodes(); ++j) {
    const auto& node = gp.node(j);
    t.constraints.push_back(node.objective);
    t.constraints.insert(t.constraints.end(), node.constraints.begin(), node.constraints.end());
  }
  return run_ellipsoid(t, lower, upper, tol);
}

OracleSolution solve_lifted(const EpigraphProblem& e, double tol) {
  const auto& p = e.original();
  auto [xlo, xhi] = p.common_set().bounding_box();
  if (!xlo.allFinite() || !xhi.allFinite()) throw InvalidArgument("solve_lifted needs a bounded common set");
  const Index m = p.dimension();
  if (m > 16) throw InvalidArgument("solve_lifted: decision dimension too large for vertex bounds");
  const int n = p.nodes();
  const Vector center = 0.5 * (xlo + xhi);
  const double diameter = (xhi - xlo).norm();

  Vector lower(m + n);
  Vector upper(m + n);
  lower.head(m) = xlo;
  upper.head(m) = xhi;
  for (int j = 0; j < n; ++j) {
    const auto& f = p.node(j).objective;
    // Convex: f >= f(c) - ||df(c)|| diam on the box; max over the box is at a vertex.
    const double lb = f.value(center) - f.subgradient(center).norm() * diameter;
    double ub = -kInf;
    for (long mask = 0; mask < (1L << m); ++mask) {
      Vector v(m);
      for (Index i = 0; i < m; ++i) v[i] = (mask >> i) & 1 ? xhi[i] : xlo[i];
      ub = std::max(ub, f.value(v));
    }
    lower[m + j] = lb - 1.0;
    upper[m + j] = ub + 1.0;
  }
  return solve_generic(to_generic(e), lower, upper, tol);
}

// ---------------------------------------------------------------------------
// Feasible-set projection

namespace {

using Projector = std::function<Vector(const Vector&)>;

struct QuadraticForm {  // 0.5 y'Qy + b'y + c
  Matrix Q;
  Vector b;
  double c = 0.0;
};

std::optional<QuadraticForm> as_quadratic(const ConvexFunction& f) {
  const Index d = f.dimension();
  if (const auto* a = std::get_if<ConvexFunction::Affine>(&f.form())) {
    return QuadraticForm{Matrix::Zero(d, d), a->a, a->b};
  }
  if (const auto* q = std::get_if<ConvexFunction::Quadratic>(&f.form())) {
    return QuadraticForm{q->P, q->a, q->b};
  }
  if (const auto* e = std::get_if<ConvexFunction::Embedded>(&f.form())) {
    auto inner = as_quadratic(*e->inner);
    if (!inner) return std::nullopt;
    const Index k = e->inner->dimension();
    QuadraticForm out{Matrix::Zero(d, d), e->linear, inner->c};
    out.Q.topLeftCorner(k, k) = inner->Q;
    out.b.head(k) += inner->b;
    return out;
  }
  return std::nullopt;
}

// Projection onto {0.5 y'Qy + b'y + c <= 0} via the multiplier equation
// z(l) = (I + l Q)^{-1} (y - l b), solved by bisection on l >= 0.
Projector quadratic_projector(QuadraticForm qf) {
  if (qf.Q.cwiseAbs().maxCoeff() == 0.0) {
    const double bn = squared_norm(qf.b);
    if (bn == 0.0) {
      if (qf.c <= 0.0) return [](const Vector& y) { return y; };
      throw InfeasibleProblem("project_feasible: constant constraint is never satisfied");
    }
    return [qf, bn](const Vector& y) -> Vector {
      const double excess = qf.b.dot(y) + qf.c;
      if (excess <= 0.0) return y;
      return y - (excess / bn) * qf.b;
    };
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(qf.Q);
  const Matrix V = eig.eigenvectors();
  const Vector lam = eig.eigenvalues().cwiseMax(0.0);
  return [qf, V, lam](const Vector& y) -> Vector {
    auto value = [&](const Vector& z) { return 0.5 * z.dot(qf.Q * z) + qf.b.dot(z) + qf.c; };
    if (value(y) <= 0.0) return y;
    auto at = [&](double l) -> Vector {
      const Vector rhs = V.transpose() * (y - l * qf.b);
      return V * (rhs.array() / (1.0 + l * lam.array())).matrix();
    };
    double lo = 0.0;
    double hi = 1.0;
    while (value(at(hi)) > 0.0) {
      hi *= 2.0;
      if (hi > 1e15) throw InfeasibleProblem("project_feasible: quadratic sublevel set appears empty");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (value(at(mid)) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return at(hi);
  };
}

Projector sublevel_projector(const ConvexFunction& f) {
  if (auto qf = as_quadratic(f)) return quadratic_projector(std::move(*qf));
  const Index d = f.dimension();
  if (const auto* ns = std::get_if<ConvexFunction::NormShift>(&f.form())) {
    if (ns->radius < 0.0) throw InfeasibleProblem("project_feasible: ball with negative radius");
    const SimpleSet ball = SimpleSet::ball(ns->center, ns->radius);
    return [ball](const Vector& y) { return ball.project(y); };
  }
  if (const auto* e = std::get_if<ConvexFunction::Embedded>(&f.form())) {
    const auto* ns = std::get_if<ConvexFunction::NormShift>(&e->inner->form());
    if (ns && squared_norm(e->linear) == 0.0) {
      if (ns->radius < 0.0) throw InfeasibleProblem("project_feasible: ball with negative radius");
      const SimpleSet cyl = SimpleSet::extended(SimpleSet::ball(ns->center, ns->radius), d);
      return [cyl](const Vector& y) { return cyl.project(y); };
    }
  }
  throw InvalidArgument("project_feasible: no exact projection for constraint form '" +
                        std::string(f.kind()) + "'");
}

}  // namespace

Vector project_feasible(const GenericProblem& gp, const Vector& y, double tol) {
  require_dim(y, gp.dimension(), "project_feasible");
  if (!(tol > 0.0)) throw InvalidArgument("project_feasible: tol must be positive");

  std::vector<ConvexFunction> pieces;
  for (int j = 0; j < gp.nodes(); ++j) {
    const auto& node = gp.node(j);
    for (const auto& b : node.objective.max_branches()) pieces.push_back(b);
    for (const auto& g : node.constraints) {
      for (const auto& b : g.max_branches()) pieces.push_back(b);
    }
  }
  auto violation = [&](const Vector& x) {
    double v = (x - gp.theta_set().project(x)).cwiseAbs().maxCoeff();
    for (const auto& f : pieces) v = std::max(v, positive_part(f.value(x)));
    return v;
  };
  if (violation(y) == 0.0) return y;

  std::vector<Projector> projectors;
  projectors.emplace_back([&gp](const Vector& x) { return gp.theta_set().project(x); });
  for (const auto& f : pieces) projectors.push_back(sublevel_projector(f));

  std::vector<Vector> corrections(projectors.size(), Vector::Zero(y.size()));
  Vector x = y;
  constexpr int kMaxCycles = 200000;
  double change = kInf;
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    change = 0.0;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      const Vector shifted = x + corrections[i];
      const Vector next = projectors[i](shifted);
      corrections[i] = shifted - next;
      change = std::max(change, (next - x).cwiseAbs().maxCoeff());
      x = next;
    }
    if (change <= tol && violation(x) <= tol) return x;
  }
  throw ConvergenceError("project_feasible: Dykstra iteration cap reached", std::max(change, violation(x)));
}

}  // namespace drfp
