#include "drfp/convex.hpp"

#include <cmath>
#include <string>

namespace drfp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + " must be finite");
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " must be finite");
}

double dot_sequential(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ConvexFunction ConvexFunction::affine(Vector a, double b) {
  if (a.size() < 1) throw InvalidArgument("affine: dimension must be >= 1");
  require_finite(a, "affine coefficients");
  if (!std::isfinite(b)) throw InvalidArgument("affine offset must be finite");
  const Index dim = a.size();
  return ConvexFunction(Affine{std::move(a), b}, dim);
}

ConvexFunction ConvexFunction::quadratic(Matrix P, Vector a, double b) {
  const Index dim = a.size();
  if (dim < 1) throw InvalidArgument("quadratic: dimension must be >= 1");
  if (P.rows() != dim || P.cols() != dim) {
    throw DimensionError("quadratic: P must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  require_finite(P, "quadratic P");
  require_finite(a, "quadratic linear term");
  if (!std::isfinite(b)) throw InvalidArgument("quadratic offset must be finite");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("quadratic: P must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(P, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InvalidArgument("quadratic: P must be positive semidefinite");
  }
  return ConvexFunction(Quadratic{std::move(P), std::move(a), b}, dim);
}

ConvexFunction ConvexFunction::norm_shift(Vector center, double radius) {
  if (center.size() < 1) throw InvalidArgument("norm_shift: dimension must be >= 1");
  require_finite(center, "norm_shift center");
  if (!std::isfinite(radius)) throw InvalidArgument("norm_shift radius must be finite");
  const Index dim = center.size();
  return ConvexFunction(NormShift{std::move(center), radius}, dim);
}

ConvexFunction ConvexFunction::pointwise_max(std::vector<ConvexFunction> branches) {
  if (branches.empty()) throw InvalidArgument("pointwise_max needs at least one branch");
  const Index dim = branches.front().dimension();
  for (const auto& b : branches) {
    if (b.dimension() != dim) throw DimensionError("pointwise_max: branch dimensions differ");
  }
  auto shared = std::make_shared<const std::vector<ConvexFunction>>(std::move(branches));
  return ConvexFunction(PointwiseMax{std::move(shared)}, dim);
}

ConvexFunction ConvexFunction::embedded(ConvexFunction inner, Index dim, Vector linear) {
  if (dim < inner.dimension()) {
    throw DimensionError("embedded: outer dimension smaller than inner dimension");
  }
  if (linear.size() != dim) throw DimensionError("embedded: linear term has wrong dimension");
  require_finite(linear, "embedded linear term");
  auto shared = std::make_shared<const ConvexFunction>(std::move(inner));
  return ConvexFunction(Embedded{std::move(shared), dim, std::move(linear)}, dim);
}

ConvexFunction ConvexFunction::always_satisfied(Index dim) {
  return affine(Vector::Zero(dim), 0.0);
}

std::string_view ConvexFunction::kind() const {
  return std::visit(Overloaded{
                        [](const Affine&) { return std::string_view("affine"); },
                        [](const Quadratic&) { return std::string_view("quadratic"); },
                        [](const NormShift&) { return std::string_view("norm_shift"); },
                        [](const PointwiseMax&) { return std::string_view("max"); },
                        [](const Embedded&) { return std::string_view("embedded"); },
                    },
                    form_);
}

double ConvexFunction::value(const Vector& y) const {
  require_dim(y, dim_, "ConvexFunction::value");
  return value_unchecked(y);
}

Vector ConvexFunction::subgradient(const Vector& y) const {
  require_dim(y, dim_, "ConvexFunction::subgradient");
  return subgradient_unchecked(y);
}

double ConvexFunction::value_unchecked(const Vector& y) const {
  return std::visit(
      Overloaded{
          [&](const Affine& f) { return dot_sequential(f.a, y) + f.b; },
          [&](const Quadratic& f) { return 0.5 * y.dot(f.P * y) + dot_sequential(f.a, y) + f.b; },
          [&](const NormShift& f) { return (y - f.center).norm() - f.radius; },
          [&](const PointwiseMax& f) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& b : *f.branches) best = std::max(best, b.value_unchecked(y));
            return best;
          },
          [&](const Embedded& f) {
            const Vector head = y.head(f.inner->dimension());
            return f.inner->value_unchecked(head) + dot_sequential(f.linear, y);
          },
      },
      form_);
}

Vector ConvexFunction::subgradient_unchecked(const Vector& y) const {
  return std::visit(Overloaded{
                        [&](const Affine& f) -> Vector { return f.a; },
                        [&](const Quadratic& f) -> Vector { return f.P * y + f.a; },
                        [&](const NormShift& f) -> Vector {
                          const Vector diff = y - f.center;
                          const double r = diff.norm();
                          if (r == 0.0) return unit_vector(diff.size(), 0);
                          return diff / r;
                        },
                        [&](const PointwiseMax& f) -> Vector {
                          const auto& branches = *f.branches;
                          std::size_t arg = 0;
                          double best = branches[0].value_unchecked(y);
                          for (std::size_t i = 1; i < branches.size(); ++i) {
                            const double v = branches[i].value_unchecked(y);
                            if (v > best) {
                              best = v;
                              arg = i;
                            }
                          }
                          return branches[arg].subgradient_unchecked(y);
                        },
                        [&](const Embedded& f) -> Vector {
                          const Index k = f.inner->dimension();
                          Vector d = f.linear;
                          d.head(k) += f.inner->subgradient_unchecked(y.head(k));
                          return d;
                        },
                    },
                    form_);
}

std::vector<ConvexFunction> ConvexFunction::max_branches() const {
  if (const auto* m = std::get_if<PointwiseMax>(&form_)) return *m->branches;
  return {*this};
}

bool operator==(const ConvexFunction& lhs, const ConvexFunction& rhs) {
  if (lhs.dim_ != rhs.dim_ || lhs.form_.index() != rhs.form_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const ConvexFunction::Affine& f) {
            const auto& g = std::get<ConvexFunction::Affine>(rhs.form_);
            return same_values(f.a, g.a) && f.b == g.b;
          },
          [&](const ConvexFunction::Quadratic& f) {
            const auto& g = std::get<ConvexFunction::Quadratic>(rhs.form_);
            return same_values(f.P, g.P) && same_values(f.a, g.a) && f.b == g.b;
          },
          [&](const ConvexFunction::NormShift& f) {
            const auto& g = std::get<ConvexFunction::NormShift>(rhs.form_);
            return same_values(f.center, g.center) && f.radius == g.radius;
          },
          [&](const ConvexFunction::PointwiseMax& f) {
            const auto& g = std::get<ConvexFunction::PointwiseMax>(rhs.form_);
            return *f.branches == *g.branches;
          },
          [&](const ConvexFunction::Embedded& f) {
            const auto& g = std::get<ConvexFunction::Embedded>(rhs.form_);
            return f.dim == g.dim && same_values(f.linear, g.linear) && *f.inner == *g.inner;
          },
      },
      lhs.form_);
}

void require_relaxation(double beta) {
  if (!(beta > 0.0 && beta < 2.0)) {
    throw InvalidArgument("relaxation parameter beta must lie in (0, 2), got " +
                          std::to_string(beta));
  }
}

Vector polyak_step(const ConvexFunction& h, const Vector& y, double beta, const Vector& fallback) {
  require_relaxation(beta);
  require_dim(y, h.dimension(), "polyak_step point");
  require_dim(fallback, h.dimension(), "polyak_step fallback");
  if (squared_norm(fallback) == 0.0) throw InvalidArgument("polyak_step: fallback must be nonzero");

  const double violation = positive_part(h.value(y));
  if (violation == 0.0) return y;
  const Vector d = h.subgradient(y);
  const double dn = squared_norm(d);
  if (dn == 0.0) {
    throw InfeasibleProblem("polyak_step: zero subgradient at a violating point; sublevel set is empty");
  }
  return y - (beta * violation / dn) * d;
}

}  // namespace drfp
