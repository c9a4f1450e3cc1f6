#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "drfp/linalg.hpp"

namespace drfp {

// A convex function from a closed family, carrying an exact subgradient
// oracle. Values are immutable after construction; copies share the
// underlying branch storage.
//
// Forms:
//   affine        a'y + b
//   quadratic     0.5 y'Py + a'y + b          (P symmetric PSD)
//   norm_shift    ||y - center|| - radius
//   pointwise_max max_i h_i(y)
//   embedded      inner(y[0:k]) + l'y         (inner acts on the leading block)
//
// `embedded` is what lets node-local functions over the decision vector x
// act on the stacked vector (x, t) of the epigraph problem.
class ConvexFunction {
 public:
  struct Affine {
    Vector a;
    double b = 0.0;
  };
  struct Quadratic {
    Matrix P;
    Vector a;
    double b = 0.0;
  };
  struct NormShift {
    Vector center;
    double radius = 0.0;
  };
  struct PointwiseMax {
    std::shared_ptr<const std::vector<ConvexFunction>> branches;
  };
  struct Embedded {
    std::shared_ptr<const ConvexFunction> inner;
    Index dim = 0;
    Vector linear;
  };
  using Form = std::variant<Affine, Quadratic, NormShift, PointwiseMax, Embedded>;

  static ConvexFunction affine(Vector a, double b);
  static ConvexFunction quadratic(Matrix P, Vector a, double b);
  static ConvexFunction norm_shift(Vector center, double radius);
  static ConvexFunction pointwise_max(std::vector<ConvexFunction> branches);
  // inner(y.head(inner.dimension())) + linear'y on R^dim.
  static ConvexFunction embedded(ConvexFunction inner, Index dim, Vector linear);
  // Zero on R^dim; its sublevel set is the whole space.
  static ConvexFunction always_satisfied(Index dim);

  Index dimension() const { return dim_; }
  const Form& form() const { return form_; }
  std::string_view kind() const;

  double value(const Vector& y) const;
  // One element of the subdifferential. Pointwise max picks the lowest
  // maximizing branch; the norm at its center returns the first unit vector.
  Vector subgradient(const Vector& y) const;

  // Branches of a pointwise max, or {*this} for every other form.
  std::vector<ConvexFunction> max_branches() const;

  friend bool operator==(const ConvexFunction& lhs, const ConvexFunction& rhs);

 private:
  ConvexFunction(Form form, Index dim) : form_(std::move(form)), dim_(dim) {}

  double value_unchecked(const Vector& y) const;
  Vector subgradient_unchecked(const Vector& y) const;

  Form form_;
  Index dim_ = 0;
};

// Polyak step toward the zero-sublevel set of h:
//   y - beta * h(y)_+ / ||d||^2 * d,  d in dh(y) when h(y) > 0, else d = fallback.
// A zero subgradient at a point with h(y) > 0 means {h <= 0} is empty and
// raises InfeasibleProblem.
Vector polyak_step(const ConvexFunction& h, const Vector& y, double beta, const Vector& fallback);

void require_relaxation(double beta);

}  // namespace drfp
