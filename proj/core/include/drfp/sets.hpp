#pragma once

#include <memory>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "drfp/linalg.hpp"

namespace drfp {

// Closed convex sets with a Euclidean projection. Box, ball and half-space
// projections are closed form. Intersections are projected with Dykstra's
// cyclic scheme to a tolerance. `extended` is S x R^(dim - S.dim), the set
// acting on the leading block only.
class SimpleSet {
 public:
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Ball {
    Vector center;
    double radius = 0.0;
  };
  struct HalfSpace {  // a'y <= b
    Vector a;
    double b = 0.0;
  };
  struct Intersection {
    std::shared_ptr<const std::vector<SimpleSet>> parts;
    double tol = 1e-10;
    int max_cycles = 100000;
  };
  struct Extended {
    std::shared_ptr<const SimpleSet> inner;
    Index dim = 0;
  };
  using Form = std::variant<Box, Ball, HalfSpace, Intersection, Extended>;

  // Bounds may be +-infinity.
  static SimpleSet box(Vector lower, Vector upper);
  static SimpleSet whole_space(Index dim);
  static SimpleSet ball(Vector center, double radius);
  static SimpleSet half_space(Vector a, double b);
  static SimpleSet intersection(std::vector<SimpleSet> parts, double tol = 1e-10,
                                int max_cycles = 100000);
  static SimpleSet extended(SimpleSet inner, Index dim);

  Index dimension() const { return dim_; }
  const Form& form() const { return form_; }
  std::string_view kind() const;

  Vector project(const Vector& y) const;
  bool contains(const Vector& y, double tol = 0.0) const;

  // Axis-aligned box containing the set; coordinates may be infinite.
  std::pair<Vector, Vector> bounding_box() const;
  bool is_bounded() const;

  friend bool operator==(const SimpleSet& lhs, const SimpleSet& rhs);

 private:
  SimpleSet(Form form, Index dim) : form_(std::move(form)), dim_(dim) {}

  Vector project_unchecked(const Vector& y) const;
  bool contains_unchecked(const Vector& y, double tol) const;

  Form form_;
  Index dim_ = 0;
};

inline Vector project(const SimpleSet& s, const Vector& y) { return s.project(y); }

}  // namespace drfp
