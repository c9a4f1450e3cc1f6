#include "drfp/sets.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace drfp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SimpleSet SimpleSet::box(Vector lower, Vector upper) {
  if (lower.size() < 1) throw InvalidArgument("box: dimension must be >= 1");
  if (lower.size() != upper.size()) throw DimensionError("box: bound dimensions differ");
  for (Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw InvalidArgument("box: need lower <= upper in every coordinate");
    }
  }
  const Index dim = lower.size();
  return SimpleSet(Box{std::move(lower), std::move(upper)}, dim);
}

SimpleSet SimpleSet::whole_space(Index dim) {
  return box(Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf));
}

SimpleSet SimpleSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw InvalidArgument("ball: dimension must be >= 1");
  if (!center.allFinite()) throw InvalidArgument("ball: center must be finite");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball: radius must be >= 0");
  const Index dim = center.size();
  return SimpleSet(Ball{std::move(center), radius}, dim);
}

SimpleSet SimpleSet::half_space(Vector a, double b) {
  if (a.size() < 1) throw InvalidArgument("half_space: dimension must be >= 1");
  if (!a.allFinite() || !std::isfinite(b)) throw InvalidArgument("half_space: data must be finite");
  if (squared_norm(a) == 0.0) throw InvalidArgument("half_space: normal must be nonzero");
  const Index dim = a.size();
  return SimpleSet(HalfSpace{std::move(a), b}, dim);
}

SimpleSet SimpleSet::intersection(std::vector<SimpleSet> parts, double tol, int max_cycles) {
  if (parts.empty()) throw InvalidArgument("intersection: needs at least one set");
  if (!(tol > 0.0) || max_cycles < 1) throw InvalidArgument("intersection: bad tolerance or cap");
  const Index dim = parts.front().dimension();
  for (const auto& p : parts) {
    if (p.dimension() != dim) throw DimensionError("intersection: part dimensions differ");
  }
  auto shared = std::make_shared<const std::vector<SimpleSet>>(std::move(parts));
  return SimpleSet(Intersection{std::move(shared), tol, max_cycles}, dim);
}

SimpleSet SimpleSet::extended(SimpleSet inner, Index dim) {
  if (dim < inner.dimension()) throw DimensionError("extended: dimension smaller than inner set");
  auto shared = std::make_shared<const SimpleSet>(std::move(inner));
  return SimpleSet(Extended{std::move(shared), dim}, dim);
}

std::string_view SimpleSet::kind() const {
  return std::visit(Overloaded{
                        [](const Box&) { return std::string_view("box"); },
                        [](const Ball&) { return std::string_view("ball"); },
                        [](const HalfSpace&) { return std::string_view("half_space"); },
                        [](const Intersection&) { return std::string_view("intersection"); },
                        [](const Extended&) { return std::string_view("extended"); },
                    },
                    form_);
}

Vector SimpleSet::project(const Vector& y) const {
  require_dim(y, dim_, "SimpleSet::project");
  return project_unchecked(y);
}

bool SimpleSet::contains(const Vector& y, double tol) const {
  require_dim(y, dim_, "SimpleSet::contains");
  return contains_unchecked(y, tol);
}

Vector SimpleSet::project_unchecked(const Vector& y) const {
  return std::visit(
      Overloaded{
          [&](const Box& s) -> Vector { return y.cwiseMax(s.lower).cwiseMin(s.upper); },
          [&](const Ball& s) -> Vector {
            const Vector diff = y - s.center;
            const double r = diff.norm();
            if (r <= s.radius) return y;
            return s.center + (s.radius / r) * diff;
          },
          [&](const HalfSpace& s) -> Vector {
            const double excess = s.a.dot(y) - s.b;
            if (excess <= 0.0) return y;
            return y - (excess / squared_norm(s.a)) * s.a;
          },
          [&](const Intersection& s) -> Vector {
            if (contains_unchecked(y, s.tol)) return y;
            // Dykstra: cyclic projections with per-set correction terms
            // converge to the nearest point of the intersection.
            const auto& parts = *s.parts;
            std::vector<Vector> corrections(parts.size(), Vector::Zero(y.size()));
            Vector x = y;
            double change = kInf;
            for (int cycle = 0; cycle < s.max_cycles; ++cycle) {
              change = 0.0;
              for (std::size_t i = 0; i < parts.size(); ++i) {
                const Vector shifted = x + corrections[i];
                const Vector next = parts[i].project_unchecked(shifted);
                corrections[i] = shifted - next;
                change = std::max(change, (next - x).cwiseAbs().maxCoeff());
                x = next;
              }
              if (change <= s.tol && contains_unchecked(x, s.tol)) return x;
            }
            throw ConvergenceError("intersection projection did not converge within the cycle cap",
                                   change);
          },
          [&](const Extended& s) -> Vector {
            Vector out = y;
            const Index k = s.inner->dimension();
            out.head(k) = s.inner->project_unchecked(y.head(k));
            return out;
          },
      },
      form_);
}

bool SimpleSet::contains_unchecked(const Vector& y, double tol) const {
  return std::visit(
      Overloaded{
          [&](const Box& s) {
            for (Index i = 0; i < y.size(); ++i) {
              if (!(y[i] >= s.lower[i] - tol && y[i] <= s.upper[i] + tol)) return false;
            }
            return true;
          },
          [&](const Ball& s) { return (y - s.center).norm() <= s.radius + tol; },
          [&](const HalfSpace& s) { return s.a.dot(y) <= s.b + tol; },
          [&](const Intersection& s) {
            for (const auto& p : *s.parts) {
              if (!p.contains_unchecked(y, tol)) return false;
            }
            return true;
          },
          [&](const Extended& s) {
            if (!y.allFinite()) return false;
            return s.inner->contains_unchecked(y.head(s.inner->dimension()), tol);
          },
      },
      form_);
}

std::pair<Vector, Vector> SimpleSet::bounding_box() const {
  return std::visit(
      Overloaded{
          [&](const Box& s) { return std::make_pair(s.lower, s.upper); },
          [&](const Ball& s) {
            const Vector r = Vector::Constant(dim_, s.radius);
            return std::make_pair(Vector(s.center - r), Vector(s.center + r));
          },
          [&](const HalfSpace&) {
            return std::make_pair(Vector(Vector::Constant(dim_, -kInf)),
                                  Vector(Vector::Constant(dim_, kInf)));
          },
          [&](const Intersection& s) {
            Vector lo = Vector::Constant(dim_, -kInf);
            Vector hi = Vector::Constant(dim_, kInf);
            for (const auto& p : *s.parts) {
              auto [plo, phi] = p.bounding_box();
              lo = lo.cwiseMax(plo);
              hi = hi.cwiseMin(phi);
            }
            return std::make_pair(lo, hi);
          },
          [&](const Extended& s) {
            Vector lo = Vector::Constant(dim_, -kInf);
            Vector hi = Vector::Constant(dim_, kInf);
            auto [ilo, ihi] = s.inner->bounding_box();
            lo.head(ilo.size()) = ilo;
            hi.head(ihi.size()) = ihi;
            return std::make_pair(lo, hi);
          },
      },
      form_);
}

bool SimpleSet::is_bounded() const {
  auto [lo, hi] = bounding_box();
  return lo.allFinite() && hi.allFinite();
}

bool operator==(const SimpleSet& lhs, const SimpleSet& rhs) {
  if (lhs.dim_ != rhs.dim_ || lhs.form_.index() != rhs.form_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const SimpleSet::Box& s) {
            const auto& o = std::get<SimpleSet::Box>(rhs.form_);
            return same_values(s.lower, o.lower) && same_values(s.upper, o.upper);
          },
          [&](const SimpleSet::Ball& s) {
            const auto& o = std::get<SimpleSet::Ball>(rhs.form_);
            return same_values(s.center, o.center) && s.radius == o.radius;
          },
          [&](const SimpleSet::HalfSpace& s) {
            const auto& o = std::get<SimpleSet::HalfSpace>(rhs.form_);
            return same_values(s.a, o.a) && s.b == o.b;
          },
          [&](const SimpleSet::Intersection& s) {
            const auto& o = std::get<SimpleSet::Intersection>(rhs.form_);
            return s.tol == o.tol && s.max_cycles == o.max_cycles && *s.parts == *o.parts;
          },
          [&](const SimpleSet::Extended& s) {
            const auto& o = std::get<SimpleSet::Extended>(rhs.form_);
            return s.dim == o.dim && *s.inner == *o.inner;
          },
      },
      lhs.form_);
}

}  // namespace drfp
