#include <doctest.h>

#include <limits>

#include "drfp/sets.hpp"
#include "testing.hpp"

using namespace drfp;
using drfp::testing::Rng;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SimpleSet random_elementary_set(Rng& rng, Index d) {
  switch (drfp::testing::uniform_int(rng, 0, 2)) {
    case 0: {
      Vector lo = drfp::testing::random_vector(rng, d, 2.0);
      Vector hi = lo + Vector::Constant(d, drfp::testing::uniform(rng, 0.1, 3.0));
      return SimpleSet::box(lo, hi);
    }
    case 1:
      return SimpleSet::ball(drfp::testing::random_vector(rng, d, 2.0), drfp::testing::uniform(rng, 0.1, 2.0));
    default: {
      Vector a = drfp::testing::random_vector(rng, d, 1.0);
      a[0] += 1.5;
      return SimpleSet::half_space(a, drfp::testing::uniform(rng, -1.0, 1.0));
    }
  }
}
}  // namespace

TEST_CASE("projection examples") {
  const auto box = SimpleSet::box(vec({-1, -1}), vec({1, 1}));
  CHECK(box.project(vec({2, -3})) == vec({1, -1}));
  const Vector b = SimpleSet::ball(vec({0, 0}), 1).project(vec({3, 4}));
  CHECK(b[0] == doctest::Approx(0.6));
  CHECK(b[1] == doctest::Approx(0.8));
  CHECK(b.norm() == doctest::Approx(1.0));
  CHECK(box.project(vec({0.25, -0.5})) == vec({0.25, -0.5}));
  const Vector h = SimpleSet::half_space(vec({1, 1}), 1).project(vec({2, 2}));
  CHECK(h[0] == doctest::Approx(0.5));
  CHECK(h[1] == doctest::Approx(0.5));
}

TEST_CASE("infinite box bounds and whole space") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto s = SimpleSet::box(vec({0, -inf}), vec({1, inf}));
  CHECK(s.project(vec({-2, 1e9})) == vec({0, 1e9}));
  CHECK_FALSE(s.is_bounded());
  const auto w = SimpleSet::whole_space(3);
  CHECK(w.project(vec({1, 2, 3})) == vec({1, 2, 3}));
}

TEST_CASE("extended set leaves the trailing block free") {
  const auto s = SimpleSet::extended(SimpleSet::box(vec({-1}), vec({1})), 3);
  CHECK(s.dimension() == 3);
  CHECK(s.project(vec({5, -7, 8})) == vec({1, -7, 8}));
  CHECK(s.contains(vec({0.5, 100, -100})));
}

TEST_CASE("invalid sets are rejected") {
  CHECK_THROWS_AS(SimpleSet::box(vec({1}), vec({0})), InvalidArgument);
  CHECK_THROWS_AS(SimpleSet::ball(vec({0}), -1), InvalidArgument);
  CHECK_THROWS_AS(SimpleSet::half_space(vec({0, 0}), 1), InvalidArgument);
  CHECK_THROWS_AS(SimpleSet::box(vec({0}), vec({1})).project(vec({0, 0})), DimensionError);
  CHECK_THROWS_AS(SimpleSet::intersection({SimpleSet::box(vec({0}), vec({1})), SimpleSet::ball(vec({0, 0}), 1)}),
                  DimensionError);
}

TEST_CASE("elementary projections are idempotent and nonexpansive") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = drfp::testing::uniform_int(rng, 1, 4);
    const auto s = random_elementary_set(rng, d);
    const Vector y = drfp::testing::random_vector(rng, d, 5.0);
    const Vector z = drfp::testing::random_vector(rng, d, 5.0);
    const Vector py = s.project(y);
    const Vector pz = s.project(z);
    CHECK(drfp::testing::max_abs_diff(s.project(py), py) <= 1e-12);
    CHECK((py - pz).norm() <= (y - z).norm() + 1e-12);
    CHECK(s.contains(py, 1e-12));
  }
}

TEST_CASE("intersection projection is the nearest point") {
  // Box [0,2]^2 intersected with x + y <= 1: the projection of (3,3) is (0.5,0.5).
  const auto s = SimpleSet::intersection({SimpleSet::box(vec({0, 0}), vec({2, 2})), SimpleSet::half_space(vec({1, 1}), 1)});
  const Vector p = s.project(vec({3, 3}));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-8));
  // Corner case where plain alternating projection would stop short.
  const Vector q = s.project(vec({3, -1}));
  CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(q[1] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(s.project(vec({0.2, 0.3})) == vec({0.2, 0.3}));
}

TEST_CASE("intersection projection properties on random instances") {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = drfp::testing::uniform_int(rng, 1, 3);
    // Every part contains the origin's neighbourhood, so the intersection is nonempty.
    std::vector<SimpleSet> parts;
    parts.push_back(SimpleSet::box(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0)));
    parts.push_back(SimpleSet::ball(drfp::testing::random_vector(rng, d, 0.5), 1.0));
    Vector a = drfp::testing::random_vector(rng, d, 1.0);
    a[0] += 1.5;
    parts.push_back(SimpleSet::half_space(a, drfp::testing::uniform(rng, 0.0, 0.5)));
    const auto s = SimpleSet::intersection(parts);
    const Vector y = drfp::testing::random_vector(rng, d, 4.0);
    const Vector z = drfp::testing::random_vector(rng, d, 4.0);
    const Vector py = s.project(y);
    const Vector pz = s.project(z);
    CHECK(s.contains(py, 1e-8));
    CHECK(drfp::testing::max_abs_diff(s.project(py), py) <= 1e-8);
    CHECK((py - pz).norm() <= (y - z).norm() + 1e-8);
  }
}

TEST_CASE("bounding boxes") {
  auto [lo, hi] = SimpleSet::ball(vec({1, 2}), 0.5).bounding_box();
  CHECK(lo == vec({0.5, 1.5}));
  CHECK(hi == vec({1.5, 2.5}));
  const auto s = SimpleSet::intersection({SimpleSet::box(vec({0, 0}), vec({4, 4})), SimpleSet::ball(vec({0, 0}), 1)});
  auto [l2, h2] = s.bounding_box();
  CHECK(h2 == vec({1, 1}));
  CHECK(l2 == vec({0, 0}));
}
