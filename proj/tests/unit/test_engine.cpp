#include <doctest.h>

#include <cmath>

#include "drfp/engine.hpp"
#include "drfp/oracle.hpp"
#include "drfp/rng.hpp"
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

ConvexFunction sq(double center) {
  return ConvexFunction::quadratic(Matrix::Constant(1, 1, 2.0), vec({-2 * center}), center * center);
}

WeightMatrix unbalanced() {
  Matrix a(2, 2);
  a << 0.5, 0.5, 0.25, 0.75;
  return WeightMatrix(a, 0.25);
}

// n = 1, d = 1, c = (1), Theta = [-10, 10], g(theta) = -theta, f(theta) = theta - 5.
GenericProblem scalar_problem() {
  return GenericProblem(vec({1}), SimpleSet::box(vec({-10}), vec({10})),
                        {{ConvexFunction::affine(vec({1}), -5), {ConvexFunction::affine(vec({-1}), 0)}}});
}

std::vector<NodeState> single(double theta) {
  auto s = initial_states(1, 1, 0);
  s[0].theta[0] = theta;
  return s;
}

ProblemSpec four_node() {
  const auto x = SimpleSet::box(vec({-3, -3}), vec({3, 3}));
  std::vector<Vector> centers{vec({1.2, 0.2}), vec({0.2, 1.2}), vec({0, 0}), vec({1, 1})};
  std::vector<std::vector<ConvexFunction>> cons{
      {ConvexFunction::affine(vec({1, 1}), -1), ConvexFunction::norm_shift(vec({0, 0}), 1.5)},
      {ConvexFunction::affine(vec({-1, 0}), -0.5), ConvexFunction::norm_shift(vec({0.5, 0.5}), 1.2)},
      {ConvexFunction::affine(vec({0, 1}), -0.9), ConvexFunction::norm_shift(vec({0, 0.3}), 1.5)},
      {ConvexFunction::affine(vec({1, -1}), -0.6), ConvexFunction::norm_shift(vec({0.3, 0}), 1.4)}};
  std::vector<NodeProblem> nodes;
  for (int j = 0; j < 4; ++j) {
    const Vector& c = centers[static_cast<std::size_t>(j)];
    nodes.push_back({ConvexFunction::quadratic(Matrix::Identity(2, 2), -c, 0.5 * c.squaredNorm()),
                     cons[static_cast<std::size_t>(j)]});
  }
  return ProblemSpec(x, nodes, vec({0, 0}));
}

GraphSequence four_node_graphs() {
  std::vector<std::vector<Digraph::Edge>> rounds{{{1, 0}, {2, 1}}, {{3, 2}, {0, 3}, {2, 0}}, {{0, 1}, {1, 3}}};
  std::vector<WeightMatrix> cycle;
  for (const auto& e : rounds) cycle.push_back(make_weight_matrix(Digraph(4, e), 0.5));
  return GraphSequence::periodic(std::move(cycle), 3);
}
}  // namespace

TEST_CASE("step schedule") {
  const StepSchedule s{1, 1, 1};
  CHECK(s(0) == 1.0);
  CHECK(s(3) == 0.25);
  CHECK(step(StepSchedule{2, 4, 1}, 0) == 0.5);
  CHECK_THROWS_AS(StepSchedule({0, 1, 1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepSchedule({1, 0.5, 1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepSchedule({1, 1, 0.5}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepSchedule({1, 1, 1.1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(s(-1), InvalidArgument);
}

TEST_CASE("p-series partial sums") {
  const StepSchedule s{1, 1, 0.6};
  double sum = 0;
  double sum_sq = 0;
  double sum_at_1e4 = 0;
  double sq_at_1e5 = 0;
  for (long k = 0; k < 1000000; ++k) {
    const double z = s(k);
    sum += z;
    sum_sq += z * z;
    if (k == 9999) sum_at_1e4 = sum;
    if (k == 99999) sq_at_1e5 = sum_sq;
  }
  // sum grows like k^0.4 without bound; the squares converge (zeta(1.2) ~ 5.59).
  CHECK(sum > 6 * sum_at_1e4);
  CHECK(sum_sq - sq_at_1e5 < 0.2);
  CHECK(sum_sq < 5.6);
}

TEST_CASE("generic round hand traces") {
  const auto gp = scalar_problem();
  const WeightMatrix one(Matrix::Identity(1, 1), 1.0);
  std::vector<RoundScratch> scratch;
  auto a = drfp_round(single(2), one, 1.0, 1.0, gp, {}, &scratch);
  CHECK(a[0].theta[0] == 1.0);
  CHECK(a[0].round == 1);
  CHECK(scratch[0].p[0] == 1.0);
  CHECK(scratch[0].q[0] == 1.0);
  CHECK(scratch[0].omega == 0);
  auto b = drfp_round(single(-2), one, 1.0, 1.0, gp, {}, &scratch);
  CHECK(scratch[0].p[0] == -3.0);
  CHECK(scratch[0].q[0] == 0.0);
  CHECK(b[0].theta[0] == 0.0);
}

TEST_CASE("zero step and no active constraints leaves a consensus state in place") {
  auto states = initial_states(2, 3, 5);
  for (auto& s : states) s.theta = vec({0.1, 0.2, 0.3});
  const auto gp = GenericProblem(vec({0, 1, 1}), SimpleSet::whole_space(3),
                                 {{ConvexFunction::always_satisfied(3), {}}, {ConvexFunction::always_satisfied(3), {}}});
  const auto next = drfp_round(states, unbalanced(), 0.0, 0.01, gp);
  for (const auto& s : next) CHECK(drfp::testing::max_abs_diff(s.theta, vec({0.1, 0.2, 0.3})) <= 1e-15);
  const auto moved = drfp_round(states, unbalanced(), 0.5, 0.01, gp);
  for (const auto& s : moved) CHECK(drfp::testing::max_abs_diff(s.theta, vec({0.1, -0.3, -0.2})) <= 1e-15);
}

TEST_CASE("round input validation") {
  const auto gp = scalar_problem();
  const WeightMatrix one(Matrix::Identity(1, 1), 1.0);
  CHECK_THROWS_AS(drfp_round(single(0), one, 1.0, 2.0, gp), InvalidArgument);
  CHECK_THROWS_AS(drfp_round(single(0), one, -1.0, 1.0, gp), InvalidArgument);
  CHECK_THROWS_AS(drfp_round(single(0), unbalanced(), 1.0, 1.0, gp), DimensionError);
  auto bad = initial_states(1, 2, 0);
  CHECK_THROWS_AS(drfp_round(bad, one, 1.0, 1.0, gp), DimensionError);
  auto two = initial_states(2, 1, 0);
  two[1].round = 3;
  const auto p2 = ProblemSpec(SimpleSet::box(vec({-5}), vec({5})), {{sq(0), {}}, {sq(1), {}}}, vec({0}));
  CHECK_THROWS_AS(dgd_round(two, unbalanced(), 0.1, p2), InvalidArgument);
}

TEST_CASE("epigraph round properties") {
  const auto p = ProblemSpec(SimpleSet::box(vec({-5}), vec({5})), {{sq(0), {}}, {sq(1), {}}}, vec({0}));
  const auto e = lift(p);
  auto states = initial_states(2, 3, 1);
  states[0].theta = vec({2, 0, 0});
  states[1].theta = vec({-1, 5, 9});
  std::vector<RoundScratch> scratch;
  const double zeta = 0.3;
  const auto next = epigraph_round(states, unbalanced(), zeta, 1.0, e, {}, &scratch);
  for (int j = 0; j < 2; ++j) {
    const auto& s = scratch[static_cast<std::size_t>(j)];
    const Vector z = s.q.head(1);
    const Vector pt = s.p.tail(2);
    const Vector tn = next[static_cast<std::size_t>(j)].theta.tail(2);
    const double fz = p.node(j).objective.value(z);
    CHECK(positive_part(fz - tn[j]) <= positive_part(fz - pt[j]) + 1e-15);
    if (fz <= pt[j]) CHECK(tn == pt);
    for (int i = 0; i < 2; ++i) {
      if (i != j) CHECK(tn[i] == pt[i]);
    }
  }
}

TEST_CASE("specialized and generic paths agree") {
  const auto p = four_node();
  const auto e = lift(p);
  const auto gp = to_generic(e);
  const auto seq = four_node_graphs();
  auto a = initial_states(4, e.dimension(), 9);
  auto b = a;
  double worst = 0;
  for (long k = 0; k < 100; ++k) {
    const auto w = seq.matrix(k);
    a = epigraph_round(a, w, 1.0 / (k + 1), 1.0, e);
    b = drfp_round(b, w, 1.0 / (k + 1), 1.0, gp);
    for (int j = 0; j < 4; ++j) {
      worst = std::max(worst, drfp::testing::max_abs_diff(a[static_cast<std::size_t>(j)].theta,
                                                          b[static_cast<std::size_t>(j)].theta));
    }
  }
  CHECK(worst <= 1e-12);

  // The literal variant evaluates the objective at the mixed point on both paths.
  RoundVariant literal;
  literal.objective_point = ObjectivePoint::AtMixedPoint;
  a = initial_states(4, e.dimension(), 9);
  b = a;
  worst = 0;
  for (long k = 0; k < 100; ++k) {
    const auto w = seq.matrix(k);
    a = epigraph_round(a, w, 1.0 / (k + 1), 1.0, e, literal);
    b = drfp_round(b, w, 1.0 / (k + 1), 1.0, gp, literal);
    for (int j = 0; j < 4; ++j) {
      worst = std::max(worst, drfp::testing::max_abs_diff(a[static_cast<std::size_t>(j)].theta,
                                                          b[static_cast<std::size_t>(j)].theta));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("states stay in Theta and rounds are deterministic") {
  const auto e = lift(four_node());
  const auto seq = four_node_graphs();
  auto a = initial_states(4, e.dimension(), 3);
  auto b = initial_states(4, e.dimension(), 3);
  for (long k = 0; k < 200; ++k) {
    a = epigraph_round(a, seq.matrix(k), 5.0 / (k + 1), 1.5, e);
    b = epigraph_round(b, seq.matrix(k), 5.0 / (k + 1), 1.5, e);
    for (int j = 0; j < 4; ++j) {
      CHECK(e.theta_set().contains(a[static_cast<std::size_t>(j)].theta));
      CHECK(same_values(a[static_cast<std::size_t>(j)].theta, b[static_cast<std::size_t>(j)].theta));
    }
  }
}

TEST_CASE("multi-projection and farthest-set variants") {
  const auto e = lift(four_node());
  const auto gp = to_generic(e);
  const auto seq = four_node_graphs();
  RoundVariant v;
  v.projections_per_round = 3;
  v.farthest_set = true;
  auto a = initial_states(4, e.dimension(), 3);
  std::vector<RoundScratch> scratch;
  for (long k = 0; k < 50; ++k) a = epigraph_round(a, seq.matrix(k), 1.0 / (k + 1), 1.0, e, v, &scratch);
  for (const auto& s : scratch) CHECK((s.omega >= 0 && s.omega < 3));
  v.projections_per_round = 0;
  CHECK_THROWS_AS(drfp_round(a, seq.matrix(50), 0.1, 1.0, gp, v), InvalidArgument);
}

TEST_CASE("feasibility step bound against the exact projection") {
  // Theta_0 is the half-space x <= 1 (times R^n): the epigraph constraint is
  // never active because t starts far above f.
  const auto x = SimpleSet::box(vec({-10}), vec({10}));
  const auto g = ConvexFunction::affine(vec({1}), -1);
  const auto p = ProblemSpec(x, {{ConvexFunction::affine(vec({0}), 0), {g}}, {ConvexFunction::affine(vec({0}), 0), {g}}},
                             vec({0}));
  const auto gp = to_generic(lift(p));
  const auto theta0 = SimpleSet::intersection({gp.theta_set(), SimpleSet::half_space(vec({1, 0, 0}), 1)});
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    auto states = initial_states(2, 3, static_cast<std::uint64_t>(trial));
    for (auto& s : states) s.theta = vec({drfp::testing::uniform(rng, -8, 8), 50, 50});
    const double zeta = drfp::testing::uniform(rng, 0.0, 1.0);
    std::vector<RoundScratch> scratch;
    const auto next = drfp_round(states, unbalanced(), zeta, 1.0, gp, {}, &scratch);
    for (int j = 0; j < 2; ++j) {
      const Vector lambda = scratch[static_cast<std::size_t>(j)].p + zeta * gp.cost();
      const Vector mu = project_feasible(gp, lambda, 1e-12);
      CHECK(drfp::testing::max_abs_diff(mu, theta0.project(lambda)) <= 1e-9);
      CHECK((next[static_cast<std::size_t>(j)].theta - mu).norm() <=
            zeta * gp.cost().norm() + (lambda - mu).norm() + 1e-12);
    }
  }
}

TEST_CASE("consensus under vanishing perturbation") {
  // No constraint activity, cost pushes every node; disagreement vanishes.
  const auto gp = GenericProblem(vec({1, -1}), SimpleSet::whole_space(2),
                                 {{ConvexFunction::always_satisfied(2), {}},
                                  {ConvexFunction::always_satisfied(2), {}},
                                  {ConvexFunction::always_satisfied(2), {}}});
  std::vector<std::vector<Digraph::Edge>> rounds{{{1, 0}}, {{2, 1}}, {{0, 2}}};
  std::vector<WeightMatrix> cycle;
  for (const auto& e : rounds) cycle.push_back(make_weight_matrix(Digraph(3, e), 0.5));
  const auto seq = GraphSequence::periodic(std::move(cycle), 3);
  auto states = initial_states(3, 2, 0);
  states[0].theta = vec({5, -3});
  states[2].theta = vec({-4, 1});
  for (long k = 0; k < 100000; ++k) states = drfp_round(states, seq.matrix(k), 1.0 / (k + 1), 1.0, gp);
  const Vector pi = estimate_pi(seq, 100000, 1e-13, 100000).pi;
  Vector bar = Vector::Zero(2);
  for (int j = 0; j < 3; ++j) bar += pi[j] * states[static_cast<std::size_t>(j)].theta;
  double worst = 0;
  for (const auto& s : states) worst = std::max(worst, drfp::testing::max_abs_diff(s.theta, bar));
  CHECK(worst <= 1e-4);
}

TEST_CASE("dgd examples") {
  const auto x = SimpleSet::box(vec({-5}), vec({5}));
  const auto p1 = ProblemSpec(x, {{sq(1), {}}}, vec({0}));
  auto s = initial_states(1, 1, 0);
  s[0].theta[0] = 3;
  const auto one = dgd_round(s, WeightMatrix(Matrix::Identity(1, 1), 1.0), 0.25, p1);
  CHECK(one[0].theta[0] == 3 - 0.25 * 4);

  const auto p2 = ProblemSpec(x, {{sq(0), {}}, {sq(1), {}}}, vec({0}));
  auto states = initial_states(2, 1, 0);
  for (long k = 0; k < 20000; ++k) states = dgd_round(states, unbalanced(), 1.0 / (k + 1), p2);
  for (const auto& st : states) CHECK(std::abs(st.theta[0] - 2.0 / 3) <= 1e-3);

  const auto balanced = WeightMatrix(Matrix::Constant(2, 2, 0.5), 0.5);
  const auto same = ProblemSpec(x, {{sq(0.3), {}}, {sq(0.3), {}}}, vec({0}));
  states = initial_states(2, 1, 0);
  for (long k = 0; k < 2000; ++k) states = dgd_round(states, balanced, 1.0 / (k + 1), same);
  for (const auto& st : states) CHECK(std::abs(st.theta[0] - 0.3) <= 1e-6);
}

TEST_CASE("constraint draws are uniform and independent across nodes") {
  // Chi-square test, 1e5 draws per node, tau = 5; critical value at 0.001 with 4 dof is 18.47.
  const auto states = initial_states(3, 1, 2024);
  const int tau = 5;
  for (const auto& base : states) {
    std::vector<int> counts(tau, 0);
    NodeState s = base;
    for (long r = 0; r < 100000; ++r) {
      s.round = r;
      ++counts[static_cast<std::size_t>(draw_constraint(s, tau))];
    }
    double chi2 = 0;
    for (int c : counts) chi2 += (c - 20000.0) * (c - 20000.0) / 20000.0;
    CHECK(chi2 < 18.47);
  }
  // Pairs of nodes: joint distribution over tau^2 cells (24 dof, critical value 51.18).
  std::vector<int> joint(tau * tau, 0);
  NodeState s0 = states[0];
  NodeState s1 = states[1];
  for (long r = 0; r < 100000; ++r) {
    s0.round = s1.round = r;
    ++joint[static_cast<std::size_t>(draw_constraint(s0, tau) * tau + draw_constraint(s1, tau))];
  }
  double chi2 = 0;
  for (int c : joint) chi2 += (c - 4000.0) * (c - 4000.0) / 4000.0;
  CHECK(chi2 < 51.18);
  CHECK_THROWS_AS(draw_constraint(states[0], 0), InvalidArgument);
}
