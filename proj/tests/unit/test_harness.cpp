#include <doctest.h>

#include <sstream>

#include "drfp/harness.hpp"
#include "testing.hpp"

using namespace drfp;

namespace {
const std::string kFixtures = DRFP_FIXTURE_DIR;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

RunConfig two_node(long rounds) {
  auto c = load_config(kFixtures + "/configs/two_node_static.json");
  c.rounds = rounds;
  return c;
}

std::string trace_text(const RunResult& r, int n) {
  std::ostringstream out;
  write_trace_csv(out, r.trace, n);
  return out.str();
}
}  // namespace

TEST_CASE("metrics examples") {
  const auto c = two_node(0);
  auto states = initial_states(2, 1, 0);
  states[1].theta = vec({1});
  const auto r = metrics(states, vec({0.5, 0.5}), c.problem, std::nullopt);
  CHECK(r.max_consensus == 0.5);
  CHECK(r.node_consensus == std::vector<double>{0.5, 0.5});
  CHECK_FALSE(r.gap.has_value());

  // All states equal and feasible: both residuals vanish.
  const auto e = lift(c.problem);
  auto lifted = initial_states(2, 3, 0);
  for (auto& s : lifted) s.theta = vec({0.5, 0.25, 0.25});
  const OracleSolution opt{vec({0.5}), 0.5, 1e-4, OracleMethod::ClosedForm, 0.0, std::nullopt};
  const auto at_opt = metrics(lifted, vec({1.0 / 3, 2.0 / 3}), e, opt);
  CHECK(at_opt.max_consensus == 0.0);
  CHECK(at_opt.max_feasibility == 0.0);
  REQUIRE(at_opt.gap.has_value());
  CHECK(*at_opt.gap <= opt.tol);

  // Epigraph violation at the averaged state.
  for (auto& s : lifted) s.theta = vec({0.5, 0.0, 0.25});
  CHECK(metrics(lifted, vec({0.5, 0.5}), e, std::nullopt).max_feasibility == 0.25);
}

TEST_CASE("zero rounds gives the initial state only") {
  const auto r = run(two_node(0), 3);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].k == 0);
  CHECK(r.rounds_executed == 0);
  for (const auto& s : r.final_states) CHECK(s.theta == Vector::Zero(3));
}

TEST_CASE("runs are deterministic and traces are well formed") {
  auto c = two_node(300);
  c.trace.every = 7;
  const auto a = run(c, 11);
  const auto b = run(c, 11);
  CHECK(trace_text(a, 2) == trace_text(b, 2));
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].k > a.trace[i - 1].k);
  CHECK(a.trace.back().k == 300);
  for (const auto& rec : a.trace) {
    CHECK(rec.max_consensus >= 0.0);
    CHECK(rec.max_feasibility >= 0.0);
  }
  const std::string text = trace_text(a, 2);
  CHECK(text.rfind("k,zeta,max_consensus,max_feasibility,gap,per_node_consensus_1,per_node_consensus_2\n", 0) == 0);
}

TEST_CASE("all engine paths run from a config") {
  auto c = load_config(kFixtures + "/configs/four_node_periodic.json");
  c.rounds = 2000;
  c.trace.every = 2000;
  const auto oracle = solve_centralized(c.problem, 1e-4);
  const auto epi = run(c, 1, oracle);
  c.engine.path = EnginePath::Generic;
  const auto gen = run(c, 1, oracle);
  // Same seed, same arithmetic.
  for (std::size_t j = 0; j < epi.final_states.size(); ++j) {
    CHECK(drfp::testing::max_abs_diff(epi.final_states[j].theta, gen.final_states[j].theta) <= 1e-12);
  }
  c.engine.algorithm = Algorithm::Dgd;
  const auto dgd = run(c, 1, oracle);
  CHECK(dgd.final_states.front().theta.size() == 2);
  CHECK(dgd.trace.back().gap.has_value());
}

TEST_CASE("residual threshold stops early") {
  auto c = two_node(20000);
  c.trace.every = 10;
  c.stopping.residual_threshold = 0.05;
  const auto r = run(c, 0);
  CHECK(r.stop_reason == StopReason::ResidualThreshold);
  CHECK(r.rounds_executed < 20000);
  CHECK(r.trace.back().max_consensus <= 0.05);
  CHECK(r.trace.back().max_feasibility <= 0.05);
}

TEST_CASE("enforced connectivity refuses bad sequences") {
  auto c = load_config(kFixtures + "/configs/disconnected.json");
  CHECK_THROWS_AS(run(c, 0), ConnectivityError);
  c.graph.enforce_connectivity = false;
  CHECK_NOTHROW(run(c, 0));
}

TEST_CASE("verbose scratch is exported") {
  auto c = two_node(6);
  c.trace.every = 3;
  c.trace.verbose_scratch = true;
  const auto r = run(c, 0);
  REQUIRE(r.trace.size() == 3);
  CHECK_FALSE(r.trace[0].scratch.has_value());
  REQUIRE(r.trace[1].scratch.has_value());
  CHECK(r.trace[1].scratch->size() == 2);
  std::ostringstream out;
  write_scratch_csv(out, r.trace);
  CHECK(out.str().rfind("k,node,omega,p_1,p_2,p_3,q_1,q_2,q_3\n", 0) == 0);
}

TEST_CASE("summary and oracle json") {
  const auto c = two_node(50);
  const auto oracle = solve_centralized(c.problem, 1e-4);
  const auto r = run(c, 0, oracle);
  const auto s = run_summary(c, r, oracle);
  CHECK(s.at("rounds_executed") == 50);
  CHECK(s.at("stop_reason") == "round_budget");
  CHECK(config_from_json(s.at("config"), kFixtures + "/configs") == c);
  const auto back = oracle_from_json(to_json(oracle));
  CHECK(back.value == oracle.value);
  CHECK(back.x_star == oracle.x_star);
  CHECK(back.method == oracle.method);
}

TEST_CASE("compare on the unbalanced and balanced two-node graphs") {
  const auto c = two_node(20000);
  const auto r = compare_dgd_drfp(c, 0);
  CHECK(std::abs(r.pi[0] - 1.0 / 3) <= 1e-10);
  CHECK(std::abs(r.weighted.x_star[0] - 2.0 / 3) <= 1e-4);
  CHECK(r.dgd_error <= 1e-3);
  CHECK(r.drfp_error <= 1e-2);
  CHECK(r.separation >= 0.1);
  CHECK_FALSE(r.instance_error);

  auto balanced = c;
  balanced.graph.matrices = {Matrix::Constant(2, 2, 0.5)};
  const auto b = compare_dgd_drfp(balanced, 0);
  CHECK(std::abs(b.dgd_limit[0] - 0.5) <= 1e-3);
  CHECK(std::abs(b.drfp_limit[0] - 0.5) <= 1e-2);

  auto periodic = c;
  periodic.graph.mode = GraphSpec::Mode::Periodic;
  CHECK_THROWS_AS(compare_dgd_drfp(periodic, 0), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2) == "2");
}
