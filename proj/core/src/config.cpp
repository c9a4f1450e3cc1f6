#include "drfp/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace drfp {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

// Vector entries; null stands for an infinite bound of the given sign.
Vector vector_from(const json& j, const std::string& where, double null_value = std::nan("")) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_null() && !std::isnan(null_value)) {
      v[static_cast<Index>(i)] = null_value;
    } else {
      v[static_cast<Index>(i)] = number(j[i], where);
    }
  }
  return v;
}

json vector_to(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::isinf(v[i])) {
      out.push_back(nullptr);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

Matrix matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], where);
    }
  }
  return m;
}

json matrix_to(const Matrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

std::string kind_of(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto& k = need(j, "kind", where);
  if (!k.is_string()) fail(where, "'kind' must be a string");
  return k.get<std::string>();
}

template <class Fn>
auto wrap(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

const char* mode_name(GraphSpec::Mode m) {
  switch (m) {
    case GraphSpec::Mode::Static: return "static";
    case GraphSpec::Mode::Periodic: return "periodic";
    case GraphSpec::Mode::Random: return "random";
  }
  return "static";
}

}  // namespace

// ---------------------------------------------------------------------------
// Functions and sets

json function_to_json(const ConvexFunction& f) {
  return std::visit(
      Overloaded{
          [](const ConvexFunction::Affine& a) {
            return json{{"kind", "affine"}, {"a", vector_to(a.a)}, {"b", a.b}};
          },
          [](const ConvexFunction::Quadratic& q) {
            return json{{"kind", "quadratic"}, {"P", matrix_to(q.P)}, {"a", vector_to(q.a)}, {"b", q.b}};
          },
          [](const ConvexFunction::NormShift& n) {
            return json{{"kind", "norm_shift"}, {"center", vector_to(n.center)}, {"radius", n.radius}};
          },
          [](const ConvexFunction::PointwiseMax& m) {
            json branches = json::array();
            for (const auto& b : *m.branches) branches.push_back(function_to_json(b));
            return json{{"kind", "max"}, {"branches", std::move(branches)}};
          },
          [](const ConvexFunction::Embedded& e) {
            return json{{"kind", "embedded"},
                        {"inner", function_to_json(*e.inner)},
                        {"dim", e.dim},
                        {"linear", vector_to(e.linear)}};
          },
      },
      f.form());
}

ConvexFunction function_from_json(const json& j) {
  const std::string where = "function";
  const std::string kind = kind_of(j, where);
  return wrap(where + " '" + kind + "'", [&]() -> ConvexFunction {
    if (kind == "affine") {
      reject_unknown(j, where, {"kind", "a", "b"});
      return ConvexFunction::affine(vector_from(need(j, "a", where), where),
                                    j.contains("b") ? number(j["b"], where) : 0.0);
    }
    if (kind == "quadratic") {
      reject_unknown(j, where, {"kind", "P", "a", "b"});
      Matrix P = matrix_from(need(j, "P", where), where);
      Vector a = j.contains("a") ? vector_from(j["a"], where) : Vector(Vector::Zero(P.rows()));
      return ConvexFunction::quadratic(std::move(P), std::move(a),
                                       j.contains("b") ? number(j["b"], where) : 0.0);
    }
    if (kind == "norm_shift") {
      reject_unknown(j, where, {"kind", "center", "radius"});
      return ConvexFunction::norm_shift(vector_from(need(j, "center", where), where),
                                        j.contains("radius") ? number(j["radius"], where) : 0.0);
    }
    if (kind == "max") {
      reject_unknown(j, where, {"kind", "branches"});
      const auto& b = need(j, "branches", where);
      if (!b.is_array()) fail(where, "'branches' must be an array");
      std::vector<ConvexFunction> branches;
      for (const auto& item : b) branches.push_back(function_from_json(item));
      return ConvexFunction::pointwise_max(std::move(branches));
    }
    if (kind == "embedded") {
      reject_unknown(j, where, {"kind", "inner", "dim", "linear"});
      return ConvexFunction::embedded(function_from_json(need(j, "inner", where)),
                                      need(j, "dim", where).get<Index>(),
                                      vector_from(need(j, "linear", where), where));
    }
    fail(where, "unknown kind '" + kind + "'");
  });
}

json set_to_json(const SimpleSet& s) {
  return std::visit(
      Overloaded{
          [](const SimpleSet::Box& b) {
            return json{{"kind", "box"}, {"lower", vector_to(b.lower)}, {"upper", vector_to(b.upper)}};
          },
          [](const SimpleSet::Ball& b) {
            return json{{"kind", "ball"}, {"center", vector_to(b.center)}, {"radius", b.radius}};
          },
          [](const SimpleSet::HalfSpace& h) {
            return json{{"kind", "half_space"}, {"a", vector_to(h.a)}, {"b", h.b}};
          },
          [](const SimpleSet::Intersection& i) {
            json parts = json::array();
            for (const auto& p : *i.parts) parts.push_back(set_to_json(p));
            return json{{"kind", "intersection"}, {"parts", std::move(parts)}, {"tol", i.tol},
                        {"max_cycles", i.max_cycles}};
          },
          [](const SimpleSet::Extended& e) {
            return json{{"kind", "extended"}, {"inner", set_to_json(*e.inner)}, {"dim", e.dim}};
          },
      },
      s.form());
}

SimpleSet set_from_json(const json& j) {
  const std::string where = "set";
  const std::string kind = kind_of(j, where);
  return wrap(where + " '" + kind + "'", [&]() -> SimpleSet {
    if (kind == "box") {
      reject_unknown(j, where, {"kind", "lower", "upper"});
      return SimpleSet::box(vector_from(need(j, "lower", where), where, -kInf),
                            vector_from(need(j, "upper", where), where, kInf));
    }
    if (kind == "ball") {
      reject_unknown(j, where, {"kind", "center", "radius"});
      return SimpleSet::ball(vector_from(need(j, "center", where), where),
                             number(need(j, "radius", where), where));
    }
    if (kind == "half_space") {
      reject_unknown(j, where, {"kind", "a", "b"});
      return SimpleSet::half_space(vector_from(need(j, "a", where), where),
                                   number(need(j, "b", where), where));
    }
    if (kind == "intersection") {
      reject_unknown(j, where, {"kind", "parts", "tol", "max_cycles"});
      const auto& p = need(j, "parts", where);
      if (!p.is_array()) fail(where, "'parts' must be an array");
      std::vector<SimpleSet> parts;
      for (const auto& item : p) parts.push_back(set_from_json(item));
      return SimpleSet::intersection(std::move(parts), j.value("tol", 1e-10), j.value("max_cycles", 100000));
    }
    if (kind == "extended") {
      reject_unknown(j, where, {"kind", "inner", "dim"});
      return SimpleSet::extended(set_from_json(need(j, "inner", where)), need(j, "dim", where).get<Index>());
    }
    fail(where, "unknown kind '" + kind + "'");
  });
}

json problem_to_json(const ProblemSpec& p) {
  json nodes = json::array();
  for (const auto& node : p.node_problems()) {
    json constraints = json::array();
    for (const auto& g : node.constraints) constraints.push_back(function_to_json(g));
    nodes.push_back({{"objective", function_to_json(node.objective)}, {"constraints", std::move(constraints)}});
  }
  json out{{"X", set_to_json(p.common_set())}, {"nodes", std::move(nodes)}};
  if (p.witness()) out["witness"] = vector_to(*p.witness());
  return out;
}

ProblemSpec problem_from_json(const json& j) {
  const std::string where = "problem";
  reject_unknown(j, where, {"X", "nodes", "witness"});
  SimpleSet x = set_from_json(need(j, "X", where));
  const auto& nodes_json = need(j, "nodes", where);
  if (!nodes_json.is_array() || nodes_json.empty()) fail(where, "'nodes' must be a non-empty array");
  std::vector<NodeProblem> nodes;
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const std::string nw = where + ".nodes[" + std::to_string(i) + "]";
    const auto& nj = nodes_json[i];
    reject_unknown(nj, nw, {"objective", "constraints"});
    NodeProblem node{function_from_json(need(nj, "objective", nw)), {}};
    if (nj.contains("constraints")) {
      if (!nj["constraints"].is_array()) fail(nw, "'constraints' must be an array");
      for (const auto& g : nj["constraints"]) node.constraints.push_back(function_from_json(g));
    }
    nodes.push_back(std::move(node));
  }
  std::optional<Vector> witness;
  if (j.contains("witness")) witness = vector_from(j["witness"], where + ".witness");
  return wrap(where, [&] { return ProblemSpec(std::move(x), std::move(nodes), std::move(witness)); });
}

// ---------------------------------------------------------------------------
// Graph spec

GraphSequence GraphSpec::build(int problem_nodes) const {
  if (window < 1) throw ConfigError("graph: B must be >= 1");
  if (gamma < 0.0) throw ConfigError("graph: gamma must be >= 0");
  if (mode == Mode::Random) {
    if (nodes != 0 && nodes != problem_nodes) throw ConfigError("graph: node count differs from problem");
    RandomGraphParams params{problem_nodes, edge_probability, seed};
    const double g = gamma > 0.0 ? gamma : 1.0 / problem_nodes;
    return wrap("graph", [&] { return GraphSequence::seeded_random(params, window, g); });
  }
  const bool has_edges = !edge_lists.empty();
  const bool has_matrices = !matrices.empty();
  if (has_edges == has_matrices) throw ConfigError("graph: give exactly one of 'digraphs' or 'matrices'");
  const std::size_t count = has_edges ? edge_lists.size() : matrices.size();
  if (mode == Mode::Static && count != 1) throw ConfigError("graph: static mode takes exactly one graph");

  return wrap("graph", [&] {
    std::vector<WeightMatrix> cycle;
    if (has_edges) {
      std::vector<Digraph> graphs;
      int max_deg = 1;
      for (const auto& edges : edge_lists) {
        graphs.emplace_back(problem_nodes, edges);
        max_deg = std::max(max_deg, graphs.back().max_in_degree());
      }
      const double g = gamma > 0.0 ? gamma : 1.0 / max_deg;
      for (const auto& d : graphs) cycle.push_back(make_weight_matrix(d, g));
    } else {
      double min_positive = 1.0;
      for (const auto& m : matrices) {
        if (m.rows() != problem_nodes) throw ConfigError("graph: matrix size differs from problem node count");
        for (Index i = 0; i < m.size(); ++i) {
          const double v = m.data()[i];
          if (v > 0.0) min_positive = std::min(min_positive, v);
        }
      }
      const double g = gamma > 0.0 ? gamma : min_positive;
      for (const auto& m : matrices) cycle.emplace_back(m, g);
    }
    return GraphSequence::periodic(std::move(cycle), window);
  });
}

bool operator==(const GraphSpec& a, const GraphSpec& b) {
  if (a.matrices.size() != b.matrices.size()) return false;
  for (std::size_t i = 0; i < a.matrices.size(); ++i) {
    if (!same_values(a.matrices[i], b.matrices[i])) return false;
  }
  return a.mode == b.mode && a.window == b.window && a.gamma == b.gamma && a.edge_lists == b.edge_lists &&
         a.nodes == b.nodes && a.edge_probability == b.edge_probability && a.seed == b.seed &&
         a.enforce_connectivity == b.enforce_connectivity && a.horizon == b.horizon;
}

namespace {

json graph_to_json(const GraphSpec& g) {
  json out{{"mode", mode_name(g.mode)}, {"B", g.window}, {"gamma", g.gamma},
           {"enforce_connectivity", g.enforce_connectivity}, {"horizon", g.horizon}};
  if (g.mode == GraphSpec::Mode::Random) {
    out["nodes"] = g.nodes;
    out["edge_probability"] = g.edge_probability;
    out["seed"] = g.seed;
  }
  if (!g.edge_lists.empty()) {
    json lists = json::array();
    for (const auto& edges : g.edge_lists) {
      json e = json::array();
      for (const auto& [i, k] : edges) e.push_back({i, k});
      lists.push_back(std::move(e));
    }
    out["digraphs"] = std::move(lists);
  }
  if (!g.matrices.empty()) {
    json ms = json::array();
    for (const auto& m : g.matrices) ms.push_back(matrix_to(m));
    out["matrices"] = std::move(ms);
  }
  return out;
}

GraphSpec graph_from_json(const json& j) {
  const std::string where = "graph";
  reject_unknown(j, where, {"mode", "B", "gamma", "digraphs", "matrices", "nodes", "edge_probability", "seed",
                            "enforce_connectivity", "horizon"});
  GraphSpec g;
  const std::string mode = need(j, "mode", where).get<std::string>();
  if (mode == "static") {
    g.mode = GraphSpec::Mode::Static;
  } else if (mode == "periodic") {
    g.mode = GraphSpec::Mode::Periodic;
  } else if (mode == "random") {
    g.mode = GraphSpec::Mode::Random;
  } else {
    fail(where, "mode must be static, periodic or random");
  }
  g.window = j.value("B", 1);
  g.gamma = j.value("gamma", 0.0);
  g.nodes = j.value("nodes", 0);
  g.edge_probability = j.value("edge_probability", 0.0);
  g.seed = j.value("seed", std::uint64_t{0});
  g.enforce_connectivity = j.value("enforce_connectivity", true);
  g.horizon = j.value("horizon", 0L);
  if (j.contains("digraphs")) {
    for (const auto& edges : j["digraphs"]) {
      std::vector<Digraph::Edge> list;
      for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) fail(where, "edges are [receiver, sender] pairs");
        list.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      g.edge_lists.push_back(std::move(list));
    }
  }
  if (j.contains("matrices")) {
    for (const auto& m : j["matrices"]) g.matrices.push_back(matrix_from(m, where + ".matrices"));
  }
  return g;
}

json engine_to_json(const EngineSpec& e) {
  return json{{"algorithm", e.algorithm == Algorithm::Drfp ? "drfp" : "dgd"},
              {"path", e.path == EnginePath::Epigraph ? "epigraph" : "generic"},
              {"beta", e.beta},
              {"schedule", {{"a", e.schedule.a}, {"b", e.schedule.b}, {"p", e.schedule.p}}},
              {"variant",
               {{"objective_point", e.variant.objective_point == ObjectivePoint::AfterConstraintStep
                                        ? "after_constraint_step"
                                        : "mixed_point"},
                {"projections_per_round", e.variant.projections_per_round},
                {"farthest_set", e.variant.farthest_set}}}};
}

EngineSpec engine_from_json(const json& j) {
  const std::string where = "engine";
  reject_unknown(j, where, {"algorithm", "path", "beta", "schedule", "variant"});
  EngineSpec e;
  const std::string algo = j.value("algorithm", std::string("drfp"));
  if (algo == "drfp") {
    e.algorithm = Algorithm::Drfp;
  } else if (algo == "dgd") {
    e.algorithm = Algorithm::Dgd;
  } else {
    fail(where, "algorithm must be drfp or dgd");
  }
  const std::string path = j.value("path", std::string("epigraph"));
  if (path == "epigraph") {
    e.path = EnginePath::Epigraph;
  } else if (path == "generic") {
    e.path = EnginePath::Generic;
  } else {
    fail(where, "path must be epigraph or generic");
  }
  e.beta = j.value("beta", 1.0);
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    reject_unknown(s, where + ".schedule", {"a", "b", "p"});
    e.schedule.a = s.value("a", 1.0);
    e.schedule.b = s.value("b", 1.0);
    e.schedule.p = s.value("p", 1.0);
  }
  if (j.contains("variant")) {
    const auto& v = j["variant"];
    reject_unknown(v, where + ".variant", {"objective_point", "projections_per_round", "farthest_set"});
    const std::string point = v.value("objective_point", std::string("after_constraint_step"));
    if (point == "after_constraint_step") {
      e.variant.objective_point = ObjectivePoint::AfterConstraintStep;
    } else if (point == "mixed_point") {
      e.variant.objective_point = ObjectivePoint::AtMixedPoint;
    } else {
      fail(where, "objective_point must be after_constraint_step or mixed_point");
    }
    e.variant.projections_per_round = v.value("projections_per_round", 1);
    e.variant.farthest_set = v.value("farthest_set", false);
  }
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Run config

void RunConfig::validate() const {
  if (!problem.witness()) throw ConfigError("problem: a feasibility witness is required");
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (trace.every < 1) throw ConfigError("trace.every must be >= 1");
  if (!(trace.perron_tol > 0.0) || trace.perron_max_window < 0) throw ConfigError("trace: bad Perron settings");
  if (!(oracle.tol > 0.0)) throw ConfigError("oracle.tol must be positive");
  if (stopping.residual_threshold && !(*stopping.residual_threshold > 0.0)) {
    throw ConfigError("stopping.residual_threshold must be positive");
  }
  if (graph.horizon < 0) throw ConfigError("graph.horizon must be >= 0");
  wrap("engine", [&] {
    require_relaxation(engine.beta);
    engine.schedule.validate();
    engine.variant.validate();
    return 0;
  });
  (void)graph.build(problem.nodes());
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.name == b.name && a.problem_source == b.problem_source && a.problem == b.problem &&
         a.graph == b.graph && a.engine == b.engine && a.rounds == b.rounds && a.seeds == b.seeds &&
         a.trace == b.trace && a.stopping == b.stopping && a.oracle == b.oracle;
}

json config_to_json(const RunConfig& c) {
  json out;
  out["name"] = c.name;
  out["problem"] = problem_to_json(c.problem);
  if (!c.problem_source.empty()) out["problem_source"] = c.problem_source;
  out["graph"] = graph_to_json(c.graph);
  out["engine"] = engine_to_json(c.engine);
  out["rounds"] = c.rounds;
  out["seeds"] = c.seeds;
  out["trace"] = {{"every", c.trace.every},
                  {"verbose_scratch", c.trace.verbose_scratch},
                  {"perron_tol", c.trace.perron_tol},
                  {"perron_max_window", c.trace.perron_max_window}};
  out["stopping"] = {{"residual_threshold", c.stopping.residual_threshold
                                                ? json(*c.stopping.residual_threshold)
                                                : json(nullptr)}};
  out["oracle"] = {{"attach", c.oracle.attach}, {"tol", c.oracle.tol}};
  return out;
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "config";
  reject_unknown(j, where, {"name", "problem", "problem_source", "graph", "engine", "rounds", "seeds", "trace",
                            "stopping", "oracle"});
  return wrap(where, [&] {
    const auto& pj = need(j, "problem", where);
    std::string source = j.value("problem_source", std::string());
    json problem_json;
    if (pj.is_string()) {
      source = pj.get<std::string>();
      const auto path = base_dir.empty() ? std::filesystem::path(source) : base_dir / source;
      std::ifstream in(path);
      if (!in) fail(where, "cannot open problem file '" + path.string() + "'");
      problem_json = json::parse(in);
    } else {
      problem_json = pj;
    }
    RunConfig c(problem_from_json(problem_json));
    c.problem_source = source;
    c.name = j.value("name", std::string());
    c.graph = graph_from_json(need(j, "graph", where));
    if (j.contains("engine")) c.engine = engine_from_json(j["engine"]);
    c.rounds = need(j, "rounds", where).get<long>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("trace")) {
      const auto& t = j["trace"];
      reject_unknown(t, "trace", {"every", "verbose_scratch", "perron_tol", "perron_max_window"});
      c.trace.every = t.value("every", 1L);
      c.trace.verbose_scratch = t.value("verbose_scratch", false);
      c.trace.perron_tol = t.value("perron_tol", 1e-12);
      c.trace.perron_max_window = t.value("perron_max_window", 100000L);
    }
    if (j.contains("stopping")) {
      const auto& s = j["stopping"];
      reject_unknown(s, "stopping", {"residual_threshold"});
      if (s.contains("residual_threshold") && !s["residual_threshold"].is_null()) {
        c.stopping.residual_threshold = number(s["residual_threshold"], "stopping.residual_threshold");
      }
    }
    if (j.contains("oracle")) {
      const auto& o = j["oracle"];
      reject_unknown(o, "oracle", {"attach", "tol"});
      c.oracle.attach = o.value("attach", true);
      c.oracle.tol = o.value("tol", 1e-4);
    }
    return c;
  });
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace drfp
