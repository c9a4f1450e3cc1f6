#include "drfp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drfp/rng.hpp"
#include "drfp/scc.hpp"

namespace drfp {

Digraph::Digraph(int n, const std::vector<Edge>& edges) : n_(n) {
  if (n < 1) throw InvalidArgument("Digraph: need at least one node");
  edges_.reserve(edges.size() + static_cast<std::size_t>(n));
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n) {
      throw InvalidArgument("Digraph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of range for n=" + std::to_string(n));
    }
    edges_.emplace_back(i, j);
  }
  for (int i = 0; i < n; ++i) edges_.emplace_back(i, i);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  in_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [i, j] : edges_) in_[static_cast<std::size_t>(i)].push_back(j);
}

bool Digraph::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

int Digraph::max_in_degree() const {
  std::size_t best = 0;
  for (const auto& in : in_) best = std::max(best, in.size());
  return static_cast<int>(best);
}

std::vector<Digraph::Edge> Digraph::proper_edges() const {
  std::vector<Edge> out;
  for (const auto& e : edges_) {
    if (e.first != e.second) out.push_back(e);
  }
  return out;
}

bool Digraph::strongly_connected() const {
  // Information flows j -> i along edge (i, j).
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n_));
  for (const auto& [i, j] : edges_) {
    if (i != j) succ[static_cast<std::size_t>(j)].push_back(i);
  }
  return strongly_connected_components(succ).count == 1;
}

Digraph Digraph::union_of(std::span<const Digraph> graphs) {
  if (graphs.empty()) throw InvalidArgument("Digraph::union_of: empty list");
  const int n = graphs.front().size();
  std::vector<Edge> all;
  for (const auto& g : graphs) {
    if (g.size() != n) throw DimensionError("Digraph::union_of: node counts differ");
    all.insert(all.end(), g.edges().begin(), g.edges().end());
  }
  return Digraph(n, all);
}

WeightMatrix::WeightMatrix(Matrix a, double gamma) : a_(std::move(a)), gamma_(gamma) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) throw DimensionError("WeightMatrix: must be square");
  if (!(gamma_ > 0.0 && gamma_ <= 1.0)) throw InvalidArgument("WeightMatrix: gamma must be in (0, 1]");
  for (Index i = 0; i < a_.rows(); ++i) {
    double sum = 0.0;
    for (Index j = 0; j < a_.cols(); ++j) {
      const double v = a_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("WeightMatrix: entries must be >= 0");
      if (v > 0.0 && v < gamma_) {
        throw InvalidArgument("WeightMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") below gamma");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InvalidArgument("WeightMatrix: row " + std::to_string(i) + " sums to " +
                            std::to_string(sum) + ", not 1");
    }
    if (a_(i, i) <= 0.0) throw InvalidArgument("WeightMatrix: diagonal must be positive");
  }
}

Digraph WeightMatrix::support() const {
  std::vector<Digraph::Edge> edges;
  for (Index i = 0; i < a_.rows(); ++i) {
    for (Index j = 0; j < a_.cols(); ++j) {
      if (a_(i, j) > 0.0) edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return Digraph(size(), edges);
}

WeightMatrix make_weight_matrix(const Digraph& g, double gamma) {
  if (!(gamma > 0.0) || gamma * g.max_in_degree() > 1.0) {
    throw InvalidArgument("make_weight_matrix: gamma=" + std::to_string(gamma) +
                          " infeasible for max in-degree " + std::to_string(g.max_in_degree()));
  }
  const int n = g.size();
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& in = g.in_neighbors(i);
    const double w = 1.0 / static_cast<double>(in.size());
    for (int j : in) a(i, j) = w;
  }
  return WeightMatrix(std::move(a), gamma);
}

GraphSequence GraphSequence::static_graph(WeightMatrix a, int window) {
  return periodic({std::move(a)}, window);
}

GraphSequence GraphSequence::periodic(std::vector<WeightMatrix> cycle, int window) {
  if (cycle.empty()) throw InvalidArgument("GraphSequence: empty cycle");
  if (window < 1) throw InvalidArgument("GraphSequence: window must be >= 1");
  GraphSequence seq;
  seq.mode_ = cycle.size() == 1 ? SequenceMode::Static : SequenceMode::Periodic;
  seq.n_ = cycle.front().size();
  seq.window_ = window;
  seq.gamma_ = cycle.front().gamma();
  for (const auto& a : cycle) {
    if (a.size() != seq.n_) throw DimensionError("GraphSequence: matrix sizes differ");
    seq.gamma_ = std::min(seq.gamma_, a.gamma());
  }
  seq.cycle_ = std::move(cycle);
  return seq;
}

GraphSequence GraphSequence::seeded_random(const RandomGraphParams& params, int window, double gamma) {
  if (params.nodes < 1) throw InvalidArgument("GraphSequence: random mode needs nodes >= 1");
  if (window < 1) throw InvalidArgument("GraphSequence: window must be >= 1");
  if (!(params.edge_probability >= 0.0 && params.edge_probability <= 1.0)) {
    throw InvalidArgument("GraphSequence: edge_probability must be in [0, 1]");
  }
  if (!(gamma > 0.0) || gamma * params.nodes > 1.0) {
    throw InvalidArgument("GraphSequence: gamma must satisfy 0 < gamma <= 1/n in random mode");
  }
  GraphSequence seq;
  seq.mode_ = SequenceMode::SeededRandom;
  seq.n_ = params.nodes;
  seq.window_ = window;
  seq.gamma_ = gamma;
  seq.random_ = params;
  return seq;
}

Digraph GraphSequence::random_graph(long k) const {
  const int n = n_;
  // Any window of B consecutive rounds contains one whole aligned block of
  // length L when B >= 2L - 1.
  const long block_len = (window_ + 1) / 2;
  const long block = k / block_len;
  const long offset = k % block_len;

  std::vector<Digraph::Edge> edges;
  if (n > 1) {
    CounterStream block_rng(derive_key({random_.seed, 0x626c6f636bULL, static_cast<std::uint64_t>(block)}));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto r = static_cast<int>(block_rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(r)]);
    }
    for (int e = 0; e < n; ++e) {
      const int from = perm[static_cast<std::size_t>(e)];
      const int to = perm[static_cast<std::size_t>((e + 1) % n)];
      const auto slot = static_cast<long>(block_rng.uniform_index(static_cast<std::uint64_t>(block_len)));
      if (slot == offset) edges.emplace_back(to, from);
    }
    CounterStream round_rng(derive_key({random_.seed, 0x726f756e64ULL, static_cast<std::uint64_t>(k)}));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (round_rng.uniform01() < random_.edge_probability) edges.emplace_back(i, j);
      }
    }
  }
  return Digraph(n, edges);
}

WeightMatrix GraphSequence::matrix(long k) const {
  if (k < 0) throw InvalidArgument("GraphSequence: negative round index");
  if (mode_ == SequenceMode::SeededRandom) return make_weight_matrix(random_graph(k), gamma_);
  return cycle_[static_cast<std::size_t>(k) % cycle_.size()];
}

Digraph GraphSequence::graph(long k) const {
  if (mode_ == SequenceMode::SeededRandom) {
    if (k < 0) throw InvalidArgument("GraphSequence: negative round index");
    return random_graph(k);
  }
  return matrix(k).support();
}

bool check_joint_connectivity(const GraphSequence& seq, int window, long horizon) {
  if (window < 1) throw InvalidArgument("check_joint_connectivity: window must be >= 1");
  if (horizon < window) throw InvalidArgument("check_joint_connectivity: horizon must be >= window");
  // Periodic sequences repeat windows after one period.
  long last_start = horizon - window;
  if (seq.mode() != SequenceMode::SeededRandom) {
    last_start = std::min<long>(last_start, static_cast<long>(seq.period()) - 1);
  }
  std::vector<Digraph> graphs;
  graphs.reserve(static_cast<std::size_t>(window));
  for (long t = 0; t <= last_start; ++t) {
    graphs.clear();
    for (long s = t; s < t + window; ++s) graphs.push_back(seq.graph(s));
    if (!Digraph::union_of(graphs).strongly_connected()) return false;
  }
  return true;
}

Matrix backward_product(const GraphSequence& seq, long k, long s) {
  if (k < 0) throw InvalidArgument("backward_product: k must be >= 0");
  if (s < k) throw InvalidArgument("backward_product: need s >= k");
  Matrix p = Matrix::Identity(seq.size(), seq.size());
  for (long l = k; l < s; ++l) p = seq.matrix(l).matrix() * p;
  return p;
}

namespace {

double column_spread(const Matrix& p) {
  double spread = 0.0;
  for (Index j = 0; j < p.cols(); ++j) {
    spread = std::max(spread, p.col(j).maxCoeff() - p.col(j).minCoeff());
  }
  return spread;
}

}  // namespace

PerronEstimate estimate_pi(const GraphSequence& seq, long k, double tol, long max_window) {
  if (k < 0) throw InvalidArgument("estimate_pi: k must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("estimate_pi: tol must be positive");
  if (max_window < 0) throw InvalidArgument("estimate_pi: max_window must be >= 0");
  Matrix p = Matrix::Identity(seq.size(), seq.size());
  long used = 0;
  double spread = column_spread(p);
  while (spread > tol && used < max_window) {
    p = seq.matrix(k + used).matrix() * p;
    ++used;
    spread = column_spread(p);
  }
  PerronEstimate est;
  est.k = k;
  est.pi = p.row(0).transpose().cwiseMax(0.0);
  est.pi /= est.pi.sum();
  est.residual = spread;
  est.window_used = used;
  return est;
}

double perron_consistency(const Vector& pi_k, const Vector& pi_next, const WeightMatrix& a_k) {
  require_dim(pi_k, a_k.size(), "perron_consistency");
  require_dim(pi_next, a_k.size(), "perron_consistency");
  const Vector pushed = a_k.matrix().transpose() * pi_next;
  return (pi_k - pushed).cwiseAbs().maxCoeff();
}

double perron_lower_bound(double gamma, int n, int window) {
  return std::pow(gamma, static_cast<double>(n - 1) * window);
}

}  // namespace drfp
