#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drfp/linalg.hpp"

namespace drfp {

// Directed graph on nodes 0..n-1. An edge (i, j) means node i receives
// from node j. Self-loops (i, i) are always present.
class Digraph {
 public:
  using Edge = std::pair<int, int>;

  Digraph(int n, const std::vector<Edge>& edges);

  int size() const { return n_; }
  // Sorted, unique, self-loops included.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& in_neighbors(int i) const { return in_[static_cast<std::size_t>(i)]; }
  bool has_edge(int i, int j) const;
  int max_in_degree() const;
  // Edges other than self-loops.
  std::vector<Edge> proper_edges() const;

  bool strongly_connected() const;

  static Digraph union_of(std::span<const Digraph> graphs);

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> in_;
};

// Row-stochastic mixing matrix whose positive entries are all >= gamma and
// whose diagonal is positive.
class WeightMatrix {
 public:
  WeightMatrix(Matrix a, double gamma);

  int size() const { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const { return a_; }
  double gamma() const { return gamma_; }
  double operator()(int i, int j) const { return a_(i, j); }
  // Graph of the positive entries.
  Digraph support() const;

 private:
  Matrix a_;
  double gamma_;
};

// Equal weights over in-neighbors (self included).
WeightMatrix make_weight_matrix(const Digraph& g, double gamma);

enum class SequenceMode { Static, Periodic, SeededRandom };

struct RandomGraphParams {
  int nodes = 0;
  double edge_probability = 0.0;  // for extra edges on top of the cycle overlay
  std::uint64_t seed = 0;
};

// A sequence {A^k} of weight matrices. Static and periodic sequences store
// their matrices; the seeded-random mode computes A^k as a pure function of
// (seed, k). Random sequences overlay a random Hamiltonian cycle on every
// aligned block of ceil-half the window, so each window of `window()`
// consecutive rounds has a strongly connected union.
class GraphSequence {
 public:
  static GraphSequence static_graph(WeightMatrix a, int window = 1);
  static GraphSequence periodic(std::vector<WeightMatrix> cycle, int window);
  static GraphSequence seeded_random(const RandomGraphParams& params, int window, double gamma);

  SequenceMode mode() const { return mode_; }
  int size() const { return n_; }
  int window() const { return window_; }
  double gamma() const { return gamma_; }
  std::size_t period() const { return cycle_.size(); }

  WeightMatrix matrix(long k) const;
  Digraph graph(long k) const;

 private:
  GraphSequence() = default;
  Digraph random_graph(long k) const;

  SequenceMode mode_ = SequenceMode::Static;
  int n_ = 0;
  int window_ = 1;
  double gamma_ = 0.0;
  std::vector<WeightMatrix> cycle_;
  RandomGraphParams random_{};
};

// True iff every union of `window` consecutive graphs starting at
// t = 0..horizon-window is strongly connected.
bool check_joint_connectivity(const GraphSequence& seq, int window, long horizon);

// A^{s-1} ... A^k, with A^{k:k} = I.
Matrix backward_product(const GraphSequence& seq, long k, long s);

struct PerronEstimate {
  long k = 0;
  Vector pi;
  // Largest column spread max_{i,i'} |a^{s:k}_{ij} - a^{s:k}_{i'j}| at the
  // product used; bounds the error of each entry.
  double residual = 0.0;
  long window_used = 0;
};

PerronEstimate estimate_pi(const GraphSequence& seq, long k, double tol, long max_window);

// ||pi^k' - pi^{k+1}' A^k||_inf
double perron_consistency(const Vector& pi_k, const Vector& pi_next, const WeightMatrix& a_k);

// gamma^{(n-1) B}
double perron_lower_bound(double gamma, int n, int window);

}  // namespace drfp
