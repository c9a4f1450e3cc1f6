#pragma once

// Shared generators and brute-force references for the test suites.

#include <random>
#include <vector>

#include "drfp/convex.hpp"
#include "drfp/graph.hpp"
#include "drfp/sets.hpp"

namespace drfp::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Vector random_vector(Rng& rng, Index d, double scale = 1.0) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

inline Matrix random_psd(Rng& rng, Index d) {
  Matrix b(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) b(i, j) = uniform(rng, -1.0, 1.0);
  Matrix p = b.transpose() * b;
  return 0.5 * (p + p.transpose());
}

// An affine, quadratic or norm-shift function with h(z) = -slack.
inline ConvexFunction random_elementary(Rng& rng, Index d, const Vector& z, double slack) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: {
      const Vector a = random_vector(rng, d, 2.0);
      return ConvexFunction::affine(a, -a.dot(z) - slack);
    }
    case 1: {
      const Matrix p = random_psd(rng, d);
      const Vector a = random_vector(rng, d, 2.0);
      return ConvexFunction::quadratic(p, a, -(0.5 * z.dot(p * z) + a.dot(z)) - slack);
    }
    default: {
      const Vector c = random_vector(rng, d, 2.0);
      return ConvexFunction::norm_shift(c, (z - c).norm() + slack);
    }
  }
}

// Random convex function (possibly a pointwise max) with h(z) <= 0.
inline ConvexFunction random_function_feasible_at(Rng& rng, Index d, const Vector& z) {
  if (uniform_int(rng, 0, 3) == 0) {
    std::vector<ConvexFunction> branches;
    const int count = uniform_int(rng, 2, 4);
    for (int i = 0; i < count; ++i) branches.push_back(random_elementary(rng, d, z, uniform(rng, 0.0, 1.0)));
    return ConvexFunction::pointwise_max(std::move(branches));
  }
  return random_elementary(rng, d, z, uniform(rng, 0.0, 1.0));
}

inline ConvexFunction random_function(Rng& rng, Index d) {
  const Vector z = random_vector(rng, d, 3.0);
  return random_function_feasible_at(rng, d, z);
}

// Edges (i, j), i != j, each kept with probability p.
inline std::vector<Digraph::Edge> random_edges(Rng& rng, int n, double p) {
  std::vector<Digraph::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && uniform(rng, 0.0, 1.0) < p) edges.emplace_back(i, j);
  return edges;
}

// Reachability closure by repeated squaring of the boolean union matrix.
inline bool brute_force_strongly_connected(const std::vector<std::vector<bool>>& adj) {
  const std::size_t n = adj.size();
  auto reach = adj;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t via = 0; via < n; ++via)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][via] && reach[via][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

inline bool brute_force_joint_connectivity(const GraphSequence& seq, int window, long horizon) {
  const int n = seq.size();
  for (long t = 0; t + window <= horizon; ++t) {
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (long s = t; s < t + window; ++s) {
      const Matrix a = seq.matrix(s).matrix();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (a(i, j) > 0.0) adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    }
    if (!brute_force_strongly_connected(adj)) return false;
  }
  return true;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace drfp::testing
