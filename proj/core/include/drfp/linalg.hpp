#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <string>

#include "drfp/error.hpp"

namespace drfp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// Left-to-right accumulation. Kept sequential so that the two engine
// paths (specialized and generic) see bit-identical denominators.
inline double squared_norm(const Vector& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return s;
}

inline Vector unit_vector(Index dim, Index axis) {
  Vector e = Vector::Zero(dim);
  e[axis] = 1.0;
  return e;
}

inline void require_dim(const Vector& y, Index expected, const char* what) {
  if (y.size() != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(y.size()));
  }
}

inline bool same_values(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

inline bool same_values(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

}  // namespace drfp
