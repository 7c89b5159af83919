#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bco/errors.hpp"

namespace bco {

// Dense row-major matrix of doubles. Just enough linear algebra for small
// feed-forward networks; anything heavier is out of scope.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

// y = A x
inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.cols)
    throw ConfigError("matvec: vector length does not match matrix columns");
  std::vector<double> y(a.rows, 0.0);
  for (int r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    const double* row = a.data.data() + static_cast<std::size_t>(r) * a.cols;
    for (int c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

// y = A^T x
inline std::vector<double> matvec_transposed(const Matrix& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.rows)
    throw ConfigError("matvec_transposed: vector length does not match matrix rows");
  std::vector<double> y(a.cols, 0.0);
  for (int r = 0; r < a.rows; ++r) {
    const double xr = x[r];
    const double* row = a.data.data() + static_cast<std::size_t>(r) * a.cols;
    for (int c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
  }
  return y;
}

// A += scale * u v^T
inline void add_outer(Matrix& a, const std::vector<double>& u, const std::vector<double>& v,
                      double scale = 1.0) {
  for (int r = 0; r < a.rows; ++r) {
    const double ur = scale * u[r];
    double* row = a.data.data() + static_cast<std::size_t>(r) * a.cols;
    for (int c = 0; c < a.cols; ++c) row[c] += ur * v[c];
  }
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace bco
