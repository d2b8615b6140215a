#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "taman/errors.hpp"

namespace taman {

/// Dense row-major matrix. Element type is float in the production path;
/// the double instantiation backs verification code. Reductions accumulate
/// in double regardless of the element type.
template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), T(0)) {
    if (r < 0 || c < 0) fail(ErrorKind::Shape, "negative matrix dimension " + shape_str());
  }
  Mat(int r, int c, std::vector<T> values) : rows(r), cols(c), v(std::move(values)) {
    if (v.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(c))
      fail(ErrorKind::Shape, "value count " + std::to_string(v.size()) + " does not fill " + shape_str());
  }
  Mat(std::initializer_list<std::initializer_list<T>> init) {
    rows = static_cast<int>(init.size());
    cols = rows == 0 ? 0 : static_cast<int>(init.begin()->size());
    v.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols)
        fail(ErrorKind::Shape, "ragged initializer row");
      v.insert(v.end(), row.begin(), row.end());
    }
  }

  T& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  const T& operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  std::span<T> row(int r) { return {v.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
  std::span<const T> row(int r) const {
    return {v.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }

  std::size_t size() const { return v.size(); }
  bool same_shape(const Mat& other) const { return rows == other.rows && cols == other.cols; }
  std::string shape_str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

  void fill(T value) { std::fill(v.begin(), v.end(), value); }
  void zero() { fill(T(0)); }

  bool all_finite() const {
    for (T x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }
};

using MatF = Mat<float>;
using MatD = Mat<double>;

template <class To, class From>
Mat<To> mat_cast(const Mat<From>& m) {
  Mat<To> out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.v.size(); ++i) out.v[i] = static_cast<To>(m.v[i]);
  return out;
}

template <class T>
void check_same_shape(const Mat<T>& a, const Mat<T>& b, const char* what) {
  if (!a.same_shape(b))
    fail(ErrorKind::Shape, std::string(what) + ": " + a.shape_str() + " vs " + b.shape_str());
}

/// C = A * B with per-entry double accumulation.
template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols != b.rows)
    fail(ErrorKind::Shape, "matmul inner dims " + std::to_string(a.cols) + " vs " + std::to_string(b.rows));
  Mat<T> c(a.rows, b.cols);
  std::vector<double> acc(static_cast<std::size_t>(b.cols));
  for (int i = 0; i < a.rows; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const T* arow = a.v.data() + static_cast<std::size_t>(i) * a.cols;
    for (int k = 0; k < a.cols; ++k) {
      const double aik = static_cast<double>(arow[k]);
      if (aik == 0.0) continue;
      const T* brow = b.v.data() + static_cast<std::size_t>(k) * b.cols;
      for (int j = 0; j < b.cols; ++j) acc[j] += aik * static_cast<double>(brow[j]);
    }
    T* crow = c.v.data() + static_cast<std::size_t>(i) * c.cols;
    for (int j = 0; j < b.cols; ++j) crow[j] = static_cast<T>(acc[j]);
  }
  return c;
}

/// C = A^T * B (A is k x m, B is k x n, result m x n).
template <class T>
Mat<T> matmul_transpose_a(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows != b.rows)
    fail(ErrorKind::Shape, "matmul_transpose_a rows " + std::to_string(a.rows) + " vs " + std::to_string(b.rows));
  Mat<double> acc(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const T* arow = a.v.data() + static_cast<std::size_t>(k) * a.cols;
    const T* brow = b.v.data() + static_cast<std::size_t>(k) * b.cols;
    for (int i = 0; i < a.cols; ++i) {
      const double aki = static_cast<double>(arow[i]);
      if (aki == 0.0) continue;
      double* crow = acc.v.data() + static_cast<std::size_t>(i) * b.cols;
      for (int j = 0; j < b.cols; ++j) crow[j] += aki * static_cast<double>(brow[j]);
    }
  }
  Mat<T> c(a.cols, b.cols);
  for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] = static_cast<T>(acc.v[i]);
  return c;
}

/// C = A * B^T (A is m x k, B is n x k, result m x n).
template <class T>
Mat<T> matmul_transpose_b(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols != b.cols)
    fail(ErrorKind::Shape, "matmul_transpose_b cols " + std::to_string(a.cols) + " vs " + std::to_string(b.cols));
  Mat<T> c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const T* arow = a.v.data() + static_cast<std::size_t>(i) * a.cols;
    for (int j = 0; j < b.rows; ++j) {
      const T* brow = b.v.data() + static_cast<std::size_t>(j) * b.cols;
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += static_cast<double>(arow[k]) * static_cast<double>(brow[k]);
      c(i, j) = static_cast<T>(acc);
    }
  }
  return c;
}

/// Adds a 1 x cols bias row to every row of m.
template <class T>
void add_bias_rows(Mat<T>& m, const Mat<T>& bias) {
  if (bias.rows != 1 || bias.cols != m.cols)
    fail(ErrorKind::Shape, "bias " + bias.shape_str() + " does not broadcast over " + m.shape_str());
  for (int i = 0; i < m.rows; ++i) {
    T* row = m.v.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) row[j] += bias.v[j];
  }
}

/// Column sums as a 1 x cols matrix (double accumulation).
template <class T>
Mat<T> column_sums(const Mat<T>& m) {
  Mat<T> out(1, m.cols);
  std::vector<double> acc(static_cast<std::size_t>(m.cols), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const T* row = m.v.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) acc[j] += static_cast<double>(row[j]);
  }
  for (int j = 0; j < m.cols; ++j) out.v[j] = static_cast<T>(acc[j]);
  return out;
}

/// Column means as a double vector (double accumulation).
template <class T>
std::vector<double> column_means(const Mat<T>& m) {
  if (m.rows == 0) fail(ErrorKind::Batch, "column_means on empty matrix");
  std::vector<double> acc(static_cast<std::size_t>(m.cols), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const T* row = m.v.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) acc[j] += static_cast<double>(row[j]);
  }
  for (double& x : acc) x /= m.rows;
  return acc;
}

template <class T>
void axpy(Mat<T>& y, double alpha, const Mat<T>& x) {
  check_same_shape(y, x, "axpy");
  for (std::size_t i = 0; i < y.v.size(); ++i)
    y.v[i] = static_cast<T>(static_cast<double>(y.v[i]) + alpha * static_cast<double>(x.v[i]));
}

template <class T>
void scale_inplace(Mat<T>& m, double alpha) {
  for (T& x : m.v) x = static_cast<T>(static_cast<double>(x) * alpha);
}

}  // namespace taman
