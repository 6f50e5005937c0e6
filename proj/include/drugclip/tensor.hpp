#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "drugclip/error.hpp"

namespace drugclip {

// Dense 64-bit float tensor, rank 1 (len) or rank 2 (rows x cols).
// Scalars are rank-1 tensors of length 1.
class Tensor {
 public:
  Tensor() = default;

  static Tensor vector(std::size_t len, double fill = 0.0) {
    Tensor t;
    t.rank_ = 1;
    t.rows_ = len;
    t.cols_ = 1;
    t.values_.assign(len, fill);
    return t;
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    Tensor t;
    t.rank_ = 2;
    t.rows_ = rows;
    t.cols_ = cols;
    t.values_.assign(rows * cols, fill);
    return t;
  }

  static Tensor scalar(double value) {
    Tensor t = vector(1);
    t.values_[0] = value;
    return t;
  }

  static Tensor from_values(std::vector<double> values) {
    Tensor t = vector(values.size());
    t.values_ = std::move(values);
    return t;
  }

  int rank() const { return rank_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool is_matrix() const { return rank_ == 2; }
  bool is_vector() const { return rank_ == 1; }
  bool is_scalar() const { return rank_ == 1 && values_.size() == 1; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double scalar_value() const {
    if (!is_scalar()) throw Error(ErrorKind::ShapeMismatch, "expected a scalar, got " + shape_string());
    return values_[0];
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const Tensor& other) const {
    return rank_ == other.rank_ && rows_ == other.rows_ && cols_ == other.cols_;
  }

  Tensor zeros_like() const {
    Tensor t = *this;
    t.values_.assign(values_.size(), 0.0);
    return t;
  }

  void fill(double v) { values_.assign(values_.size(), v); }

  bool all_finite() const;
  std::string shape_string() const;

 private:
  int rank_ = 1;
  std::size_t rows_ = 0;
  std::size_t cols_ = 1;
  std::vector<double> values_;
};

// Plain (non-differentiable) kernels shared by inference and tests.
double dot_product(const Tensor& a, const Tensor& b);
double l2_norm(const Tensor& a);

// Cosine per the similarity definition; each norm floored at 1e-12 so
// degenerate embeddings score 0 instead of dividing by zero.
double cosine_similarity(const Tensor& a, const Tensor& b);

}  // namespace drugclip
