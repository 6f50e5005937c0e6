#include "drugclip/tensor.hpp"

#include <cmath>

namespace drugclip {

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string() const {
  if (rank_ == 1) return "(" + std::to_string(rows_) + ",)";
  return "(" + std::to_string(rows_) + "," + std::to_string(cols_) + ")";
}

double dot_product(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch, "dot: " + a.shape_string() + " vs " + b.shape_string());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(const Tensor& a) { return std::sqrt(dot_product(a, a)); }

double cosine_similarity(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch, "cosine: " + a.shape_string() + " vs " + b.shape_string());
  }
  constexpr double kNormFloor = 1e-12;
  double na = std::max(l2_norm(a), kNormFloor);
  double nb = std::max(l2_norm(b), kNormFloor);
  return dot_product(a, b) / (na * nb);
}

}  // namespace drugclip
