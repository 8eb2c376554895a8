#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "skewgof/matrix.hpp"

namespace skewgof {

// n observations of dimension p, row-major and contiguous.
class Sample {
 public:
  Sample() = default;
  Sample(std::size_t n, std::size_t p) : n_(n), p_(p), x_(n * p, 0.0) {
    if (p == 0) throw std::invalid_argument("Sample: dimension must be >= 1");
  }

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }

  double& operator()(std::size_t i, std::size_t j) { return x_[i * p_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return x_[i * p_ + j]; }

  double* row(std::size_t i) { return x_.data() + i * p_; }
  const double* row(std::size_t i) const { return x_.data() + i * p_; }

  const std::vector<double>& data() const { return x_; }

  bool finite() const {
    for (double v : x_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Vec row_vec(std::size_t i) const { return Vec(row(i), row(i) + p_); }

  Vec column_mean() const {
    Vec m(p_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < p_; ++j) m[j] += (*this)(i, j);
    for (double& v : m) v /= static_cast<double>(n_);
    return m;
  }

  Matrix covariance() const {
    if (n_ < 2) throw std::invalid_argument("covariance: need n >= 2");
    Vec m = column_mean();
    Matrix c(p_, p_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < p_; ++a) {
        double da = (*this)(i, a) - m[a];
        for (std::size_t b = a; b < p_; ++b) c(a, b) += da * ((*this)(i, b) - m[b]);
      }
    for (std::size_t a = 0; a < p_; ++a)
      for (std::size_t b = a; b < p_; ++b) c(b, a) = c(a, b) /= static_cast<double>(n_ - 1);
    return c;
  }

 private:
  std::size_t n_ = 0, p_ = 0;
  std::vector<double> x_;
};

}  // namespace skewgof
