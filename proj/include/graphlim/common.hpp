#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphlim {

// Error taxonomy shared by all modules. The CLI maps these to exit codes
// (validation -> 2, budget -> 3, infeasible -> 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Dense square matrix stored row-major. Sizes in this library are small
// (q x q couplings, k x k step values), so a flat vector is all we need.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static Mat square(int n, double fill = 0.0) { return Mat(n, n, fill); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  bool is_symmetric_exact() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

  double sum_abs() const {
    double s = 0.0;
    for (double v : a_) s += std::fabs(v);
    return s;
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

inline double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

// log(sum exp(x_i)) with the usual max shift; -inf for an empty list.
inline double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Canonical 12-digit rounding used for deduplication of enumerated
// quotients; values here are bounded by 1 in absolute value.
inline long long round12(double x) { return llround(x * 1e12); }

inline double pow_checked(double q, int n, double cap) {
  // q^n but saturating at cap to avoid overflow in budget guards.
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    v *= q;
    if (v > cap) return cap + 1.0;
  }
  return v;
}

}  // namespace graphlim
