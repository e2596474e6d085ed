#pragma once

#include <cstdint>
#include <vector>

#include "graphlim/graphon.hpp"

namespace graphlim {

// Fractional q-partition constant on the steps of a graphon: a k x q
// row-stochastic weight matrix plus the matching step lengths.
class StepFractionalPartition {
 public:
  StepFractionalPartition(std::vector<double> step_lengths, Mat weights);

  // Hard partition induced by a map step -> color.
  static StepFractionalPartition hard(std::vector<double> step_lengths,
                                      const std::vector<int>& colors, int q);
  static StepFractionalPartition uniform(std::vector<double> step_lengths, int q);
  // Constant rows equal to a (so alpha(rho) = a).
  static StepFractionalPartition constant_rows(std::vector<double> step_lengths,
                                               const std::vector<double>& a);

  int k() const { return static_cast<int>(step_lengths_.size()); }
  int q() const { return weights_.cols(); }
  const std::vector<double>& step_lengths() const { return step_lengths_; }
  double len(int mu) const { return step_lengths_[mu]; }
  const Mat& weights() const { return weights_; }
  double weight(int mu, int i) const { return weights_(mu, i); }

  std::vector<double> alpha() const;  // alpha(rho)

 private:
  std::vector<double> step_lengths_;
  Mat weights_;
};

// Finite approximation of a quotient set with its generation record.
struct QuotientSet {
  std::vector<Quotient> points;
  struct Meta {
    int q = 0;
    double mesh = 0.0;
    long long samples = 0;
    uint64_t seed = 0;
    // d1 covering radius bound of the generated net (infinity when the
    // sampler gives no guarantee), and the sup-norm bound it used.
    double covering_radius = 0.0;
    double winf_used = 0.0;
  } meta;
};

double d1(const Quotient& a, const Quotient& b);
// Step-weighted l1 distance between fractional partitions on a common
// step set.
double d1(const StepFractionalPartition& a, const StepFractionalPartition& b);

double hausdorff(const QuotientSet& a, const QuotientSet& b);
double hausdorff(const std::vector<Quotient>& a, const std::vector<Quotient>& b);

Quotient fractional_quotient(const StepGraphon& w, const StepFractionalPartition& rho);

// Finite eps-net of the fractional q-quotient set. Deterministic simplex
// grid per row when the grid fits the budget, seeded random rows
// otherwise; the meta block records the applicable covering radius.
QuotientSet sample_quotient_set(const StepGraphon& w, int q, double mesh, long long samples,
                                uint64_t seed);

double entropy(const StepFractionalPartition& rho);  // in [0, log q]

// Entropy of a probability vector (-sum a_i log a_i with 0 log 0 = 0).
double entropy_of(const std::vector<double>& a);

}  // namespace graphlim
