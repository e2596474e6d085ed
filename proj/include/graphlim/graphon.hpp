#pragma once

#include <limits>
#include <vector>

#include "graphlim/graph.hpp"

namespace graphlim {

// Symmetric piecewise-constant function on [0,1]^2: k positive step
// lengths summing to 1 and a symmetric k x k value matrix.
class StepGraphon {
 public:
  StepGraphon(std::vector<double> step_lengths, Mat values);

  static StepGraphon constant(double c);
  static StepGraphon zero() { return constant(0.0); }

  int k() const { return static_cast<int>(step_lengths_.size()); }
  const std::vector<double>& step_lengths() const { return step_lengths_; }
  double len(int i) const { return step_lengths_[i]; }
  const Mat& values() const { return values_; }
  double value(int i, int j) const { return values_(i, j); }

  double integral() const;       // ∫ W
  double max_abs_value() const;  // ess sup |W| for a step function

  // Value at a point of [0,1]^2 (used by samplers).
  double at(double x, double y) const;

  bool operator==(const StepGraphon& o) const {
    return step_lengths_ == o.step_lengths_ && values_ == o.values_;
  }

 private:
  std::vector<double> step_lengths_;
  Mat values_;
};

// Certified interval for a distance (or similar) quantity.
struct DistanceBound {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool exact = false;
};

struct TailCheckResult {
  bool pass = true;
  double worst_eps = 0.0;   // first grid eps violated (0 if none)
  double worst_tail = 0.0;  // tail integral at the violation
};

StepGraphon embed(const WeightedGraph& g);      // W^G
StepGraphon normalize(const WeightedGraph& g);  // W^G / ||G||_1, zero if degenerate

double graphon_lp_norm(const StepGraphon& w, double p);

// Exact cut norm via 2^k subset enumeration over the step set; the
// supremum for a step function is attained on unions of steps.
double cut_norm_exact(const StepGraphon& w, int kmax = 24);

// Alternating-maximization local search; always a valid lower bound.
double cut_norm_lower(const StepGraphon& w, int restarts, uint64_t seed);

// Averages W over groups of steps (the groups partition the step set).
StepGraphon average_graphon(const StepGraphon& w, const std::vector<std::vector<int>>& groups);

// Common refinement of two step sets: merged lengths plus source step
// index per refined cell.
struct Refinement {
  std::vector<double> lens;
  std::vector<int> idx_a;
  std::vector<int> idx_b;
};
Refinement common_refinement(const std::vector<double>& lens_a, const std::vector<double>& lens_b);

// W - U overlaid on the common refinement (values within 1e-12 snap to 0).
StepGraphon overlay_difference(const StepGraphon& a, const StepGraphon& b);

// Certified interval for the cut distance. Upper bounds come from
// explicit measure-preserving overlays (exhaustive permutations of a
// common equal-length grid when one exists with at most `budget` cells,
// heuristic alignment otherwise); lower bounds from the q-quotient
// Hausdorff route and |∫U − ∫W|.
DistanceBound cut_distance(const StepGraphon& u, const StepGraphon& w, int budget = 8,
                           uint64_t seed = 0);

DistanceBound normalized_cut_distance(const WeightedGraph& g, const WeightedGraph& g2,
                                      int budget = 8, uint64_t seed = 0);

// Verifies ∫ |W| 1[|W| >= K(eps)] <= eps at every grid point of the
// supplied (eps, K(eps)) table.
TailCheckResult k_bounded_tails_check(const StepGraphon& w,
                                      const std::vector<std::pair<double, double>>& k_table);

// Shared low-level kernels over an already weighted matrix M (len_i *
// len_j * W_ij). Exposed for the regularity module.
double bilinear_cut_exact(const Mat& m, int kmax);
double bilinear_cut_lower(const Mat& m, int restarts, uint64_t seed);

}  // namespace graphlim
