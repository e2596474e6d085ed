#pragma once

#include <optional>
#include <string>

#include "graphlim/quotient_space.hpp"

namespace graphlim {

// Spin-model parameters: coupling matrix J, magnetic field h, target
// class-weight vector a, and the microcanonical slack eps.
struct CouplingModel {
  Mat j;
  std::vector<double> h;  // zero vector when absent
  std::vector<double> a;
  double eps = 0.0;

  CouplingModel(Mat j_, std::vector<double> h_, std::vector<double> a_, double eps_);

  int q() const { return j.rows(); }
  double j_inf() const { return j.max_abs(); }
  double j_l1() const { return j.sum_abs(); }
};

struct EnergyResult {
  double value = 0.0;
  std::optional<VertexPartition> opt_map;
  std::optional<StepFractionalPartition> opt_rho;
  bool exact_flag = false;
  std::string method;
  // Certified half-width of the value for grid-searched graphon paths; 0
  // for exact/closed-form results, infinity when only a one-sided bound
  // is known.
  double resolution = 0.0;
};

enum class OptMethod { kExact, kAnneal };

// Energy of a configuration, equal to -<beta(G/phi), J> (zero for an
// edgeless graph).
double config_energy(const WeightedGraph& g, const Mat& j, const VertexPartition& p);

// Number of maps in the microcanonical ensemble within the feasibility
// tolerance; 0 means the ensemble is empty.
bool ensemble_feasible(const WeightedGraph& g, const std::vector<double>& a, double eps,
                       double budget);

EnergyResult microcanonical_gse(const WeightedGraph& g, const CouplingModel& m, OptMethod method,
                                double budget, uint64_t seed);
EnergyResult microcanonical_free_energy(const WeightedGraph& g, const CouplingModel& m,
                                        double budget);

EnergyResult free_energy(const WeightedGraph& g, const Mat& j, const std::vector<double>& h,
                         double budget);
EnergyResult ground_state_energy(const WeightedGraph& g, const Mat& j,
                                 const std::vector<double>& h, double budget, OptMethod method,
                                 uint64_t seed);

double graphon_energy(const StepGraphon& w, const Mat& j, const StepFractionalPartition& rho);

// Minimizes the quotient energy over step-constant fractional partitions
// with alpha(rho) = a. Closed form for constant graphons; simplex-grid
// certification (with reported resolution) at small k*q; transportation
// cycle descent otherwise. The value is always a valid upper bound on
// the infimum.
EnergyResult graphon_gse(const StepGraphon& w, const Mat& j, const std::vector<double>& a,
                         double mesh, int restarts, uint64_t seed);

// Minimizes energy minus entropy subject to alpha(rho) = a via mean-field
// fixed-point iteration with dual scaling; upper bound except for the
// closed forms.
EnergyResult graphon_free_energy(const StepGraphon& w, const Mat& j, const std::vector<double>& a,
                                 int iters, int restarts, uint64_t seed);

}  // namespace graphlim
