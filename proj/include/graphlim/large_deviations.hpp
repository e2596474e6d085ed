#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphlim/quotient_space.hpp"

namespace graphlim {

enum class LdMethod { kExactEnumeration, kExactMultinomial, kMonteCarlo };

struct RateEstimate {
  double value = 0.0;  // -log P / n, may be +infinity
  int n = 0;
  double eps = 0.0;
  LdMethod method = LdMethod::kExactEnumeration;
  double stderr_value = 0.0;  // Monte Carlo only
  double probability = 0.0;
  long long samples = 0;  // Monte Carlo draws
};

// Vertex classes for the closed-form counting route: vertex weights and
// edge weights must be constant on the classes (off-diagonal B, diagonal
// D) so the quotient is a function of the per-class color counts.
struct BlockStructure {
  std::vector<int> class_of;  // per vertex
  int classes = 0;
};

// Probability that a uniformly random q-coloring lands within d1 distance
// eps of the target quotient, plus the induced finite-n rate.
RateEstimate quotient_ball_probability(const WeightedGraph& g, int q, const Quotient& target,
                                       double eps, LdMethod method, double budget,
                                       long long samples, uint64_t seed,
                                       const BlockStructure* blocks = nullptr);

std::vector<RateEstimate> empirical_rate(const std::vector<WeightedGraph>& gs, int q,
                                         const Quotient& target, double eps, LdMethod method,
                                         double budget, long long samples, uint64_t seed,
                                         const BlockStructure* blocks = nullptr);

// Minimizes log q - Ent(rho) over step-constant fractional partitions
// with d1(W/rho, target) <= tol; +infinity when no candidate within the
// sampled net satisfies the constraint.
struct GraphonRateResult {
  double value = 0.0;  // in [0, log q] or +infinity
  double tol = 0.0;    // constraint radius actually used
  double net_radius = 0.0;
  std::string method;
};
GraphonRateResult graphon_rate(const StepGraphon& w, int q, const Quotient& target, double mesh,
                               int restarts, uint64_t seed, double tol = -1.0);

// Validates that g is block-constant on the supplied classes and returns
// the class sizes; throws ValidationError otherwise.
std::vector<int> validate_block_structure(const WeightedGraph& g, const BlockStructure& blocks);

}  // namespace graphlim
