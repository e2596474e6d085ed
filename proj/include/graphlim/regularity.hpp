#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphlim/graphon.hpp"

namespace graphlim {

enum class RegKind { kLp, kUniform, kEquipartition };

struct RegularityReport {
  RegKind kind = RegKind::kLp;
  bool pass = true;
  bool certified = false;  // exhaustive search vs "no violation found"
  std::string note;
  std::optional<VertexPartition> witness;
  double witness_value = 0.0;      // offending norm or tail mass
  double witness_threshold = 0.0;  // bound it had to satisfy
  double witness_eps = 0.0;        // grid eps of a tail violation
};

// Searches partitions with min class weight >= eta * alpha_G for a
// violation of ||G_P||_p <= C ||G||_1. Exhaustive over set partitions
// while Bell(n) fits the budget, heuristic beyond (degree-grouped,
// degree-chunked and random candidates).
RegularityReport upper_lp_regular_check(const WeightedGraph& g, double c, double eta, double p,
                                        long long search_budget, uint64_t seed);

// Same search against the tail condition of uniform upper regularity,
// evaluated on a finite (eps, K(eps)) table.
RegularityReport uniform_upper_regular_check(const WeightedGraph& g,
                                             const std::vector<std::pair<double, double>>& k_table,
                                             double eta, long long search_budget, uint64_t seed);

// Searches equipartitions into q parts for violations of the
// equipartition tail condition (quotient normalization).
RegularityReport equipartition_upper_regular_check(
    const WeightedGraph& g, const std::vector<std::pair<double, double>>& k_table, int q,
    long long search_budget, uint64_t seed);

struct WeakRegularityResult {
  VertexPartition partition;
  double lower_evidence = 0.0;  // heuristic lower bound on d_cut(G, G_P)
  double upper_evidence = 0.0;  // valid upper bound on d_cut(G, G_P)
  bool upper_exact = false;
  int rounds = 0;
  double target = 0.0;  // eps * ||G||_1
};

// Iterated cut-witness refinement followed by re-balancing into an
// equipartition with at least k_target classes.
WeakRegularityResult weak_regularity_partition(const WeightedGraph& g, double eps, int k_target,
                                               uint64_t seed = 0, int k_cap = 64);

struct RegularizeResult {
  StepGraphon graphon;  // (1/||G||_1) G_P as a step function
  VertexPartition partition;
  WeakRegularityResult evidence;
  double k_alpha_ratio = 0.0;  // k * alpha_max / alpha_G
};

RegularizeResult regularize(const WeightedGraph& g, double eps, int k, uint64_t seed = 0);

// Splits each class of p into near-(1/q')-weight chunks by descending
// degree, pooling and re-splitting the remainders; the result is an
// equipartition into q' parts refining p outside the pooled remainder.
VertexPartition degree_sorted_refinement(const WeightedGraph& g, const VertexPartition& p,
                                         int q_prime);

}  // namespace graphlim
