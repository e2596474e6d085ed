#pragma once

#include <cstdint>
#include <vector>

#include "graphlim/graphon.hpp"

namespace graphlim {

// Discrete value distribution of a step graphon: (value, mass) atoms with
// strictly increasing values and masses summing to 1.
struct ValueDistribution {
  std::vector<std::pair<double, double>> atoms;
};

ValueDistribution distribution_of(const StepGraphon& w);

// Monotone rearrangement W*: the distribution-equal step function that is
// weakly decreasing in max(x1, x2). Exact for step inputs; `grid` is only
// validated against the input step count.
StepGraphon monotone_rearrangement(const StepGraphon& w, int grid);

// Indicator of a measure-lambda set squeezed between {W > M} and
// {W >= M} for the lambda-quantile threshold M; ties are taken from the
// boundary level in step-index order, splitting a step when needed.
StepGraphon top_lambda(const StepGraphon& w, double lambda);

// E[W Y] on the common refinement.
double inner_product(const StepGraphon& w, const StepGraphon& y);

// E[W* Y*], the rearranged upper end of the quasi-inner-product bracket.
double rearranged_inner_product(const StepGraphon& w, const StepGraphon& y);

// Bracket [best explicit alignment, E[W* Y*]] for sup_phi E[W Y^phi].
DistanceBound quasi_inner_product_bounds(const StepGraphon& w, const StepGraphon& y, int budget,
                                         uint64_t seed);

// Compares the two value distributions after merging values within tol.
bool same_distribution_check(const StepGraphon& u, const StepGraphon& w, double tol);

}  // namespace graphlim
