#pragma once

#include <cstdint>

#include "graphlim/graphon.hpp"

namespace graphlim {

// All generators return simple graphs (unit vertex weights, 0/1 edges)
// and are deterministic functions of their parameters and the seed: each
// pair decision is keyed on (seed, u, v), so the output is independent of
// sampling order.

WeightedGraph erdos_renyi(int n, double p, uint64_t seed);

// Near-equal blocks (the first n mod k blocks get the extra vertex);
// pair probability rho_n * b_ij. B must be symmetric nonnegative with
// mean 1, rho_n <= 1 / max b_ij.
WeightedGraph sbm(int n, const Mat& b, double rho_n, uint64_t seed);

// p_ij = min(1, n^beta * (i*j)^{-alpha}) with 1-based labels;
// 0 < alpha < 1, 0 <= beta < 2 alpha.
WeightedGraph power_law(int n, double alpha, double beta, uint64_t seed);

// W >= 0 with integral 1; latent positions uniform, pair probability
// min(1, rho_n * W(x_i, x_j)).
WeightedGraph w_random(const StepGraphon& w, int n, double rho_n, uint64_t seed);

// Complete graph on the first c_n vertices plus isolated vertices.
WeightedGraph clique_plus_isolated(int n, int c_n);

// Disjoint union of `copies` cycles of the given length (4 or 6).
WeightedGraph cycle_union(int cycle_len, int copies);

}  // namespace graphlim
