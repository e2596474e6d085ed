#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "graphlim/common.hpp"

namespace graphlim {

// Weighted graph with nonnegative vertex weights and a symmetric real
// edge-weight matrix. Immutable after construction; total weight must be
// strictly positive. Diagonal entries participate in every formula
// exactly as written (no self-loop special casing).
class WeightedGraph {
 public:
  WeightedGraph(std::vector<double> vertex_weights, Mat edge_weights);

  static WeightedGraph simple(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const { return n_; }
  double alpha(int u) const { return vertex_weights_[u]; }
  const std::vector<double>& vertex_weights() const { return vertex_weights_; }
  double beta(int u, int v) const { return edge_weights_(u, v); }
  const Mat& edge_weights() const { return edge_weights_; }

  double total_weight() const { return alpha_g_; }   // alpha_G
  double max_weight() const;                         // alpha_max, derived
  double subset_weight(const std::vector<int>& vertices) const;
  int edge_count() const;  // unordered pairs {u,v}, u != v, beta != 0

  // True when every vertex weight is 1 and every edge weight is 0 or 1
  // with a zero diagonal.
  bool is_simple() const;

  bool operator==(const WeightedGraph& o) const {
    return vertex_weights_ == o.vertex_weights_ && edge_weights_ == o.edge_weights_;
  }

 private:
  std::vector<double> vertex_weights_;
  Mat edge_weights_;
  int n_;
  double alpha_g_;
};

// Partition of the vertex set into q labelled parts; parts may be empty.
struct VertexPartition {
  std::vector<int> assignment;  // part index in [0, q) per vertex
  int q = 0;

  VertexPartition() = default;
  VertexPartition(std::vector<int> assignment_, int q_);

  std::vector<double> part_weights(const WeightedGraph& g) const;
  bool is_equipartition(const WeightedGraph& g) const;
};

// Normalized quotient (alpha, beta): class weight fractions plus the
// density-normalized edge mass between classes.
struct Quotient {
  std::vector<double> alpha;
  Mat beta;

  int q() const { return static_cast<int>(alpha.size()); }
  bool operator==(const Quotient& o) const { return alpha == o.alpha && beta == o.beta; }
};

double graph_norm(const WeightedGraph& g, double p);  // p in [1, inf]
WeightedGraph scale_graph(const WeightedGraph& g, double c);
WeightedGraph average_over_partition(const WeightedGraph& g, const VertexPartition& p);
Quotient quotient(const WeightedGraph& g, const VertexPartition& p);

// Exact quotient set over all q^n maps, deduplicated after 12-digit
// rounding. Throws BudgetError when q^n exceeds cap.
std::vector<Quotient> enumerate_quotients(const WeightedGraph& g, int q, double cap);

// |E(G)| * max over 2-quotients of beta_12 + beta_21; requires a simple
// graph. The result is integral for simple graphs and is returned as such.
double maxcut(const WeightedGraph& g);

// Iterates fn over all q^n maps. fn receives the assignment vector.
void for_each_map(int n, int q, const std::function<void(const std::vector<int>&)>& fn);

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);

}  // namespace graphlim
