#include "graphlim/models.hpp"

#include <cmath>

#include "graphlim/rng.hpp"

namespace graphlim {

namespace {

// Pairwise Bernoulli graph: edge {u,v} present iff the pair-keyed uniform
// variate falls below p(u, v).
template <typename P>
WeightedGraph pair_bernoulli(int n, uint64_t seed, P&& prob) {
  if (n < 1) throw ValidationError("graph must have at least one vertex");
  Mat b = Mat::square(n, 0.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      double p = prob(u, v);
      if (p <= 0.0) continue;
      double x = CounterRng::unit_from(CounterRng::hash3(seed, u, v));
      if (x < p) {
        b(u, v) = 1.0;
        b(v, u) = 1.0;
      }
    }
  return WeightedGraph(std::vector<double>(n, 1.0), std::move(b));
}

}  // namespace

WeightedGraph erdos_renyi(int n, double p, uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw ValidationError("edge probability must lie in [0,1]");
  return pair_bernoulli(n, seed, [p](int, int) { return p; });
}

WeightedGraph sbm(int n, const Mat& b, double rho_n, uint64_t seed) {
  int k = b.rows();
  if (k < 1 || b.cols() != k) throw ValidationError("block matrix must be square");
  if (!b.is_symmetric_exact()) throw ValidationError("block matrix must be symmetric");
  double sum = 0.0, maxb = 0.0;
  for (double x : b.data()) {
    if (x < 0.0) throw ValidationError("block densities must be nonnegative");
    sum += x;
    maxb = std::max(maxb, x);
  }
  if (std::fabs(sum / (static_cast<double>(k) * k) - 1.0) > 1e-9)
    throw ValidationError("block matrix must have mean 1");
  if (rho_n < 0.0 || (maxb > 0.0 && rho_n > 1.0 / maxb + 1e-12))
    throw ValidationError("target density out of range for the block matrix");
  // First n mod k blocks take the extra vertex.
  std::vector<int> block_of(n);
  int base = n / k, extra = n % k;
  int v = 0;
  for (int i = 0; i < k; ++i) {
    int size = base + (i < extra ? 1 : 0);
    for (int t = 0; t < size && v < n; ++t) block_of[v++] = i;
  }
  return pair_bernoulli(n, seed, [&](int u, int w) {
    return std::min(1.0, rho_n * b(block_of[u], block_of[w]));
  });
}

WeightedGraph power_law(int n, double alpha, double beta, uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
  if (!(beta >= 0.0 && beta < 2.0 * alpha)) throw ValidationError("beta must lie in [0, 2*alpha)");
  double nb = std::pow(static_cast<double>(n), beta);
  return pair_bernoulli(n, seed, [=](int u, int v) {
    double ij = static_cast<double>(u + 1) * static_cast<double>(v + 1);
    return std::min(1.0, nb * std::pow(ij, -alpha));
  });
}

WeightedGraph w_random(const StepGraphon& w, int n, double rho_n, uint64_t seed) {
  for (double x : w.values().data())
    if (x < 0.0) throw ValidationError("w_random requires a nonnegative graphon");
  if (std::fabs(w.integral() - 1.0) > 1e-9)
    throw ValidationError("w_random requires a graphon with integral 1");
  if (!(rho_n > 0.0 && rho_n <= 1.0)) throw ValidationError("rho_n must lie in (0,1]");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = CounterRng::unit_from(CounterRng::hash3(seed, 0x1a7e47ull, i));
  return pair_bernoulli(n, seed, [&](int u, int v) {
    return std::min(1.0, rho_n * w.at(x[u], x[v]));
  });
}

WeightedGraph clique_plus_isolated(int n, int c_n) {
  if (c_n < 0 || c_n > n) throw ValidationError("clique size must lie in [0, n]");
  Mat b = Mat::square(n, 0.0);
  for (int u = 0; u < c_n; ++u)
    for (int v = 0; v < c_n; ++v)
      if (u != v) b(u, v) = 1.0;
  return WeightedGraph(std::vector<double>(n, 1.0), std::move(b));
}

WeightedGraph cycle_union(int cycle_len, int copies) {
  if (cycle_len != 4 && cycle_len != 6) throw ValidationError("cycle length must be 4 or 6");
  if (copies < 1) throw ValidationError("need at least one copy");
  int n = cycle_len * copies;
  Mat b = Mat::square(n, 0.0);
  for (int c = 0; c < copies; ++c) {
    int off = c * cycle_len;
    for (int i = 0; i < cycle_len; ++i) {
      int u = off + i, v = off + (i + 1) % cycle_len;
      b(u, v) = 1.0;
      b(v, u) = 1.0;
    }
  }
  return WeightedGraph(std::vector<double>(n, 1.0), std::move(b));
}

}  // namespace graphlim
