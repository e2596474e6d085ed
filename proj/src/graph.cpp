#include "graphlim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace graphlim {

WeightedGraph::WeightedGraph(std::vector<double> vertex_weights, Mat edge_weights)
    : vertex_weights_(std::move(vertex_weights)), edge_weights_(std::move(edge_weights)) {
  n_ = static_cast<int>(vertex_weights_.size());
  if (n_ == 0) throw ValidationError("graph must have at least one vertex");
  if (edge_weights_.rows() != n_ || edge_weights_.cols() != n_)
    throw ValidationError("edge weight matrix size does not match vertex count");
  if (!edge_weights_.is_symmetric_exact())
    throw ValidationError("edge weight matrix must equal its transpose exactly");
  alpha_g_ = 0.0;
  for (double a : vertex_weights_) {
    if (!(a >= 0.0)) throw ValidationError("vertex weights must be nonnegative");
    alpha_g_ += a;
  }
  if (!(alpha_g_ > 0.0)) throw ValidationError("total vertex weight must be positive");
}

WeightedGraph WeightedGraph::simple(int n, const std::vector<std::pair<int, int>>& edges) {
  Mat b = Mat::square(n, 0.0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw ValidationError("invalid edge in simple graph constructor");
    b(u, v) = 1.0;
    b(v, u) = 1.0;
  }
  return WeightedGraph(std::vector<double>(n, 1.0), std::move(b));
}

double WeightedGraph::max_weight() const {
  double m = 0.0;
  for (double a : vertex_weights_) m = std::max(m, a);
  return m;
}

double WeightedGraph::subset_weight(const std::vector<int>& vertices) const {
  double s = 0.0;
  for (int v : vertices) s += vertex_weights_[v];
  return s;
}

int WeightedGraph::edge_count() const {
  int c = 0;
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (edge_weights_(u, v) != 0.0) ++c;
  return c;
}

bool WeightedGraph::is_simple() const {
  for (double a : vertex_weights_)
    if (a != 1.0) return false;
  for (int u = 0; u < n_; ++u) {
    if (edge_weights_(u, u) != 0.0) return false;
    for (int v = 0; v < n_; ++v) {
      double b = edge_weights_(u, v);
      if (b != 0.0 && b != 1.0) return false;
    }
  }
  return true;
}

VertexPartition::VertexPartition(std::vector<int> assignment_, int q_)
    : assignment(std::move(assignment_)), q(q_) {
  if (q <= 0) throw ValidationError("partition must have at least one part");
  for (int a : assignment)
    if (a < 0 || a >= q) throw ValidationError("part index out of range");
}

std::vector<double> VertexPartition::part_weights(const WeightedGraph& g) const {
  if (static_cast<int>(assignment.size()) != g.n())
    throw ValidationError("partition does not match graph");
  std::vector<double> w(q, 0.0);
  for (int v = 0; v < g.n(); ++v) w[assignment[v]] += g.alpha(v);
  return w;
}

bool VertexPartition::is_equipartition(const WeightedGraph& g) const {
  std::vector<double> w = part_weights(g);
  double target = g.total_weight() / q;
  double slack = g.max_weight() + 1e-12 * g.total_weight();
  for (double x : w)
    if (std::fabs(x - target) > slack) return false;
  return true;
}

double graph_norm(const WeightedGraph& g, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (int u = 0; u < g.n(); ++u)
      for (int v = 0; v < g.n(); ++v)
        if (g.alpha(u) > 0.0 && g.alpha(v) > 0.0)
          m = std::max(m, std::fabs(g.beta(u, v)));
    return m;
  }
  if (!(p >= 1.0)) throw ValidationError("graph norm requires p >= 1 or p = inf");
  double ag2 = g.total_weight() * g.total_weight();
  double s = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    for (int v = 0; v < g.n(); ++v) {
      double b = g.beta(u, v);
      if (b == 0.0) continue;
      s += g.alpha(u) * g.alpha(v) / ag2 * std::pow(std::fabs(b), p);
    }
  }
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

WeightedGraph scale_graph(const WeightedGraph& g, double c) {
  Mat b = g.edge_weights();
  for (double& x : b.data()) x *= c;
  return WeightedGraph(g.vertex_weights(), std::move(b));
}

WeightedGraph average_over_partition(const WeightedGraph& g, const VertexPartition& p) {
  std::vector<double> w = p.part_weights(g);
  // Weighted block sums.
  Mat num = Mat::square(p.q, 0.0);
  for (int u = 0; u < g.n(); ++u) {
    if (g.alpha(u) == 0.0) continue;
    for (int v = 0; v < g.n(); ++v) {
      double b = g.beta(u, v);
      if (b == 0.0 || g.alpha(v) == 0.0) continue;
      num(p.assignment[u], p.assignment[v]) += g.alpha(u) * g.alpha(v) * b;
    }
  }
  Mat avg = Mat::square(p.q, 0.0);
  for (int i = 0; i < p.q; ++i)
    for (int j = 0; j < p.q; ++j)
      if (w[i] > 0.0 && w[j] > 0.0) avg(i, j) = num(i, j) / (w[i] * w[j]);
  Mat b = Mat::square(g.n(), 0.0);
  for (int u = 0; u < g.n(); ++u)
    for (int v = 0; v < g.n(); ++v) b(u, v) = avg(p.assignment[u], p.assignment[v]);
  // Symmetrize exactly against accumulation-order asymmetry.
  for (int u = 0; u < g.n(); ++u)
    for (int v = u + 1; v < g.n(); ++v) b(v, u) = b(u, v);
  return WeightedGraph(g.vertex_weights(), std::move(b));
}

Quotient quotient(const WeightedGraph& g, const VertexPartition& p) {
  std::vector<double> w = p.part_weights(g);
  Quotient out;
  out.alpha.resize(p.q);
  for (int i = 0; i < p.q; ++i) out.alpha[i] = w[i] / g.total_weight();
  out.beta = Mat::square(p.q, 0.0);
  double density = graph_norm(g, 1.0);
  if (density == 0.0) return out;  // beta = 0 in the degenerate case
  double scale = 1.0 / (density * g.total_weight() * g.total_weight());
  for (int u = 0; u < g.n(); ++u) {
    if (g.alpha(u) == 0.0) continue;
    for (int v = 0; v < g.n(); ++v) {
      double b = g.beta(u, v);
      if (b == 0.0 || g.alpha(v) == 0.0) continue;
      out.beta(p.assignment[u], p.assignment[v]) += g.alpha(u) * g.alpha(v) * scale * b;
    }
  }
  for (int i = 0; i < p.q; ++i)
    for (int j = i + 1; j < p.q; ++j) {
      double m = 0.5 * (out.beta(i, j) + out.beta(j, i));
      out.beta(i, j) = m;
      out.beta(j, i) = m;
    }
  return out;
}

void for_each_map(int n, int q, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> phi(n, 0);
  while (true) {
    fn(phi);
    int d = 0;
    while (d < n && phi[d] == q - 1) phi[d++] = 0;
    if (d == n) break;
    ++phi[d];
  }
}

namespace {

struct QuotientKey {
  std::vector<long long> k;
  bool operator<(const QuotientKey& o) const { return k < o.k; }
};

QuotientKey key_of(const Quotient& s) {
  QuotientKey key;
  key.k.reserve(s.alpha.size() + s.beta.data().size());
  for (double a : s.alpha) key.k.push_back(round12(a));
  for (double b : s.beta.data()) key.k.push_back(round12(b));
  return key;
}

}  // namespace

std::vector<Quotient> enumerate_quotients(const WeightedGraph& g, int q, double cap) {
  if (q <= 0) throw ValidationError("q must be positive");
  double total = pow_checked(q, g.n(), cap);
  if (total > cap)
    throw BudgetError("q^n exceeds the enumeration cap; use sampling instead");
  std::map<QuotientKey, Quotient> seen;
  for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
    Quotient s = quotient(g, VertexPartition(phi, q));
    seen.emplace(key_of(s), std::move(s));
  });
  std::vector<Quotient> out;
  out.reserve(seen.size());
  for (auto& [k, v] : seen) out.push_back(std::move(v));
  return out;
}

double maxcut(const WeightedGraph& g) {
  if (!g.is_simple()) throw ValidationError("maxcut requires a simple graph");
  int n = g.n();
  if (n > 30) throw BudgetError("maxcut enumeration is limited to n <= 30");
  int m = g.edge_count();
  if (m == 0) return 0.0;
  // beta_12 + beta_21 of G/phi for the bipartition S | V\S, evaluated with
  // the same normalization as quotient(). Adjacency rows as bitmasks keep
  // the 2^n scan cheap.
  std::vector<uint32_t> adj(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (g.beta(u, v) != 0.0) adj[u] |= (1u << v);
  double density = graph_norm(g, 1.0);
  double norm = 1.0 / (density * g.total_weight() * g.total_weight());
  double best = 0.0;
  uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  for (uint32_t s = 0; s <= full >> 1; ++s) {  // vertex n-1 fixed outside S
    long long cross = 0;
    for (int u = 0; u < n; ++u)
      if (s >> u & 1) cross += __builtin_popcount(adj[u] & (full & ~s));
    double val = 2.0 * static_cast<double>(cross) * norm;  // ordered pairs
    best = std::max(best, val);
  }
  // MaxCut of a simple graph is an integer; rounding strips the float
  // noise of the normalization round trip.
  return static_cast<double>(llround(best * m));
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b) {
  int n = a.n() + b.n();
  std::vector<double> w;
  w.reserve(n);
  w.insert(w.end(), a.vertex_weights().begin(), a.vertex_weights().end());
  w.insert(w.end(), b.vertex_weights().begin(), b.vertex_weights().end());
  Mat e = Mat::square(n, 0.0);
  for (int u = 0; u < a.n(); ++u)
    for (int v = 0; v < a.n(); ++v) e(u, v) = a.beta(u, v);
  for (int u = 0; u < b.n(); ++u)
    for (int v = 0; v < b.n(); ++v) e(a.n() + u, a.n() + v) = b.beta(u, v);
  return WeightedGraph(std::move(w), std::move(e));
}

}  // namespace graphlim
