#include "graphlim/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "graphlim/quotient_space.hpp"
#include "graphlim/rng.hpp"

namespace graphlim {

namespace {

std::vector<double> weighted_degrees(const WeightedGraph& g) {
  std::vector<double> deg(g.n(), 0.0);
  for (int u = 0; u < g.n(); ++u) {
    double s = 0.0;
    for (int v = 0; v < g.n(); ++v) s += g.alpha(v) * std::fabs(g.beta(u, v));
    deg[u] = s;
  }
  return deg;
}

// Block sums/averages of a partition without materializing G_P.
struct Blocks {
  std::vector<double> class_weight;
  Mat avg;  // averaged edge weight per class pair (0 on zero-weight classes)
  int parts;
};

Blocks block_averages(const WeightedGraph& g, const std::vector<int>& assign, int parts) {
  Blocks b;
  b.parts = parts;
  b.class_weight.assign(parts, 0.0);
  for (int v = 0; v < g.n(); ++v) b.class_weight[assign[v]] += g.alpha(v);
  Mat num(parts, parts, 0.0);
  for (int u = 0; u < g.n(); ++u) {
    if (g.alpha(u) == 0.0) continue;
    for (int v = 0; v < g.n(); ++v) {
      double w = g.beta(u, v);
      if (w == 0.0 || g.alpha(v) == 0.0) continue;
      num(assign[u], assign[v]) += g.alpha(u) * g.alpha(v) * w;
    }
  }
  b.avg = Mat(parts, parts, 0.0);
  for (int i = 0; i < parts; ++i)
    for (int j = 0; j < parts; ++j)
      if (b.class_weight[i] > 0.0 && b.class_weight[j] > 0.0)
        b.avg(i, j) = num(i, j) / (b.class_weight[i] * b.class_weight[j]);
  return b;
}

double averaged_lp_norm(const WeightedGraph& g, const Blocks& b, double p) {
  double ag2 = g.total_weight() * g.total_weight();
  double s = 0.0;
  for (int i = 0; i < b.parts; ++i)
    for (int j = 0; j < b.parts; ++j) {
      double v = b.avg(i, j);
      if (v == 0.0) continue;
      s += b.class_weight[i] * b.class_weight[j] / ag2 * std::pow(std::fabs(v), p);
    }
  return std::pow(s, 1.0 / p);
}

double averaged_tail(const WeightedGraph& g, const Blocks& b, double kval, double density) {
  double ag2 = g.total_weight() * g.total_weight();
  double s = 0.0;
  for (int i = 0; i < b.parts; ++i)
    for (int j = 0; j < b.parts; ++j) {
      double v = std::fabs(b.avg(i, j));
      if (v >= kval * density)
        s += b.class_weight[i] * b.class_weight[j] / ag2 * v / density;
    }
  return s;
}

// Enumerates set partitions of [n] as restricted-growth strings; stops
// early when fn returns false.
void for_each_set_partition(int n, const std::function<bool(const std::vector<int>&, int)>& fn) {
  std::vector<int> rgs(n, 0), maxv(n, 0);  // maxv[i] = max(rgs[0..i])
  while (true) {
    if (!fn(rgs, maxv[n - 1] + 1)) return;
    int i = n - 1;
    while (i > 0 && rgs[i] > maxv[i - 1]) --i;
    if (i == 0) return;
    ++rgs[i];
    maxv[i] = std::max(maxv[i - 1], rgs[i]);
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      maxv[j] = maxv[i];
    }
  }
}

double bell_number(int n) {
  std::vector<double> prev{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> cur(prev.size() + 1);
    cur[0] = prev.back();
    for (size_t j = 0; j < prev.size(); ++j) cur[j + 1] = cur[j] + prev[j];
    prev = std::move(cur);
  }
  return prev[0];
}

// Candidate partitions for the heuristic searchers: vertices grouped by
// degree, chunked by sorted degree, and random assignments repaired to
// respect the min class weight.
std::vector<std::vector<int>> heuristic_partitions(const WeightedGraph& g, double min_weight,
                                                   long long budget, uint64_t seed) {
  int n = g.n();
  std::vector<double> deg = weighted_degrees(g);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return deg[a] > deg[b]; });
  std::vector<std::vector<int>> out;

  auto min_class_weight = [&](const std::vector<int>& assign, int parts) {
    std::vector<double> w(parts, 0.0);
    for (int v = 0; v < n; ++v) w[assign[v]] += g.alpha(v);
    return *std::min_element(w.begin(), w.end());
  };

  // Degree-value grouping (vertices with equal degree share a class).
  {
    std::vector<int> assign(n, 0);
    std::vector<double> values;
    for (int v = 0; v < n; ++v) {
      int idx = -1;
      for (size_t t = 0; t < values.size(); ++t)
        if (std::fabs(values[t] - deg[v]) <= 1e-12) idx = static_cast<int>(t);
      if (idx < 0) {
        values.push_back(deg[v]);
        idx = static_cast<int>(values.size()) - 1;
      }
      assign[v] = idx;
    }
    if (min_class_weight(assign, static_cast<int>(values.size())) >= min_weight - 1e-12)
      out.push_back(assign);
  }
  // Degree-sorted chunking into 2..8 parts of near-equal weight.
  for (int parts = 2; parts <= 8; ++parts) {
    std::vector<int> assign(n, 0);
    double acc = 0.0;
    int cls = 0;
    for (int v : order) {
      assign[v] = cls;
      acc += g.alpha(v);
      if (acc >= g.total_weight() * (cls + 1) / parts && cls + 1 < parts) ++cls;
    }
    if (min_class_weight(assign, parts) >= min_weight - 1e-12) out.push_back(assign);
  }
  // Seeded random assignments, undersized classes merged into class 0.
  CounterRng root(seed);
  for (long long t = 0; t < budget; ++t) {
    CounterRng rng = root.split(static_cast<uint64_t>(t));
    int parts = rng.uniform_int(2, std::max(2, std::min(n, 8)));
    std::vector<int> assign(n);
    for (int v = 0; v < n; ++v) assign[v] = rng.uniform_int(0, parts - 1);
    std::vector<double> w(parts, 0.0);
    for (int v = 0; v < n; ++v) w[assign[v]] += g.alpha(v);
    for (int v = 0; v < n; ++v)
      if (w[assign[v]] < min_weight) assign[v] = 0;
    // compress labels
    std::vector<int> remap(parts, -1);
    int next = 0;
    for (int v = 0; v < n; ++v) {
      if (remap[assign[v]] < 0) remap[assign[v]] = next++;
      assign[v] = remap[assign[v]];
    }
    if (min_class_weight(assign, next) >= min_weight - 1e-12) out.push_back(assign);
  }
  return out;
}

int parts_of(const std::vector<int>& assign) {
  int p = 0;
  for (int a : assign) p = std::max(p, a + 1);
  return p;
}

}  // namespace

RegularityReport upper_lp_regular_check(const WeightedGraph& g, double c, double eta, double p,
                                        long long search_budget, uint64_t seed) {
  if (!(p > 1.0)) throw ValidationError("upper Lp regularity requires p > 1");
  if (!(eta > 0.0) || !(c > 0.0)) throw ValidationError("C and eta must be positive");
  RegularityReport rep;
  rep.kind = RegKind::kLp;
  double min_weight = eta * g.total_weight();
  if (g.max_weight() > min_weight + 1e-12) {
    rep.pass = false;
    rep.certified = true;
    rep.note = "alpha_max exceeds eta * alpha_G";
    rep.witness_value = g.max_weight();
    rep.witness_threshold = min_weight;
    return rep;
  }
  double density = graph_norm(g, 1.0);
  double bound = c * density;

  auto violates = [&](const std::vector<int>& assign, int parts, double* value) {
    std::vector<double> w(parts, 0.0);
    for (int v = 0; v < g.n(); ++v) w[assign[v]] += g.alpha(v);
    for (double x : w)
      if (x < min_weight - 1e-12) return false;  // partition not admissible
    Blocks b = block_averages(g, assign, parts);
    *value = averaged_lp_norm(g, b, p);
    return *value > bound + 1e-9;
  };

  if (bell_number(g.n()) <= static_cast<double>(search_budget)) {
    bool failed = false;
    for_each_set_partition(g.n(), [&](const std::vector<int>& rgs, int parts) {
      double value = 0.0;
      if (violates(rgs, parts, &value)) {
        rep.pass = false;
        rep.witness = VertexPartition(rgs, parts);
        rep.witness_value = value;
        rep.witness_threshold = bound;
        failed = true;
        return false;
      }
      return true;
    });
    rep.certified = true;
    if (!failed) rep.note = "all admissible partitions checked";
    return rep;
  }

  for (const auto& assign : heuristic_partitions(g, min_weight, search_budget, seed)) {
    double value = 0.0;
    int parts = parts_of(assign);
    if (violates(assign, parts, &value)) {
      rep.pass = false;
      rep.certified = false;
      rep.witness = VertexPartition(assign, parts);
      rep.witness_value = value;
      rep.witness_threshold = bound;
      return rep;
    }
  }
  rep.pass = true;
  rep.certified = false;
  rep.note = "no violation found (budget " + std::to_string(search_budget) + ")";
  return rep;
}

RegularityReport uniform_upper_regular_check(const WeightedGraph& g,
                                             const std::vector<std::pair<double, double>>& k_table,
                                             double eta, long long search_budget, uint64_t seed) {
  if (!(eta > 0.0)) throw ValidationError("eta must be positive");
  if (k_table.empty()) throw ValidationError("tail table must be nonempty");
  RegularityReport rep;
  rep.kind = RegKind::kUniform;
  double min_weight = eta * g.total_weight();
  if (g.max_weight() > min_weight + 1e-12) {
    rep.pass = false;
    rep.certified = true;
    rep.note = "alpha_max exceeds eta * alpha_G";
    rep.witness_value = g.max_weight();
    rep.witness_threshold = min_weight;
    return rep;
  }
  double density = graph_norm(g, 1.0);
  if (density == 0.0) {
    rep.pass = true;
    rep.certified = true;
    rep.note = "edgeless graph";
    return rep;
  }

  auto violates = [&](const std::vector<int>& assign, int parts, double* value, double* eps_out) {
    std::vector<double> w(parts, 0.0);
    for (int v = 0; v < g.n(); ++v) w[assign[v]] += g.alpha(v);
    for (double x : w)
      if (x < min_weight - 1e-12) return false;
    Blocks b = block_averages(g, assign, parts);
    for (auto [eps, kval] : k_table) {
      double tail = averaged_tail(g, b, kval, density);
      if (tail > eps + 1e-12) {
        *value = tail;
        *eps_out = eps;
        return true;
      }
    }
    return false;
  };

  if (bell_number(g.n()) <= static_cast<double>(search_budget)) {
    for_each_set_partition(g.n(), [&](const std::vector<int>& rgs, int parts) {
      double value = 0.0, eps = 0.0;
      if (violates(rgs, parts, &value, &eps)) {
        rep.pass = false;
        rep.witness = VertexPartition(rgs, parts);
        rep.witness_value = value;
        rep.witness_eps = eps;
        return false;
      }
      return true;
    });
    rep.certified = true;
    if (rep.pass) rep.note = "all admissible partitions checked";
    return rep;
  }

  for (const auto& assign : heuristic_partitions(g, min_weight, search_budget, seed)) {
    double value = 0.0, eps = 0.0;
    int parts = parts_of(assign);
    if (violates(assign, parts, &value, &eps)) {
      rep.pass = false;
      rep.certified = false;
      rep.witness = VertexPartition(assign, parts);
      rep.witness_value = value;
      rep.witness_eps = eps;
      return rep;
    }
  }
  rep.pass = true;
  rep.certified = false;
  rep.note = "no violation found (budget " + std::to_string(search_budget) + ")";
  return rep;
}

VertexPartition degree_sorted_refinement(const WeightedGraph& g, const VertexPartition& p,
                                         int q_prime) {
  int nonempty = 0;
  std::vector<double> pw = p.part_weights(g);
  for (double w : pw)
    if (w > 0.0) ++nonempty;
  if (q_prime < std::max(nonempty, 1))
    throw ValidationError("q' must be at least the number of nonempty parts");
  double unit = g.total_weight() / q_prime;
  double amax = g.max_weight();
  if (unit + 1e-12 < amax)
    throw InfeasibleError("weight windows are empty: alpha_max exceeds alpha_G / q'");

  std::vector<double> deg = weighted_degrees(g);
  std::vector<std::vector<int>> classes(p.q);
  for (int v = 0; v < g.n(); ++v) classes[p.assignment[v]].push_back(v);
  for (auto& cls : classes)
    std::sort(cls.begin(), cls.end(), [&](int a, int b) {
      if (deg[a] != deg[b]) return deg[a] > deg[b];
      return a < b;
    });

  double close_tol = 1e-9 * (1.0 + g.total_weight());
  std::vector<int> assign(g.n(), -1);
  int chunk = 0;
  double closed_weight = 0.0;
  std::vector<int> pool;
  for (const auto& cls : classes) {
    std::vector<int> cur;
    double cur_weight = 0.0;
    for (int v : cls) {
      cur.push_back(v);
      cur_weight += g.alpha(v);
      if (closed_weight + cur_weight >= (chunk + 1) * unit - close_tol) {
        for (int u : cur) assign[u] = chunk;
        ++chunk;
        closed_weight += cur_weight;
        cur.clear();
        cur_weight = 0.0;
      }
    }
    // Remainder: lowest-degree leftovers of this class join the pool.
    pool.insert(pool.end(), cur.begin(), cur.end());
  }
  int k0 = q_prime - chunk;
  if (k0 < 0) throw InfeasibleError("refinement produced too many chunks");
  if (k0 == 0 && !pool.empty())
    throw InfeasibleError("remainder pool left over with no chunks to fill");
  {
    std::vector<int> cur;
    double cur_weight = 0.0;
    for (int v : pool) {
      cur.push_back(v);
      cur_weight += g.alpha(v);
      if (closed_weight + cur_weight >= (chunk + 1) * unit - close_tol) {
        for (int u : cur) assign[u] = chunk;
        ++chunk;
        closed_weight += cur_weight;
        cur.clear();
        cur_weight = 0.0;
      }
    }
    if (!cur.empty()) {
      // Zero-weight stragglers can always ride along in the last chunk.
      if (cur_weight > close_tol || chunk == 0)
        throw InfeasibleError("could not close the final chunk within its window");
      for (int u : cur) assign[u] = chunk - 1;
    }
  }
  if (chunk != q_prime)
    throw InfeasibleError("could not fill all q' chunks within their weight windows");

  VertexPartition out(assign, q_prime);
  std::vector<double> w = out.part_weights(g);
  for (double x : w)
    if (x < unit - amax - 1e-9 || x > unit + amax + 1e-9)
      throw InfeasibleError("chunk weight left its window");
  return out;
}

namespace {

// Alternating maximization that also reports the witness sets.
double cut_lower_with_sets(const Mat& m, int restarts, uint64_t seed, std::vector<char>* s_out,
                           std::vector<char>* t_out) {
  int k = m.rows();
  CounterRng root(seed);
  double best = 0.0;
  std::vector<char> best_s(k, 1), best_t(k, 1);
  for (int r = 0; r < std::max(1, restarts); ++r) {
    CounterRng rng = root.split(r);
    for (int sign : {1, -1}) {
      std::vector<char> in_s(k), in_t(k, 0);
      if (r == 0)
        std::fill(in_s.begin(), in_s.end(), 1);
      else
        for (int i = 0; i < k; ++i) in_s[i] = rng.bernoulli(0.5);
      double val = -1.0, prev = -2.0;
      std::vector<double> col(k);
      for (int pass = 0; pass < 64 && val > prev; ++pass) {
        prev = val;
        // T-step: column sums over S, accumulated row by row.
        std::fill(col.begin(), col.end(), 0.0);
        for (int i = 0; i < k; ++i)
          if (in_s[i])
            for (int j = 0; j < k; ++j) col[j] += m(i, j);
        val = 0.0;
        for (int j = 0; j < k; ++j) {
          in_t[j] = (sign * col[j] > 0.0);
          if (in_t[j]) val += sign * col[j];
        }
        // S-step: row sums over T.
        val = 0.0;
        for (int i = 0; i < k; ++i) {
          double ri = 0.0;
          for (int j = 0; j < k; ++j)
            if (in_t[j]) ri += m(i, j);
          in_s[i] = (sign * ri > 0.0);
          if (in_s[i]) val += sign * ri;
        }
      }
      if (val > best) {
        best = val;
        best_s = in_s;
        best_t = in_t;
      }
    }
  }
  if (s_out) *s_out = best_s;
  if (t_out) *t_out = best_t;
  return best;
}

Mat difference_matrix(const WeightedGraph& g, const Blocks& b, const std::vector<int>& assign) {
  double ag2 = g.total_weight() * g.total_weight();
  Mat m(g.n(), g.n(), 0.0);
  for (int u = 0; u < g.n(); ++u)
    for (int v = 0; v < g.n(); ++v) {
      double diff = g.beta(u, v) - b.avg(assign[u], assign[v]);
      if (diff != 0.0) m(u, v) = g.alpha(u) * g.alpha(v) / ag2 * diff;
    }
  return m;
}

}  // namespace

WeakRegularityResult weak_regularity_partition(const WeightedGraph& g, double eps, int k_target,
                                               uint64_t seed, int k_cap) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0,1)");
  if (k_target < 1) throw ValidationError("k_target must be positive");
  double density = graph_norm(g, 1.0);
  WeakRegularityResult res;
  res.target = eps * density;

  std::vector<int> assign(g.n(), 0);
  int parts = 1;
  int round_cap = static_cast<int>(std::ceil(1.0 / (eps * eps)));
  if (density > 0.0) {
    for (int round = 0; round < round_cap; ++round) {
      Blocks b = block_averages(g, assign, parts);
      Mat m = difference_matrix(g, b, assign);
      std::vector<char> s, t;
      double w = cut_lower_with_sets(m, 50, seed + round, &s, &t);
      if (w <= res.target) break;
      if (parts * 4 > k_cap) break;
      // Split every class by (S, T) membership.
      std::vector<int> next(g.n());
      for (int v = 0; v < g.n(); ++v)
        next[v] = assign[v] * 4 + (s[v] ? 2 : 0) + (t[v] ? 1 : 0);
      // compress labels
      std::vector<int> remap(parts * 4, -1);
      int np = 0;
      for (int v = 0; v < g.n(); ++v) {
        if (remap[next[v]] < 0) remap[next[v]] = np++;
        next[v] = remap[next[v]];
      }
      assign = std::move(next);
      parts = np;
      res.rounds = round + 1;
    }
  }

  // Re-balance into an equipartition with at least k_target classes.
  int q_prime = std::max(k_target, parts);
  VertexPartition refined =
      degree_sorted_refinement(g, VertexPartition(assign, parts), q_prime);

  Blocks b = block_averages(g, refined.assignment, refined.q);
  Mat m = difference_matrix(g, b, refined.assignment);
  res.partition = refined;
  res.lower_evidence = cut_lower_with_sets(m, 50, seed + 7777, nullptr, nullptr);
  if (g.n() <= 20) {
    res.upper_evidence = bilinear_cut_exact(m, 20);
    res.upper_exact = true;
  } else {
    double l1 = 0.0;
    for (double x : m.data()) l1 += std::fabs(x);
    res.upper_evidence = l1;
    res.upper_exact = false;
  }
  return res;
}

RegularizeResult regularize(const WeightedGraph& g, double eps, int k, uint64_t seed) {
  WeakRegularityResult ev = weak_regularity_partition(g, eps, k, seed);
  RegularizeResult out{StepGraphon::zero(), ev.partition, ev, 0.0};
  out.k_alpha_ratio = ev.partition.q * g.max_weight() / g.total_weight();
  double density = graph_norm(g, 1.0);
  if (density == 0.0) return out;

  Blocks b = block_averages(g, ev.partition.assignment, ev.partition.q);
  std::vector<int> keep;
  for (int i = 0; i < ev.partition.q; ++i)
    if (b.class_weight[i] > 0.0) keep.push_back(i);
  int m = static_cast<int>(keep.size());
  std::vector<double> lens(m);
  for (int i = 0; i < m; ++i) lens[i] = b.class_weight[keep[i]] / g.total_weight();
  Mat v = Mat::square(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) v(i, j) = b.avg(keep[i], keep[j]) / density;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) v(j, i) = v(i, j);
  out.graphon = StepGraphon(std::move(lens), std::move(v));
  return out;
}

RegularityReport equipartition_upper_regular_check(
    const WeightedGraph& g, const std::vector<std::pair<double, double>>& k_table, int q,
    long long search_budget, uint64_t seed) {
  if (q < 1) throw ValidationError("q must be positive");
  if (k_table.empty()) throw ValidationError("tail table must be nonempty");
  if (g.max_weight() > g.total_weight() / (2.0 * q) + 1e-12)
    throw ValidationError("equipartition regularity requires alpha_max <= alpha_G / (2q)");
  RegularityReport rep;
  rep.kind = RegKind::kEquipartition;

  auto violates = [&](const std::vector<int>& assign, double* value, double* eps_out) {
    VertexPartition p(assign, q);
    if (!p.is_equipartition(g)) return false;
    Quotient s = quotient(g, p);
    for (auto [eps, kval] : k_table) {
      double tail = 0.0;
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          double b = std::fabs(s.beta(i, j));
          if (b >= kval * s.alpha[i] * s.alpha[j]) tail += b;
        }
      if (tail > eps + 1e-12) {
        *value = tail;
        *eps_out = eps;
        return true;
      }
    }
    return false;
  };

  if (pow_checked(q, g.n(), static_cast<double>(search_budget)) <=
      static_cast<double>(search_budget)) {
    for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
      if (!rep.pass) return;
      double value = 0.0, eps = 0.0;
      if (violates(phi, &value, &eps)) {
        rep.pass = false;
        rep.witness = VertexPartition(phi, q);
        rep.witness_value = value;
        rep.witness_eps = eps;
      }
    });
    rep.certified = true;
    if (rep.pass) rep.note = "all equipartitions checked";
    return rep;
  }

  // Heuristic: degree-concentrated and random equipartitions.
  std::vector<double> deg = weighted_degrees(g);
  std::vector<int> order(g.n());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return deg[a] > deg[b]; });
  std::vector<std::vector<int>> candidates;
  {
    // Chunk by sorted degree (concentrates dense blocks in one class).
    std::vector<int> assign(g.n(), 0);
    double acc = 0.0;
    int cls = 0;
    for (int v : order) {
      assign[v] = cls;
      acc += g.alpha(v);
      if (acc >= g.total_weight() * (cls + 1) / q && cls + 1 < q) ++cls;
    }
    candidates.push_back(assign);
  }
  CounterRng root(seed);
  for (long long t = 0; t < search_budget; ++t) {
    CounterRng rng = root.split(static_cast<uint64_t>(t));
    std::vector<int> shuffled = order;
    for (int i = g.n() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.uniform_int(0, i)]);
    std::vector<int> assign(g.n(), 0);
    double acc = 0.0;
    int cls = 0;
    for (int v : shuffled) {
      assign[v] = cls;
      acc += g.alpha(v);
      if (acc >= g.total_weight() * (cls + 1) / q && cls + 1 < q) ++cls;
    }
    candidates.push_back(std::move(assign));
  }
  for (const auto& assign : candidates) {
    double value = 0.0, eps = 0.0;
    if (violates(assign, &value, &eps)) {
      rep.pass = false;
      rep.certified = false;
      rep.witness = VertexPartition(assign, q);
      rep.witness_value = value;
      rep.witness_eps = eps;
      return rep;
    }
  }
  rep.pass = true;
  rep.certified = false;
  rep.note = "no violation found (budget " + std::to_string(search_budget) + ")";
  return rep;
}

}  // namespace graphlim
