#include "graphlim/large_deviations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "graphlim/rng.hpp"

namespace graphlim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<int> validate_block_structure(const WeightedGraph& g, const BlockStructure& blocks) {
  if (static_cast<int>(blocks.class_of.size()) != g.n() || blocks.classes < 1)
    throw ValidationError("block structure does not match graph");
  std::vector<int> sizes(blocks.classes, 0);
  for (int c : blocks.class_of) {
    if (c < 0 || c >= blocks.classes) throw ValidationError("class index out of range");
    ++sizes[c];
  }
  // Vertex weights constant per class; edge weights constant on ordered
  // class pairs off the diagonal, and on the diagonal itself.
  std::vector<double> cls_weight(blocks.classes, -1.0);
  for (int v = 0; v < g.n(); ++v) {
    int c = blocks.class_of[v];
    if (cls_weight[c] < 0.0)
      cls_weight[c] = g.alpha(v);
    else if (cls_weight[c] != g.alpha(v))
      throw ValidationError("vertex weights are not constant on the classes");
  }
  Mat off(blocks.classes, blocks.classes, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> diag(blocks.classes, std::numeric_limits<double>::quiet_NaN());
  for (int u = 0; u < g.n(); ++u)
    for (int v = 0; v < g.n(); ++v) {
      int cu = blocks.class_of[u], cv = blocks.class_of[v];
      double b = g.beta(u, v);
      if (u == v) {
        if (std::isnan(diag[cu]))
          diag[cu] = b;
        else if (diag[cu] != b)
          throw ValidationError("diagonal edge weights are not constant on the classes");
      } else {
        if (std::isnan(off(cu, cv)))
          off(cu, cv) = b;
        else if (off(cu, cv) != b)
          throw ValidationError("edge weights are not constant on the class pairs");
      }
    }
  return sizes;
}

namespace {

struct BlockData {
  int classes;
  std::vector<int> sizes;
  std::vector<double> weight;  // per-class vertex weight
  Mat off;                     // off-diagonal edge weight per class pair
  std::vector<double> diag;    // within-vertex (u,u) weight per class
};

BlockData block_data(const WeightedGraph& g, const BlockStructure& blocks) {
  BlockData d;
  d.classes = blocks.classes;
  d.sizes = validate_block_structure(g, blocks);
  d.weight.assign(d.classes, 0.0);
  d.off = Mat(d.classes, d.classes, 0.0);
  d.diag.assign(d.classes, 0.0);
  std::vector<int> rep(d.classes, -1);
  for (int v = 0; v < g.n(); ++v) {
    int c = blocks.class_of[v];
    d.weight[c] = g.alpha(v);
    rep[c] = v;
  }
  for (int a = 0; a < d.classes; ++a) {
    d.diag[a] = g.beta(rep[a], rep[a]);
    for (int b = 0; b < d.classes; ++b) {
      // Find an ordered pair of distinct vertices across (a, b).
      double val = 0.0;
      bool found = false;
      for (int u = 0; u < g.n() && !found; ++u) {
        if (blocks.class_of[u] != a) continue;
        for (int v = 0; v < g.n(); ++v) {
          if (v == u || blocks.class_of[v] != b) continue;
          val = g.beta(u, v);
          found = true;
          break;
        }
      }
      d.off(a, b) = found ? val : 0.0;
    }
  }
  return d;
}

// Quotient induced by the per-class color counts k_{i,mu}; `norm` is the
// precomputed 1 / (density * alpha_G^2), or 0 for an edgeless graph.
Quotient quotient_from_counts(const WeightedGraph& g, const BlockData& d,
                              const std::vector<std::vector<int>>& counts, int q, double norm) {
  Quotient s;
  s.alpha.assign(q, 0.0);
  s.beta = Mat::square(q, 0.0);
  for (int mu = 0; mu < d.classes; ++mu)
    for (int i = 0; i < q; ++i) s.alpha[i] += counts[mu][i] * d.weight[mu];
  for (double& x : s.alpha) x /= g.total_weight();
  if (norm == 0.0) return s;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      double acc = 0.0;
      for (int mu = 0; mu < d.classes; ++mu) {
        double ki = counts[mu][i];
        if (ki == 0.0) continue;
        for (int nu = 0; nu < d.classes; ++nu) {
          double pairs = ki * counts[nu][j];
          if (i == j && mu == nu) pairs -= ki;  // remove u == v
          if (pairs != 0.0 && d.off(mu, nu) != 0.0)
            acc += d.weight[mu] * d.weight[nu] * d.off(mu, nu) * pairs;
        }
        if (i == j && d.diag[mu] != 0.0) acc += d.weight[mu] * d.weight[mu] * d.diag[mu] * ki;
      }
      s.beta(i, j) = acc * norm;
    }
  return s;
}

void compositions(int total, int parts, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(parts, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      cur[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, total);
}

double log_multinomial(int n, const std::vector<int>& parts) {
  double s = std::lgamma(n + 1.0);
  for (int p : parts) s -= std::lgamma(p + 1.0);
  return s;
}

double wilson_halfwidth(long long hits, long long n) {
  // z = 1 (68%) Wilson interval half-width.
  double z2 = 1.0;
  double p = static_cast<double>(hits) / n;
  double denom = 1.0 + z2 / n;
  double half = std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return half;
}

}  // namespace

RateEstimate quotient_ball_probability(const WeightedGraph& g, int q, const Quotient& target,
                                       double eps, LdMethod method, double budget,
                                       long long samples, uint64_t seed,
                                       const BlockStructure* blocks) {
  if (!(eps > 0.0)) throw ValidationError("ball radius eps must be positive");
  if (target.q() != q) throw ValidationError("target quotient dimension mismatch");
  RateEstimate res;
  res.n = g.n();
  res.eps = eps;
  res.method = method;

  switch (method) {
    case LdMethod::kExactEnumeration: {
      if (pow_checked(q, g.n(), budget) > budget)
        throw BudgetError("quotient_ball_probability: q^n exceeds the enumeration budget");
      long long hits = 0, total = 0;
      for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
        ++total;
        if (d1(target, quotient(g, VertexPartition(phi, q))) <= eps) ++hits;
      });
      res.probability = static_cast<double>(hits) / static_cast<double>(total);
      res.value = hits == 0 ? kInf
                            : -(std::log(static_cast<double>(hits)) -
                                std::log(static_cast<double>(total))) /
                                  g.n();
      break;
    }
    case LdMethod::kExactMultinomial: {
      if (blocks == nullptr)
        throw ValidationError("exact_multinomial requires a block structure");
      BlockData d = block_data(g, *blocks);
      std::vector<std::vector<std::vector<int>>> per_class(d.classes);
      double table_count = 1.0;
      for (int mu = 0; mu < d.classes; ++mu) {
        double c = 1.0;
        for (int i = 1; i < q; ++i) c *= static_cast<double>(d.sizes[mu] + i) / i;
        table_count *= c;
        if (table_count > budget)
          throw BudgetError("exact_multinomial: count-table space exceeds the budget");
      }
      for (int mu = 0; mu < d.classes; ++mu) compositions(d.sizes[mu], q, per_class[mu]);
      double density = graph_norm(g, 1.0);
      double norm =
          density == 0.0 ? 0.0 : 1.0 / (density * g.total_weight() * g.total_weight());
      std::vector<int> choice(d.classes, 0);
      std::vector<std::vector<int>> counts(d.classes);
      std::vector<double> log_terms;
      while (true) {
        for (int mu = 0; mu < d.classes; ++mu) counts[mu] = per_class[mu][choice[mu]];
        Quotient s = quotient_from_counts(g, d, counts, q, norm);
        if (d1(target, s) <= eps) {
          double lg = 0.0;
          for (int mu = 0; mu < d.classes; ++mu) lg += log_multinomial(d.sizes[mu], counts[mu]);
          log_terms.push_back(lg);
        }
        int dig = 0;
        while (dig < d.classes &&
               choice[dig] == static_cast<int>(per_class[dig].size()) - 1)
          choice[dig++] = 0;
        if (dig == d.classes) break;
        ++choice[dig];
      }
      if (log_terms.empty()) {
        res.probability = 0.0;
        res.value = kInf;
      } else {
        double log_p = log_sum_exp(log_terms) - g.n() * std::log(static_cast<double>(q));
        res.probability = std::exp(log_p);
        res.value = -log_p / g.n();
      }
      break;
    }
    case LdMethod::kMonteCarlo: {
      if (samples <= 0) throw ValidationError("monte_carlo requires a positive sample count");
      CounterRng root(seed);
      long long hits = 0;
      std::vector<int> phi(g.n());
      for (long long s = 0; s < samples; ++s) {
        CounterRng rng = root.split(static_cast<uint64_t>(s));
        for (int v = 0; v < g.n(); ++v) phi[v] = rng.uniform_int(0, q - 1);
        if (d1(target, quotient(g, VertexPartition(phi, q))) <= eps) ++hits;
      }
      res.samples = samples;
      res.probability = static_cast<double>(hits) / static_cast<double>(samples);
      double half = wilson_halfwidth(hits, samples);
      res.stderr_value = half / std::max(res.probability, 1e-300) / g.n();
      res.value = hits == 0 ? kInf : -std::log(res.probability) / g.n();
      break;
    }
  }
  return res;
}

std::vector<RateEstimate> empirical_rate(const std::vector<WeightedGraph>& gs, int q,
                                         const Quotient& target, double eps, LdMethod method,
                                         double budget, long long samples, uint64_t seed,
                                         const BlockStructure* blocks) {
  std::vector<RateEstimate> out;
  out.reserve(gs.size());
  for (size_t i = 0; i < gs.size(); ++i)
    out.push_back(quotient_ball_probability(gs[i], q, target, eps, method, budget, samples,
                                            seed + i, blocks));
  return out;
}

GraphonRateResult graphon_rate(const StepGraphon& w, int q, const Quotient& target, double mesh,
                               int restarts, uint64_t seed, double tol) {
  if (q < 1) throw ValidationError("q must be positive");
  if (target.q() != q) throw ValidationError("target quotient dimension mismatch");
  if (!(mesh > 0.0)) throw ValidationError("mesh must be positive");
  GraphonRateResult res;
  int r = static_cast<int>(std::ceil(1.0 / mesh));
  res.net_radius = 2.0 * (1.0 + 2.0 * w.max_abs_value()) * q / r;
  res.tol = tol > 0.0 ? tol : res.net_radius;

  double best_ent = -1.0;
  StepFractionalPartition best = StepFractionalPartition::uniform(w.step_lengths(), q);
  auto consider = [&](const StepFractionalPartition& rho) {
    if (d1(fractional_quotient(w, rho), target) > res.tol) return;
    double e = entropy(rho);
    if (e > best_ent) {
      best_ent = e;
      best = rho;
    }
  };
  consider(StepFractionalPartition::uniform(w.step_lengths(), q));

  // Grid search when the net fits, otherwise seeded random candidates.
  std::vector<std::vector<double>> rows;
  {
    std::vector<int> counts(q, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == q - 1) {
        counts[pos] = left;
        std::vector<double> row(q);
        for (int i = 0; i < q; ++i) row[i] = static_cast<double>(counts[i]) / r;
        rows.push_back(std::move(row));
        return;
      }
      for (int c = 0; c <= left; ++c) {
        counts[pos] = c;
        rec(pos + 1, left - c);
      }
    };
    rec(0, r);
  }
  bool grid = std::pow(static_cast<double>(rows.size()), w.k()) <= 1e7;
  CounterRng root(seed);
  if (grid) {
    res.method = "grid";
    int m = static_cast<int>(rows.size());
    std::vector<int> choice(w.k(), 0);
    Mat weights(w.k(), q);
    while (true) {
      for (int mu = 0; mu < w.k(); ++mu)
        for (int i = 0; i < q; ++i) weights(mu, i) = rows[choice[mu]][i];
      consider(StepFractionalPartition(w.step_lengths(), weights));
      int dig = 0;
      while (dig < w.k() && choice[dig] == m - 1) choice[dig++] = 0;
      if (dig == w.k()) break;
      ++choice[dig];
    }
  } else {
    res.method = "sampled";
    long long draws = 200LL * std::max(1, restarts);
    for (long long s = 0; s < draws; ++s) {
      CounterRng rng = root.split(static_cast<uint64_t>(s));
      Mat weights(w.k(), q);
      for (int mu = 0; mu < w.k(); ++mu) {
        double tot = 0.0;
        std::vector<double> e(q);
        for (int i = 0; i < q; ++i) {
          e[i] = -std::log(1.0 - rng.next_unit());
          tot += e[i];
        }
        double row = 0.0;
        for (int i = 0; i < q - 1; ++i) {
          weights(mu, i) = e[i] / tot;
          row += weights(mu, i);
        }
        weights(mu, q - 1) = 1.0 - row;
      }
      consider(StepFractionalPartition(w.step_lengths(), weights));
    }
  }

  // Entropy-ascent polish of the incumbent under the constraint.
  if (best_ent >= 0.0) {
    CounterRng rng = root.split(0xA11CE);
    Mat cur = best.weights();
    for (int it = 0; it < 2000; ++it) {
      int mu = rng.uniform_int(0, w.k() - 1);
      int i = rng.uniform_int(0, q - 1), j = rng.uniform_int(0, q - 1);
      if (i == j) continue;
      double step = rng.uniform(0.0, std::min(0.1, cur(mu, i)));
      if (step <= 0.0) continue;
      Mat cand = cur;
      cand(mu, i) -= step;
      cand(mu, j) += step;
      StepFractionalPartition rho(w.step_lengths(), cand);
      if (d1(fractional_quotient(w, rho), target) > res.tol) continue;
      double e = entropy(rho);
      if (e > best_ent) {
        best_ent = e;
        best = rho;
        cur = cand;
      }
    }
  }

  res.value = best_ent < 0.0 ? kInf : std::max(0.0, std::log(static_cast<double>(q)) - best_ent);
  return res;
}

}  // namespace graphlim
