#include "graphlim/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "graphlim/rng.hpp"

namespace graphlim {

namespace {
constexpr double kSnap = 1e-12;
}

StepGraphon::StepGraphon(std::vector<double> step_lengths, Mat values)
    : step_lengths_(std::move(step_lengths)), values_(std::move(values)) {
  int k = static_cast<int>(step_lengths_.size());
  if (k < 1) throw ValidationError("step graphon needs at least one step");
  double total = 0.0;
  for (double l : step_lengths_) {
    if (!(l > 0.0)) throw ValidationError("step lengths must be positive");
    total += l;
  }
  if (std::fabs(total - 1.0) > kSnap)
    throw ValidationError("step lengths must sum to 1");
  if (values_.rows() != k || values_.cols() != k)
    throw ValidationError("value matrix size does not match step count");
  if (!values_.is_symmetric_exact())
    throw ValidationError("value matrix must be symmetric");
}

StepGraphon StepGraphon::constant(double c) {
  Mat v = Mat::square(1, c);
  return StepGraphon({1.0}, std::move(v));
}

double StepGraphon::integral() const {
  double s = 0.0;
  for (int i = 0; i < k(); ++i)
    for (int j = 0; j < k(); ++j) s += step_lengths_[i] * step_lengths_[j] * values_(i, j);
  return s;
}

double StepGraphon::max_abs_value() const { return values_.max_abs(); }

double StepGraphon::at(double x, double y) const {
  auto locate = [&](double t) {
    double c = 0.0;
    for (int i = 0; i < k(); ++i) {
      c += step_lengths_[i];
      if (t < c) return i;
    }
    return k() - 1;
  };
  return values_(locate(x), locate(y));
}

StepGraphon embed(const WeightedGraph& g) {
  std::vector<int> kept;
  for (int v = 0; v < g.n(); ++v)
    if (g.alpha(v) > 0.0) kept.push_back(v);
  int k = static_cast<int>(kept.size());
  std::vector<double> lens(k);
  for (int i = 0; i < k; ++i) lens[i] = g.alpha(kept[i]) / g.total_weight();
  Mat v = Mat::square(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) v(i, j) = g.beta(kept[i], kept[j]);
  return StepGraphon(std::move(lens), std::move(v));
}

StepGraphon normalize(const WeightedGraph& g) {
  double d = graph_norm(g, 1.0);
  if (d == 0.0) return StepGraphon::zero();
  StepGraphon w = embed(g);
  Mat v = w.values();
  for (double& x : v.data()) x /= d;
  return StepGraphon(w.step_lengths(), std::move(v));
}

double graphon_lp_norm(const StepGraphon& w, double p) {
  if (std::isinf(p)) return w.max_abs_value();
  if (!(p >= 1.0)) throw ValidationError("graphon norm requires p >= 1 or p = inf");
  double s = 0.0;
  for (int i = 0; i < w.k(); ++i)
    for (int j = 0; j < w.k(); ++j) {
      double v = w.value(i, j);
      if (v == 0.0) continue;
      s += w.len(i) * w.len(j) * (p == 1.0 ? std::fabs(v) : std::pow(std::fabs(v), p));
    }
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double bilinear_cut_exact(const Mat& m, int kmax) {
  int k = m.rows();
  if (k > kmax) throw BudgetError("cut norm enumeration over 2^k subsets exceeds kmax");
  std::vector<double> c(k, 0.0);
  double best = 0.0;
  uint32_t prev = 0;
  for (uint32_t s = 1; s < (1u << k); ++s) {
    uint32_t gray = s ^ (s >> 1);
    uint32_t flipped = gray ^ prev;
    int bit = __builtin_ctz(flipped);
    if (gray & flipped)
      for (int j = 0; j < k; ++j) c[j] += m(bit, j);
    else
      for (int j = 0; j < k; ++j) c[j] -= m(bit, j);
    prev = gray;
    double pos = 0.0, neg = 0.0;
    for (int j = 0; j < k; ++j) {
      if (c[j] > 0.0)
        pos += c[j];
      else
        neg -= c[j];
    }
    best = std::max({best, pos, neg});
  }
  return best;
}

namespace {

// One alternating-maximization run for max_{S,T} sign * sum_{S x T} M.
double alternate_once(const Mat& m, std::vector<char>& in_s, int sign) {
  int k = m.rows();
  std::vector<char> in_t(k, 0);
  std::vector<double> col(k);
  double val = -1.0, prev_val = -2.0;
  for (int pass = 0; pass < 64 && val > prev_val; ++pass) {
    prev_val = val;
    // Optimal T for fixed S (column sums accumulated row by row).
    std::fill(col.begin(), col.end(), 0.0);
    for (int i = 0; i < k; ++i)
      if (in_s[i])
        for (int j = 0; j < k; ++j) col[j] += m(i, j);
    val = 0.0;
    for (int j = 0; j < k; ++j) {
      in_t[j] = (sign * col[j] > 0.0);
      if (in_t[j]) val += sign * col[j];
    }
    // Optimal S for fixed T.
    val = 0.0;
    for (int i = 0; i < k; ++i) {
      double ri = 0.0;
      for (int j = 0; j < k; ++j)
        if (in_t[j]) ri += m(i, j);
      in_s[i] = (sign * ri > 0.0);
      if (in_s[i]) val += sign * ri;
    }
  }
  return val;
}

}  // namespace

double bilinear_cut_lower(const Mat& m, int restarts, uint64_t seed) {
  int k = m.rows();
  CounterRng root(seed);
  double best = 0.0;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    CounterRng rng = root.split(r);
    for (int sign : {1, -1}) {
      std::vector<char> in_s(k);
      if (r == 0) {
        std::fill(in_s.begin(), in_s.end(), 1);  // deterministic full start
      } else {
        for (int i = 0; i < k; ++i) in_s[i] = rng.bernoulli(0.5);
      }
      best = std::max(best, alternate_once(m, in_s, sign));
    }
  }
  return best;
}

namespace {

Mat weighted_matrix(const StepGraphon& w) {
  Mat m = Mat::square(w.k());
  for (int i = 0; i < w.k(); ++i)
    for (int j = 0; j < w.k(); ++j) m(i, j) = w.len(i) * w.len(j) * w.value(i, j);
  return m;
}

}  // namespace

double cut_norm_exact(const StepGraphon& w, int kmax) {
  return bilinear_cut_exact(weighted_matrix(w), kmax);
}

double cut_norm_lower(const StepGraphon& w, int restarts, uint64_t seed) {
  return bilinear_cut_lower(weighted_matrix(w), restarts, seed);
}

StepGraphon average_graphon(const StepGraphon& w, const std::vector<std::vector<int>>& groups) {
  int k = w.k();
  std::vector<int> seen(k, 0);
  for (const auto& g : groups) {
    if (g.empty()) throw ValidationError("empty step group");
    for (int i : g) {
      if (i < 0 || i >= k) throw ValidationError("step index out of range");
      ++seen[i];
    }
  }
  for (int c : seen)
    if (c != 1) throw ValidationError("groups must partition the step set");
  int m = static_cast<int>(groups.size());
  std::vector<double> lens(m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int i : groups[a]) lens[a] += w.len(i);
  Mat v = Mat::square(m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      double val;
      if (groups[a].size() == 1 && groups[b].size() == 1) {
        val = w.value(groups[a][0], groups[b][0]);  // exact on singletons
      } else {
        double s = 0.0;
        for (int i : groups[a])
          for (int j : groups[b]) s += w.len(i) * w.len(j) * w.value(i, j);
        val = s / (lens[a] * lens[b]);
      }
      v(a, b) = val;
      v(b, a) = val;
    }
  return StepGraphon(std::move(lens), std::move(v));
}

Refinement common_refinement(const std::vector<double>& lens_a, const std::vector<double>& lens_b) {
  std::vector<double> bounds;
  auto push_cumsum = [&bounds](const std::vector<double>& lens) {
    double c = 0.0;
    for (size_t i = 0; i + 1 < lens.size(); ++i) {
      c += lens[i];
      bounds.push_back(c);
    }
  };
  push_cumsum(lens_a);
  push_cumsum(lens_b);
  bounds.push_back(1.0);
  std::sort(bounds.begin(), bounds.end());
  std::vector<double> merged;
  for (double b : bounds)
    if (merged.empty() || b - merged.back() > kSnap) merged.push_back(b);
  merged.back() = 1.0;

  auto cum_of = [](const std::vector<double>& lens) {
    std::vector<double> c(lens.size());
    double s = 0.0;
    for (size_t i = 0; i < lens.size(); ++i) {
      s += lens[i];
      c[i] = s;
    }
    c.back() = 1.0;
    return c;
  };
  std::vector<double> ca = cum_of(lens_a), cb = cum_of(lens_b);
  auto locate = [](const std::vector<double>& cum, double mid) {
    return static_cast<int>(std::upper_bound(cum.begin(), cum.end(), mid) - cum.begin());
  };

  Refinement r;
  double prev = 0.0;
  for (double b : merged) {
    double len = b - prev;
    if (len <= kSnap) {
      prev = b;
      continue;
    }
    double mid = 0.5 * (prev + b);
    r.lens.push_back(len);
    r.idx_a.push_back(std::min(locate(ca, mid), static_cast<int>(lens_a.size()) - 1));
    r.idx_b.push_back(std::min(locate(cb, mid), static_cast<int>(lens_b.size()) - 1));
    prev = b;
  }
  return r;
}

StepGraphon overlay_difference(const StepGraphon& a, const StepGraphon& b) {
  Refinement r = common_refinement(a.step_lengths(), b.step_lengths());
  int k = static_cast<int>(r.lens.size());
  Mat v = Mat::square(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double x = a.value(r.idx_a[i], r.idx_a[j]);
      double y = b.value(r.idx_b[i], r.idx_b[j]);
      double d = x - y;
      if (std::fabs(d) <= kSnap * std::max({1.0, std::fabs(x), std::fabs(y)})) d = 0.0;
      v(i, j) = d;
    }
  return StepGraphon(r.lens, std::move(v));
}

namespace {

// ---- alignment machinery for cut_distance -------------------------------

// Smallest m <= cap such that every step boundary of both graphons sits on
// the uniform m-grid (within 1e-9); 0 if none.
int detect_equal_grid(const StepGraphon& u, const StepGraphon& w, int cap) {
  auto bounds_of = [](const StepGraphon& g) {
    std::vector<double> b;
    double c = 0.0;
    for (int i = 0; i + 1 < g.k(); ++i) {
      c += g.len(i);
      b.push_back(c);
    }
    return b;
  };
  std::vector<double> all = bounds_of(u);
  std::vector<double> bw = bounds_of(w);
  all.insert(all.end(), bw.begin(), bw.end());
  for (int m = 1; m <= cap; ++m) {
    bool ok = true;
    for (double b : all) {
      double r = b * m;
      if (std::fabs(r - std::round(r)) > 1e-9 * m) {
        ok = false;
        break;
      }
    }
    if (ok) return m;
  }
  return 0;
}

// Values of g sampled on the uniform m-grid (valid when the boundaries
// align with the grid).
std::vector<double> grid_cells(const StepGraphon& g, int m) {
  std::vector<double> cum(g.k());
  double s = 0.0;
  for (int i = 0; i < g.k(); ++i) {
    s += g.len(i);
    cum[i] = s;
  }
  cum.back() = 1.0;
  std::vector<double> src(m);
  for (int c = 0; c < m; ++c) {
    double mid = (c + 0.5) / m;
    src[c] = static_cast<double>(
        std::min<int>(static_cast<int>(std::upper_bound(cum.begin(), cum.end(), mid) - cum.begin()),
                      g.k() - 1));
  }
  return src;
}

double grid_diff_cut_exact(const StepGraphon& u, const StepGraphon& w, int m,
                           const std::vector<int>& perm) {
  std::vector<double> su = grid_cells(u, m), sw = grid_cells(w, m);
  double cell = 1.0 / m;
  Mat d = Mat::square(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double x = u.value(static_cast<int>(su[i]), static_cast<int>(su[j]));
      double y = w.value(static_cast<int>(sw[perm[i]]), static_cast<int>(sw[perm[j]]));
      double diff = x - y;
      if (std::fabs(diff) <= kSnap * std::max({1.0, std::fabs(x), std::fabs(y)})) diff = 0.0;
      d(i, j) = cell * cell * diff;
    }
  return bilinear_cut_exact(d, 25);
}

// L2 proxy objective for permutation polishing (cheaper than cut norm and
// a good alignment surrogate).
double perm_l2(const std::vector<std::vector<double>>& uu, const std::vector<std::vector<double>>& ww,
               const std::vector<int>& perm) {
  int m = static_cast<int>(perm.size());
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double d = uu[i][j] - ww[perm[i]][perm[j]];
      s += d * d;
    }
  return s;
}

double heuristic_perm_upper(const StepGraphon& u, const StepGraphon& w, int m, int restarts,
                            uint64_t seed) {
  std::vector<double> su = grid_cells(u, m), sw = grid_cells(w, m);
  std::vector<std::vector<double>> uu(m, std::vector<double>(m)), ww(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      uu[i][j] = u.value(static_cast<int>(su[i]), static_cast<int>(su[j]));
      ww[i][j] = w.value(static_cast<int>(sw[i]), static_cast<int>(sw[j]));
    }
  auto row_key = [m](const std::vector<std::vector<double>>& a, int i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += a[i][j];
    return s;
  };
  std::vector<int> id(m);
  std::iota(id.begin(), id.end(), 0);

  std::vector<std::vector<int>> candidates;
  candidates.push_back(id);
  // Degree-sorted alignment: match cells by row sum rank.
  std::vector<int> ru = id, rw = id;
  std::sort(ru.begin(), ru.end(), [&](int a, int b) { return row_key(uu, a) < row_key(uu, b); });
  std::sort(rw.begin(), rw.end(), [&](int a, int b) { return row_key(ww, a) < row_key(ww, b); });
  std::vector<int> sorted(m);
  for (int r = 0; r < m; ++r) sorted[ru[r]] = rw[r];
  candidates.push_back(sorted);

  CounterRng root(seed);
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng = root.split(r + 1000);
    std::vector<int> p = id;
    for (int i = m - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_int(0, i)]);
    candidates.push_back(std::move(p));
  }

  // Polish each candidate by first-improvement pair swaps on the proxy.
  for (auto& p : candidates) {
    double cur = perm_l2(uu, ww, p);
    bool improved = true;
    for (int pass = 0; pass < 50 && improved; ++pass) {
      improved = false;
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          std::swap(p[a], p[b]);
          double v = perm_l2(uu, ww, p);
          if (v < cur - 1e-15) {
            cur = v;
            improved = true;
          } else {
            std::swap(p[a], p[b]);
          }
        }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const std::vector<int>& a, const std::vector<int>& b) {
              return perm_l2(uu, ww, a) < perm_l2(uu, ww, b);
            });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best = std::numeric_limits<double>::infinity();
  int evals = std::min<int>(5, static_cast<int>(candidates.size()));
  for (int c = 0; c < evals; ++c) best = std::min(best, grid_diff_cut_exact(u, w, m, candidates[c]));
  return best;
}

double exhaustive_perm_upper(const StepGraphon& u, const StepGraphon& w, int m) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, grid_diff_cut_exact(u, w, m, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Average of g over the uniform m-grid (exact integration of the step
// function over each cell).
StepGraphon grid_average(const StepGraphon& g, int m) {
  // Overlap length of step i with cell c.
  std::vector<double> cum(g.k() + 1, 0.0);
  for (int i = 0; i < g.k(); ++i) cum[i + 1] = cum[i] + g.len(i);
  cum[g.k()] = 1.0;
  std::vector<std::vector<double>> ov(m, std::vector<double>(g.k(), 0.0));
  for (int c = 0; c < m; ++c) {
    double lo = static_cast<double>(c) / m, hi = static_cast<double>(c + 1) / m;
    for (int i = 0; i < g.k(); ++i) {
      double l = std::max(lo, cum[i]), h = std::min(hi, cum[i + 1]);
      if (h > l) ov[c][i] = h - l;
    }
  }
  Mat v = Mat::square(m, 0.0);
  double cell = 1.0 / m;
  for (int c = 0; c < m; ++c)
    for (int d = c; d < m; ++d) {
      double s = 0.0;
      for (int i = 0; i < g.k(); ++i) {
        if (ov[c][i] == 0.0) continue;
        for (int j = 0; j < g.k(); ++j) {
          if (ov[d][j] == 0.0) continue;
          s += ov[c][i] * ov[d][j] * g.value(i, j);
        }
      }
      double val = s / (cell * cell);
      v(c, d) = val;
      v(d, c) = val;
    }
  return StepGraphon(std::vector<double>(m, cell), std::move(v));
}

// ---- quotient-net lower bound -------------------------------------------

void simplex_rows(int q, int r, std::vector<std::vector<double>>& out) {
  std::vector<int> counts(q, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == q - 1) {
      counts[pos] = left;
      std::vector<double> row(q);
      for (int i = 0; i < q; ++i) row[i] = static_cast<double>(counts[i]) / r;
      out.push_back(std::move(row));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, r);
}

struct NetPoint {
  std::vector<double> alpha;
  std::vector<double> beta;  // q*q flattened
};

// Finite net of the fractional q-quotient set of W on a per-row simplex
// grid of mesh 1/r, with the d1 covering radius 2(1+2*||W||_inf)*q/r.
std::vector<NetPoint> quotient_net(const StepGraphon& w, int q, int r) {
  std::vector<std::vector<double>> rows;
  simplex_rows(q, r, rows);
  int m = static_cast<int>(rows.size());
  int k = w.k();
  std::vector<NetPoint> net;
  std::vector<int> choice(k, 0);
  while (true) {
    NetPoint p;
    p.alpha.assign(q, 0.0);
    p.beta.assign(q * q, 0.0);
    for (int mu = 0; mu < k; ++mu)
      for (int i = 0; i < q; ++i) p.alpha[i] += w.len(mu) * rows[choice[mu]][i];
    for (int mu = 0; mu < k; ++mu)
      for (int nu = 0; nu < k; ++nu) {
        double base = w.len(mu) * w.len(nu) * w.value(mu, nu);
        if (base == 0.0) continue;
        for (int i = 0; i < q; ++i) {
          double ri = rows[choice[mu]][i];
          if (ri == 0.0) continue;
          for (int j = 0; j < q; ++j) p.beta[i * q + j] += base * ri * rows[choice[nu]][j];
        }
      }
    net.push_back(std::move(p));
    int d = 0;
    while (d < k && choice[d] == m - 1) choice[d++] = 0;
    if (d == k) break;
    ++choice[d];
  }
  return net;
}

double net_d1(const NetPoint& a, const NetPoint& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.alpha.size(); ++i) s += std::fabs(a.alpha[i] - b.alpha[i]);
  for (size_t i = 0; i < a.beta.size(); ++i) s += std::fabs(a.beta[i] - b.beta[i]);
  return s;
}

double directed_haus(const std::vector<NetPoint>& from, const std::vector<NetPoint>& to) {
  double worst = 0.0;
  for (const auto& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : to) best = std::min(best, net_d1(a, b));
    worst = std::max(worst, best);
  }
  return worst;
}

double quotient_net_lower(const StepGraphon& u, const StepGraphon& w) {
  // q = 1 is exact: both quotient sets are single points {(1, ∫)}.
  double lower = std::fabs(u.integral() - w.integral());
  for (int q = 2; q <= 3; ++q) {
    // Keep the nets small; the bound stays valid for any mesh.
    double per_row = (q == 2) ? 40.0 : 8.0;
    int r = static_cast<int>(std::floor(std::pow(2000.0, 1.0 / std::max(u.k(), w.k()))));
    auto count_rows = [&](int rr) {
      double c = 1.0;
      for (int i = 1; i < q; ++i) c *= static_cast<double>(rr + i) / i;
      return c;
    };
    while (r > 1 && (count_rows(r) > per_row ||
                     std::pow(count_rows(r), u.k()) > 4000.0 ||
                     std::pow(count_rows(r), w.k()) > 4000.0))
      --r;
    if (r < 2) continue;
    std::vector<NetPoint> nu = quotient_net(u, q, r);
    std::vector<NetPoint> nw = quotient_net(w, q, r);
    double ru = 2.0 * (1.0 + 2.0 * u.max_abs_value()) * q / r;
    double rw = 2.0 * (1.0 + 2.0 * w.max_abs_value()) * q / r;
    double h = std::max(directed_haus(nu, nw) - rw, directed_haus(nw, nu) - ru);
    lower = std::max(lower, h / (q * q));
  }
  return std::max(0.0, lower);
}

}  // namespace

DistanceBound cut_distance(const StepGraphon& u, const StepGraphon& w, int budget, uint64_t seed) {
  DistanceBound b;
  if (u == w) {
    b.lower = b.upper = 0.0;
    b.exact = true;
    return b;
  }
  constexpr int kExactCutCap = 24;

  // Upper bounds from explicit overlays.
  double upper = std::numeric_limits<double>::infinity();
  StepGraphon diff = overlay_difference(u, w);
  if (diff.k() <= kExactCutCap)
    upper = cut_norm_exact(diff, kExactCutCap);
  else
    upper = graphon_lp_norm(diff, 1.0);

  int m = detect_equal_grid(u, w, std::min(std::max(budget, 1), 64));
  if (m > 1) {
    if (m <= std::min(budget, 8))
      upper = std::min(upper, exhaustive_perm_upper(u, w, m));
    else if (m <= kExactCutCap)
      upper = std::min(upper, heuristic_perm_upper(u, w, m, 12, seed));
  }
  if (m == 0 || m > kExactCutCap) {
    // No usable aligned grid: average both onto a coarse uniform grid and
    // fold the averaging residuals (valid since ||X - X_P||_cut <=
    // ||X - X_P||_1).
    int mg = std::clamp(budget, 4, 16);
    StepGraphon ug = grid_average(u, mg), wg = grid_average(w, mg);
    double slack =
        graphon_lp_norm(overlay_difference(u, ug), 1.0) + graphon_lp_norm(overlay_difference(w, wg), 1.0);
    double mid = (mg <= std::min(budget, 8)) ? exhaustive_perm_upper(ug, wg, mg)
                                             : heuristic_perm_upper(ug, wg, mg, 12, seed);
    upper = std::min(upper, mid + slack);
  }

  double lower = quotient_net_lower(u, w);
  lower = std::min(lower, upper);
  b.lower = lower;
  b.upper = upper;
  if (upper - lower <= 1e-15) {
    b.lower = b.upper;
    b.exact = true;
  }
  return b;
}

DistanceBound normalized_cut_distance(const WeightedGraph& g, const WeightedGraph& g2, int budget,
                                      uint64_t seed) {
  return cut_distance(normalize(g), normalize(g2), budget, seed);
}

TailCheckResult k_bounded_tails_check(const StepGraphon& w,
                                      const std::vector<std::pair<double, double>>& k_table) {
  if (k_table.empty()) throw ValidationError("tail check needs a nonempty eps grid");
  TailCheckResult res;
  for (auto [eps, kval] : k_table) {
    if (!(eps > 0.0) || !(kval > 0.0))
      throw ValidationError("tail check requires eps > 0 and K(eps) > 0");
    double tail = 0.0;
    for (int i = 0; i < w.k(); ++i)
      for (int j = 0; j < w.k(); ++j) {
        double v = std::fabs(w.value(i, j));
        if (v >= kval) tail += w.len(i) * w.len(j) * v;
      }
    if (tail > eps + 1e-12) {
      res.pass = false;
      res.worst_eps = eps;
      res.worst_tail = tail;
      return res;
    }
  }
  return res;
}

}  // namespace graphlim
