#include "graphlim/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "graphlim/rng.hpp"

namespace graphlim {

ValueDistribution distribution_of(const StepGraphon& w) {
  std::map<double, double> mass;
  for (int i = 0; i < w.k(); ++i)
    for (int j = 0; j < w.k(); ++j) mass[w.value(i, j)] += w.len(i) * w.len(j);
  ValueDistribution d;
  d.atoms.reserve(mass.size());
  for (auto [v, m] : mass) d.atoms.emplace_back(v, m);
  return d;
}

StepGraphon monotone_rearrangement(const StepGraphon& w, int grid) {
  if (grid < w.k())
    throw ValidationError("rearrangement grid must be at least the input step count");
  ValueDistribution d = distribution_of(w);
  // Values descending with cumulative masses; step breakpoints at the
  // square roots of the cumulative masses.
  int m = static_cast<int>(d.atoms.size());
  std::vector<double> vals(m), cum(m);
  double c = 0.0;
  for (int j = 0; j < m; ++j) {
    auto [v, mass] = d.atoms[m - 1 - j];
    vals[j] = v;
    c += mass;
    cum[j] = std::min(c, 1.0);
  }
  cum[m - 1] = 1.0;
  std::vector<double> lens(m);
  double prev = 0.0;
  for (int j = 0; j < m; ++j) {
    double r = std::sqrt(cum[j]);
    lens[j] = r - prev;
    prev = r;
  }
  Mat v = Mat::square(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) v(i, j) = vals[std::max(i, j)];
  return StepGraphon(std::move(lens), std::move(v));
}

StepGraphon top_lambda(const StepGraphon& w, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw ValidationError("lambda must lie in [0,1]");
  int k = w.k();
  if (lambda == 0.0) return StepGraphon(w.step_lengths(), Mat::square(k, 0.0));
  if (lambda == 1.0) return StepGraphon(w.step_lengths(), Mat::square(k, 1.0));

  // Threshold M = sup{s : Pr[W > s] >= lambda}.
  ValueDistribution d = distribution_of(w);
  double above = 0.0;  // Pr[W > M]
  double m_val = d.atoms.back().first;
  for (int j = static_cast<int>(d.atoms.size()) - 1; j >= 0; --j) {
    double with = above + d.atoms[j].second;  // Pr[W >= atom value]
    if (with >= lambda - 1e-15) {
      m_val = d.atoms[j].first;
      break;
    }
    above = with;
  }

  // Cells with value > M are taken fully; boundary cells (value == M) are
  // taken in (i, j) order until the remaining mass runs out, splitting a
  // step for the final fraction.
  double rem = lambda - above;
  enum CellState { kOut = 0, kIn = 1, kPartial = 2 };
  std::vector<int> state_buf(static_cast<size_t>(k) * k, kOut);
  auto state = [&](int i, int j) -> int& { return state_buf[static_cast<size_t>(i) * k + j]; };
  int part_i = -1, part_j = -1;
  double part_fraction = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j)
      if (w.value(i, j) > m_val) {
        state(i, j) = kIn;
        state(j, i) = kIn;
      }
  for (int i = 0; i < k && rem > 1e-15; ++i)
    for (int j = i; j < k && rem > 1e-15; ++j) {
      if (w.value(i, j) != m_val) continue;
      double cell = (i == j) ? w.len(i) * w.len(i) : 2.0 * w.len(i) * w.len(j);
      if (cell <= rem + 1e-15) {
        state(i, j) = kIn;
        state(j, i) = kIn;
        rem -= cell;
      } else {
        state(i, j) = kPartial;
        state(j, i) = kPartial;
        part_i = i;
        part_j = j;
        part_fraction = rem / cell;
        rem = 0.0;
      }
    }

  if (part_i < 0) {
    Mat v = Mat::square(k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) v(i, j) = (state(i, j) == kIn) ? 1.0 : 0.0;
    return StepGraphon(w.step_lengths(), std::move(v));
  }

  // Split one step so the partial cell contributes exactly the leftover
  // mass: an off-diagonal cell splits step part_j, a diagonal cell takes
  // the corner square of side sqrt(fraction) * len.
  int split_step = (part_i == part_j) ? part_i : part_j;
  double frac = (part_i == part_j) ? std::sqrt(part_fraction) : part_fraction;
  double cut = w.len(split_step) * frac;
  std::vector<double> lens;
  std::vector<int> src;     // original step per refined step
  int sub_a = -1;           // index of the taken subpiece
  for (int i = 0; i < k; ++i) {
    if (i == split_step) {
      sub_a = static_cast<int>(lens.size());
      lens.push_back(cut);
      src.push_back(i);
      if (w.len(i) - cut > 1e-15) {
        lens.push_back(w.len(i) - cut);
        src.push_back(i);
      }
    } else {
      lens.push_back(w.len(i));
      src.push_back(i);
    }
  }
  int kk = static_cast<int>(lens.size());
  Mat v = Mat::square(kk, 0.0);
  for (int a = 0; a < kk; ++a)
    for (int b = 0; b < kk; ++b) {
      int i = src[a], j = src[b];
      if (state(i, j) == kIn) {
        v(a, b) = 1.0;
      } else if (state(i, j) == kPartial) {
        bool taken;
        if (part_i == part_j) {
          taken = (a == sub_a && b == sub_a);  // corner square
        } else {
          // the (part_i, sub_a) strip and its mirror
          taken = (i == part_i && b == sub_a) || (a == sub_a && j == part_i);
        }
        v(a, b) = taken ? 1.0 : 0.0;
      }
    }
  return StepGraphon(std::move(lens), std::move(v));
}

double inner_product(const StepGraphon& w, const StepGraphon& y) {
  Refinement r = common_refinement(w.step_lengths(), y.step_lengths());
  double s = 0.0;
  int k = static_cast<int>(r.lens.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      s += r.lens[i] * r.lens[j] * w.value(r.idx_a[i], r.idx_a[j]) *
           y.value(r.idx_b[i], r.idx_b[j]);
  return s;
}

double rearranged_inner_product(const StepGraphon& w, const StepGraphon& y) {
  return inner_product(monotone_rearrangement(w, w.k()), monotone_rearrangement(y, y.k()));
}

namespace {

std::vector<double> cells_on_grid(const StepGraphon& g, int m) {
  std::vector<double> cum(g.k());
  double s = 0.0;
  for (int i = 0; i < g.k(); ++i) {
    s += g.len(i);
    cum[i] = s;
  }
  cum.back() = 1.0;
  std::vector<double> out(m);
  for (int c = 0; c < m; ++c) {
    double mid = (c + 0.5) / m;
    int idx = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), mid) - cum.begin());
    out[c] = static_cast<double>(std::min(idx, g.k() - 1));
  }
  return out;
}

int detect_common_grid(const StepGraphon& u, const StepGraphon& w, int cap) {
  auto bounds_of = [](const StepGraphon& g) {
    std::vector<double> b;
    double c = 0.0;
    for (int i = 0; i + 1 < g.k(); ++i) {
      c += g.len(i);
      b.push_back(c);
    }
    return b;
  };
  std::vector<double> all = bounds_of(u), bw = bounds_of(w);
  all.insert(all.end(), bw.begin(), bw.end());
  for (int m = 1; m <= cap; ++m) {
    bool ok = true;
    for (double b : all)
      if (std::fabs(b * m - std::round(b * m)) > 1e-9 * m) {
        ok = false;
        break;
      }
    if (ok) return m;
  }
  return 0;
}

}  // namespace

DistanceBound quasi_inner_product_bounds(const StepGraphon& w, const StepGraphon& y, int budget,
                                         uint64_t seed) {
  DistanceBound b;
  b.upper = rearranged_inner_product(w, y);
  double lower = inner_product(w, y);  // identity alignment

  int m = detect_common_grid(w, y, std::clamp(budget, 1, 24));
  if (m > 1 && m <= 24) {
    std::vector<double> sw = cells_on_grid(w, m), sy = cells_on_grid(y, m);
    std::vector<std::vector<double>> a(m, std::vector<double>(m)), c(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        a[i][j] = w.value(static_cast<int>(sw[i]), static_cast<int>(sw[j]));
        c[i][j] = y.value(static_cast<int>(sy[i]), static_cast<int>(sy[j]));
      }
    double cell2 = 1.0 / (static_cast<double>(m) * m);
    auto eval = [&](const std::vector<int>& perm) {
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += a[i][j] * c[perm[i]][perm[j]];
      return s * cell2;
    };
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    if (m <= std::min(budget, 8)) {
      do {
        lower = std::max(lower, eval(perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      // Hill climbing on the exact objective from a few seeded starts.
      CounterRng root(seed);
      for (int r = 0; r < 8; ++r) {
        CounterRng rng = root.split(r);
        std::vector<int> p(m);
        std::iota(p.begin(), p.end(), 0);
        if (r > 0)
          for (int i = m - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_int(0, i)]);
        double cur = eval(p);
        bool improved = true;
        for (int pass = 0; pass < 50 && improved; ++pass) {
          improved = false;
          for (int x = 0; x < m; ++x)
            for (int z = x + 1; z < m; ++z) {
              std::swap(p[x], p[z]);
              double v = eval(p);
              if (v > cur + 1e-15) {
                cur = v;
                improved = true;
              } else {
                std::swap(p[x], p[z]);
              }
            }
        }
        lower = std::max(lower, cur);
      }
    }
  }
  b.lower = std::min(lower, b.upper);
  if (b.upper - b.lower <= 1e-12) {
    b.lower = b.upper;
    b.exact = true;
  }
  return b;
}

bool same_distribution_check(const StepGraphon& u, const StepGraphon& w, double tol) {
  auto merged = [tol](const StepGraphon& g) {
    ValueDistribution d = distribution_of(g);
    std::vector<std::pair<double, double>> out;
    for (auto [v, m] : d.atoms) {
      if (!out.empty() && v - out.back().first <= tol) {
        // Merge into a mass-weighted representative.
        double tm = out.back().second + m;
        out.back().first = (out.back().first * out.back().second + v * m) / tm;
        out.back().second = tm;
      } else {
        out.emplace_back(v, m);
      }
    }
    return out;
  };
  auto a = merged(u), b = merged(w);
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i].first - b[i].first) > tol + 1e-12) return false;
    if (std::fabs(a[i].second - b[i].second) > 1e-9) return false;
  }
  return true;
}

}  // namespace graphlim
