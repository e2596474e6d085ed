#include "graphlim/quotient_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "graphlim/rng.hpp"

namespace graphlim {

StepFractionalPartition::StepFractionalPartition(std::vector<double> step_lengths, Mat weights)
    : step_lengths_(std::move(step_lengths)), weights_(std::move(weights)) {
  int k = static_cast<int>(step_lengths_.size());
  if (k < 1 || weights_.rows() != k || weights_.cols() < 1)
    throw ValidationError("fractional partition shape mismatch");
  for (double l : step_lengths_)
    if (!(l > 0.0)) throw ValidationError("step lengths must be positive");
  for (int mu = 0; mu < k; ++mu) {
    double s = 0.0;
    for (int i = 0; i < weights_.cols(); ++i) {
      double v = weights_(mu, i);
      if (v < -1e-12 || v > 1.0 + 1e-12)
        throw ValidationError("fractional partition entries must lie in [0,1]");
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-12)
      throw ValidationError("fractional partition rows must sum to 1");
  }
}

StepFractionalPartition StepFractionalPartition::hard(std::vector<double> step_lengths,
                                                      const std::vector<int>& colors, int q) {
  int k = static_cast<int>(step_lengths.size());
  if (static_cast<int>(colors.size()) != k)
    throw ValidationError("color list does not match step count");
  Mat w(k, q, 0.0);
  for (int mu = 0; mu < k; ++mu) {
    if (colors[mu] < 0 || colors[mu] >= q) throw ValidationError("color out of range");
    w(mu, colors[mu]) = 1.0;
  }
  return StepFractionalPartition(std::move(step_lengths), std::move(w));
}

StepFractionalPartition StepFractionalPartition::uniform(std::vector<double> step_lengths, int q) {
  int k = static_cast<int>(step_lengths.size());
  Mat w(k, q, 1.0 / q);
  return StepFractionalPartition(std::move(step_lengths), std::move(w));
}

StepFractionalPartition StepFractionalPartition::constant_rows(std::vector<double> step_lengths,
                                                               const std::vector<double>& a) {
  int k = static_cast<int>(step_lengths.size());
  int q = static_cast<int>(a.size());
  Mat w(k, q);
  for (int mu = 0; mu < k; ++mu)
    for (int i = 0; i < q; ++i) w(mu, i) = a[i];
  return StepFractionalPartition(std::move(step_lengths), std::move(w));
}

std::vector<double> StepFractionalPartition::alpha() const {
  std::vector<double> a(q(), 0.0);
  for (int mu = 0; mu < k(); ++mu)
    for (int i = 0; i < q(); ++i) a[i] += len(mu) * weight(mu, i);
  return a;
}

double d1(const Quotient& a, const Quotient& b) {
  if (a.q() != b.q()) throw ValidationError("quotient dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.q(); ++i) s += std::fabs(a.alpha[i] - b.alpha[i]);
  for (int i = 0; i < a.q(); ++i)
    for (int j = 0; j < a.q(); ++j) s += std::fabs(a.beta(i, j) - b.beta(i, j));
  return s;
}

double d1(const StepFractionalPartition& a, const StepFractionalPartition& b) {
  if (a.k() != b.k() || a.q() != b.q())
    throw ValidationError("fractional partition shape mismatch");
  double s = 0.0;
  for (int mu = 0; mu < a.k(); ++mu) {
    if (std::fabs(a.len(mu) - b.len(mu)) > 1e-12)
      throw ValidationError("fractional partitions live on different step sets");
    double row = 0.0;
    for (int i = 0; i < a.q(); ++i) row += std::fabs(a.weight(mu, i) - b.weight(mu, i));
    s += a.len(mu) * row;
  }
  return s;
}

double hausdorff(const std::vector<Quotient>& a, const std::vector<Quotient>& b) {
  if (a.empty() || b.empty()) throw ValidationError("hausdorff requires nonempty sets");
  auto directed = [](const std::vector<Quotient>& from, const std::vector<Quotient>& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, d1(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff(const QuotientSet& a, const QuotientSet& b) {
  return hausdorff(a.points, b.points);
}

Quotient fractional_quotient(const StepGraphon& w, const StepFractionalPartition& rho) {
  if (rho.k() != w.k()) throw ValidationError("fractional partition does not match graphon steps");
  for (int mu = 0; mu < w.k(); ++mu)
    if (std::fabs(rho.len(mu) - w.len(mu)) > 1e-12)
      throw ValidationError("fractional partition step lengths do not match graphon");
  int q = rho.q();
  Quotient out;
  out.alpha = rho.alpha();
  out.beta = Mat::square(q, 0.0);
  // beta = M^T W M with M_{mu,i} = len_mu * rho_{mu,i}.
  int k = w.k();
  Mat m(k, q);
  for (int mu = 0; mu < k; ++mu)
    for (int i = 0; i < q; ++i) m(mu, i) = w.len(mu) * rho.weight(mu, i);
  Mat wm(k, q, 0.0);
  for (int mu = 0; mu < k; ++mu)
    for (int nu = 0; nu < k; ++nu) {
      double v = w.value(mu, nu);
      if (v == 0.0) continue;
      for (int j = 0; j < q; ++j) wm(mu, j) += v * m(nu, j);
    }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      double s = 0.0;
      for (int mu = 0; mu < k; ++mu) s += m(mu, i) * wm(mu, j);
      out.beta(i, j) = s;
    }
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      double v = 0.5 * (out.beta(i, j) + out.beta(j, i));
      out.beta(i, j) = v;
      out.beta(j, i) = v;
    }
  return out;
}

namespace {

void simplex_grid_rows(int q, int r, std::vector<std::vector<double>>& out) {
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

std::vector<long long> quotient_key(const Quotient& s) {
  std::vector<long long> key;
  key.reserve(s.alpha.size() + s.beta.data().size());
  for (double a : s.alpha) key.push_back(round12(a));
  for (double b : s.beta.data()) key.push_back(round12(b));
  return key;
}

}  // namespace

QuotientSet sample_quotient_set(const StepGraphon& w, int q, double mesh, long long samples,
                                uint64_t seed) {
  if (q < 1) throw ValidationError("q must be positive");
  if (!(mesh > 0.0) && samples <= 0)
    throw ValidationError("either a positive mesh or a positive sample count is required");
  QuotientSet out;
  out.meta.q = q;
  out.meta.mesh = mesh;
  out.meta.samples = samples;
  out.meta.seed = seed;
  out.meta.winf_used = w.max_abs_value();

  std::map<std::vector<long long>, Quotient> seen;
  auto add = [&](const StepFractionalPartition& rho) {
    Quotient s = fractional_quotient(w, rho);
    seen.emplace(quotient_key(s), std::move(s));
  };

  bool grid_mode = mesh > 0.0;
  double grid_size = 0.0;
  int r = 0;
  std::vector<std::vector<double>> rows;
  if (grid_mode) {
    r = static_cast<int>(std::ceil(1.0 / mesh));
    simplex_grid_rows(q, r, rows);
    grid_size = std::pow(static_cast<double>(rows.size()), w.k());
    if (grid_size > 1e7) {
      if (samples <= 0)
        throw BudgetError("simplex grid exceeds 10^7 points; supply a sample count");
      grid_mode = false;
    }
  }

  if (grid_mode) {
    int m = static_cast<int>(rows.size());
    std::vector<int> choice(w.k(), 0);
    while (true) {
      Mat weights(w.k(), q);
      for (int mu = 0; mu < w.k(); ++mu)
        for (int i = 0; i < q; ++i) weights(mu, i) = rows[choice[mu]][i];
      add(StepFractionalPartition(w.step_lengths(), std::move(weights)));
      int d = 0;
      while (d < w.k() && choice[d] == m - 1) choice[d++] = 0;
      if (d == w.k()) break;
      ++choice[d];
    }
    // Per-row rounding to the grid moves at most 2q/r in l1, hence the
    // quotient moves at most (1 + 2||W||_inf) * 2q/r.
    out.meta.covering_radius = 2.0 * (1.0 + 2.0 * out.meta.winf_used) * q / r;
  } else {
    CounterRng root(seed);
    // Always include the deterministic hard/uniform anchors.
    add(StepFractionalPartition::uniform(w.step_lengths(), q));
    for (int i = 0; i < q && w.k() == 1; ++i)
      add(StepFractionalPartition::hard(w.step_lengths(), {i}, q));
    for (long long s = 0; s < samples; ++s) {
      CounterRng rng = root.split(static_cast<uint64_t>(s));
      Mat weights(w.k(), q);
      for (int mu = 0; mu < w.k(); ++mu) {
        double tot = 0.0;
        std::vector<double> e(q);
        for (int i = 0; i < q; ++i) {
          e[i] = -std::log(1.0 - rng.next_unit());
          tot += e[i];
        }
        double row_sum = 0.0;
        for (int i = 0; i < q - 1; ++i) {
          weights(mu, i) = e[i] / tot;
          row_sum += weights(mu, i);
        }
        weights(mu, q - 1) = 1.0 - row_sum;
      }
      add(StepFractionalPartition(w.step_lengths(), std::move(weights)));
    }
    out.meta.covering_radius = std::numeric_limits<double>::infinity();
  }

  out.points.reserve(seen.size());
  for (auto& [k, v] : seen) out.points.push_back(std::move(v));
  return out;
}

double entropy_of(const std::vector<double>& a) {
  double h = 0.0;
  for (double x : a)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double entropy(const StepFractionalPartition& rho) {
  double h = 0.0;
  for (int mu = 0; mu < rho.k(); ++mu) {
    double row = 0.0;
    for (int i = 0; i < rho.q(); ++i) {
      double v = rho.weight(mu, i);
      if (v > 0.0) row -= v * std::log(v);
    }
    h += rho.len(mu) * row;
  }
  return h;
}

}  // namespace graphlim
