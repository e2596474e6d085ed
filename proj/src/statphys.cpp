#include "graphlim/statphys.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "graphlim/rng.hpp"

namespace graphlim {

namespace {
constexpr double kFeasTol = 1e-12;  // feasibility comparisons on rational weights
}

CouplingModel::CouplingModel(Mat j_, std::vector<double> h_, std::vector<double> a_, double eps_)
    : j(std::move(j_)), h(std::move(h_)), a(std::move(a_)), eps(eps_) {
  int qq = j.rows();
  if (qq < 1 || j.cols() != qq) throw ValidationError("coupling matrix must be square");
  if (!j.is_symmetric_exact()) throw ValidationError("coupling matrix must be symmetric");
  if (h.empty()) h.assign(qq, 0.0);
  if (static_cast<int>(h.size()) != qq) throw ValidationError("magnetic field size mismatch");
  if (static_cast<int>(a.size()) != qq) throw ValidationError("target vector size mismatch");
  double s = 0.0;
  for (double x : a) {
    if (x < -1e-12) throw ValidationError("target vector must be nonnegative");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw ValidationError("target vector must sum to 1");
  if (!(eps >= 0.0)) throw ValidationError("eps must be nonnegative");
}

double config_energy(const WeightedGraph& g, const Mat& j, const VertexPartition& p) {
  if (j.rows() != p.q || !j.is_symmetric_exact())
    throw ValidationError("coupling matrix does not match partition");
  if (static_cast<int>(p.assignment.size()) != g.n())
    throw ValidationError("partition does not match graph");
  double density = graph_norm(g, 1.0);
  if (density == 0.0) return 0.0;
  double ag2 = g.total_weight() * g.total_weight();
  double s = 0.0;
  for (int u = 0; u < g.n(); ++u) {
    if (g.alpha(u) == 0.0) continue;
    for (int v = 0; v < g.n(); ++v) {
      double b = g.beta(u, v);
      if (b == 0.0 || g.alpha(v) == 0.0) continue;
      s += g.alpha(u) * g.alpha(v) * b * j(p.assignment[v], p.assignment[u]);
    }
  }
  return -s / (density * ag2);
}

namespace {

std::vector<double> map_alpha(const WeightedGraph& g, const std::vector<int>& phi, int q) {
  std::vector<double> a(q, 0.0);
  for (int v = 0; v < g.n(); ++v) a[phi[v]] += g.alpha(v);
  for (double& x : a) x /= g.total_weight();
  return a;
}

bool alpha_feasible(const std::vector<double>& alpha, const std::vector<double>& a, double eps) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::fabs(alpha[i] - a[i]) > eps + kFeasTol) return false;
  return true;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void check_budget(const WeightedGraph& g, int q, double budget, const char* what) {
  if (pow_checked(q, g.n(), budget) > budget)
    throw BudgetError(std::string(what) + ": q^n exceeds the enumeration budget");
}

// Greedy feasible start: assign vertices (heaviest first) to the color
// with the largest remaining deficit, then repair by moving weight from
// overfull to underfull colors.
std::optional<std::vector<int>> greedy_feasible(const WeightedGraph& g,
                                                const std::vector<double>& a, double eps) {
  int n = g.n(), q = static_cast<int>(a.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return g.alpha(x) > g.alpha(y); });
  std::vector<int> phi(n, 0);
  std::vector<double> cur(q, 0.0);
  for (int v : order) {
    int best = 0;
    double best_deficit = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < q; ++i) {
      double deficit = a[i] * g.total_weight() - cur[i];
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = i;
      }
    }
    phi[v] = best;
    cur[best] += g.alpha(v);
  }
  for (int round = 0; round < 4 * n; ++round) {
    std::vector<double> alpha = map_alpha(g, phi, q);
    if (alpha_feasible(alpha, a, eps)) return phi;
    int over = 0, under = 0;
    for (int i = 0; i < q; ++i) {
      if (alpha[i] - a[i] > alpha[over] - a[over]) over = i;
      if (alpha[i] - a[i] < alpha[under] - a[under]) under = i;
    }
    // Smallest vertex of the overfull color moves to the underfull one.
    int pick = -1;
    for (int v : order)
      if (phi[v] == over && g.alpha(v) > 0.0) pick = v;
    if (pick < 0) break;
    phi[pick] = under;
  }
  std::vector<double> alpha = map_alpha(g, phi, q);
  if (alpha_feasible(alpha, a, eps)) return phi;
  return std::nullopt;
}

struct AnnealParams {
  double t0;
  double gamma = 0.995;
  int steps_per_restart = 30000;
  int restarts = 8;
};

}  // namespace

bool ensemble_feasible(const WeightedGraph& g, const std::vector<double>& a, double eps,
                       double budget) {
  if (eps >= g.max_weight() / g.total_weight() - kFeasTol) return true;
  if (greedy_feasible(g, a, eps)) return true;
  int q = static_cast<int>(a.size());
  if (pow_checked(q, g.n(), budget) <= budget) {
    bool found = false;
    for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
      if (!found && alpha_feasible(map_alpha(g, phi, q), a, eps)) found = true;
    });
    return found;
  }
  return false;
}

EnergyResult microcanonical_gse(const WeightedGraph& g, const CouplingModel& m, OptMethod method,
                                double budget, uint64_t seed) {
  int q = m.q();
  EnergyResult res;
  if (method == OptMethod::kExact) {
    check_budget(g, q, budget, "microcanonical_gse");
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_phi;
    for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
      if (!alpha_feasible(map_alpha(g, phi, q), m.a, m.eps)) return;
      double e = config_energy(g, m.j, VertexPartition(phi, q));
      if (e < best - 1e-15 || (std::fabs(e - best) <= 1e-15 && phi < best_phi)) {
        best = e;
        best_phi = phi;
      }
    });
    if (best_phi.empty() && !std::isfinite(best))
      throw InfeasibleError("microcanonical ensemble is empty for the given (a, eps)");
    res.value = best;
    res.opt_map = VertexPartition(best_phi, q);
    res.exact_flag = true;
    res.method = "exact_enumeration";
    return res;
  }

  // Simulated annealing restricted to the feasible ensemble.
  auto start = greedy_feasible(g, m.a, m.eps);
  if (!start) throw InfeasibleError("no feasible configuration found for the given (a, eps)");
  AnnealParams params;
  params.t0 = std::max(m.j_inf(), 1e-3);
  CounterRng root(seed);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_phi;
  for (int r = 0; r < params.restarts; ++r) {
    CounterRng rng = root.split(r);
    std::vector<int> phi = *start;
    if (r > 0) {  // shuffled variant of the greedy start
      for (int t = 0; t < g.n(); ++t) {
        int u = rng.uniform_int(0, g.n() - 1), v = rng.uniform_int(0, g.n() - 1);
        std::swap(phi[u], phi[v]);
      }
      if (!alpha_feasible(map_alpha(g, phi, q), m.a, m.eps)) phi = *start;
    }
    double e = config_energy(g, m.j, VertexPartition(phi, q));
    std::vector<double> alpha = map_alpha(g, phi, q);
    double temp = params.t0;
    for (int step = 0; step < params.steps_per_restart; ++step, temp *= params.gamma) {
      int u = rng.uniform_int(0, g.n() - 1);
      std::vector<int> cand = phi;
      if (rng.bernoulli(0.5)) {
        cand[u] = rng.uniform_int(0, q - 1);
      } else {
        int v = rng.uniform_int(0, g.n() - 1);
        std::swap(cand[u], cand[v]);
      }
      std::vector<double> cand_alpha = map_alpha(g, cand, q);
      if (!alpha_feasible(cand_alpha, m.a, m.eps)) continue;
      double ce = config_energy(g, m.j, VertexPartition(cand, q));
      double delta = ce - e;
      if (delta <= 0.0 || rng.next_unit() < std::exp(-delta / std::max(temp, 1e-12))) {
        phi = std::move(cand);
        alpha = std::move(cand_alpha);
        e = ce;
      }
      if (e < best) {
        best = e;
        best_phi = phi;
      }
    }
  }
  res.value = best;
  res.opt_map = VertexPartition(best_phi, q);
  res.exact_flag = false;
  res.method = "anneal";
  return res;
}

EnergyResult microcanonical_free_energy(const WeightedGraph& g, const CouplingModel& m,
                                        double budget) {
  int q = m.q();
  check_budget(g, q, budget, "microcanonical_free_energy");
  std::vector<double> exponents;
  for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
    if (!alpha_feasible(map_alpha(g, phi, q), m.a, m.eps)) return;
    exponents.push_back(-g.n() * config_energy(g, m.j, VertexPartition(phi, q)));
  });
  if (exponents.empty())
    throw InfeasibleError("microcanonical ensemble is empty for the given (a, eps)");
  EnergyResult res;
  res.value = -log_sum_exp(exponents) / g.n();
  res.exact_flag = true;
  res.method = "exact_enumeration";
  return res;
}

EnergyResult free_energy(const WeightedGraph& g, const Mat& j, const std::vector<double>& h,
                         double budget) {
  int q = j.rows();
  if (static_cast<int>(h.size()) != q) throw ValidationError("magnetic field size mismatch");
  check_budget(g, q, budget, "free_energy");
  std::vector<double> exponents;
  for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
    double e = config_energy(g, j, VertexPartition(phi, q));
    exponents.push_back(g.n() * (-e + dot(h, map_alpha(g, phi, q))));
  });
  EnergyResult res;
  res.value = -log_sum_exp(exponents) / g.n();
  res.exact_flag = true;
  res.method = "exact_enumeration";
  return res;
}

EnergyResult ground_state_energy(const WeightedGraph& g, const Mat& j,
                                 const std::vector<double>& h, double budget, OptMethod method,
                                 uint64_t seed) {
  int q = j.rows();
  if (static_cast<int>(h.size()) != q) throw ValidationError("magnetic field size mismatch");
  if (method == OptMethod::kExact) {
    check_budget(g, q, budget, "ground_state_energy");
    EnergyResult res;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_phi;
    for_each_map(g.n(), q, [&](const std::vector<int>& phi) {
      double v =
          config_energy(g, j, VertexPartition(phi, q)) - dot(h, map_alpha(g, phi, q));
      if (v < best - 1e-15 || (std::fabs(v - best) <= 1e-15 && phi < best_phi)) {
        best = v;
        best_phi = phi;
      }
    });
    res.value = best;
    res.opt_map = VertexPartition(best_phi, q);
    res.exact_flag = true;
    res.method = "exact_enumeration";
    return res;
  }
  // Unrestricted annealing reuses the microcanonical machinery with a full
  // slack so every configuration is feasible; the field term is folded in
  // by post-processing moves directly here.
  CounterRng root(seed);
  AnnealParams params;
  params.t0 = std::max({j.max_abs(), std::fabs(h.empty() ? 0.0 : h[0]), 1e-3});
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_phi;
  for (int r = 0; r < params.restarts; ++r) {
    CounterRng rng = root.split(r);
    std::vector<int> phi(g.n());
    for (int v = 0; v < g.n(); ++v) phi[v] = rng.uniform_int(0, q - 1);
    double e = config_energy(g, j, VertexPartition(phi, q)) - dot(h, map_alpha(g, phi, q));
    double temp = params.t0;
    for (int step = 0; step < params.steps_per_restart; ++step, temp *= params.gamma) {
      int u = rng.uniform_int(0, g.n() - 1);
      int old = phi[u];
      phi[u] = rng.uniform_int(0, q - 1);
      double ce = config_energy(g, j, VertexPartition(phi, q)) - dot(h, map_alpha(g, phi, q));
      double delta = ce - e;
      if (delta <= 0.0 || rng.next_unit() < std::exp(-delta / std::max(temp, 1e-12))) {
        e = ce;
      } else {
        phi[u] = old;
      }
      if (e < best) {
        best = e;
        best_phi = phi;
      }
    }
  }
  EnergyResult res;
  res.value = best;
  res.opt_map = VertexPartition(best_phi, q);
  res.exact_flag = false;
  res.method = "anneal";
  return res;
}

double graphon_energy(const StepGraphon& w, const Mat& j, const StepFractionalPartition& rho) {
  if (j.rows() != rho.q() || !j.is_symmetric_exact())
    throw ValidationError("coupling matrix does not match partition");
  Quotient s = fractional_quotient(w, rho);
  double e = 0.0;
  for (int i = 0; i < s.q(); ++i)
    for (int jj = 0; jj < s.q(); ++jj) e += s.beta(i, jj) * j(i, jj);
  return -e;
}

namespace {

void validate_simplex(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) {
    if (x < -1e-12) throw ValidationError("simplex vector must be nonnegative");
    s += x;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw ValidationError("simplex vector must sum to 1");
}

bool is_constant_graphon(const StepGraphon& w) {
  double v0 = w.value(0, 0);
  for (double v : w.values().data())
    if (v != v0) return false;
  return true;
}

// x is the transportation table x_{mu,i} = len_mu * rho_{mu,i} with row
// sums len_mu and column sums a_i.
struct TransportState {
  int k, q;
  std::vector<double> lens;
  Mat x;

  StepFractionalPartition to_rho() const {
    Mat r(k, q);
    for (int mu = 0; mu < k; ++mu) {
      double row = 0.0;
      for (int i = 0; i < q; ++i) {
        r(mu, i) = std::clamp(x(mu, i) / lens[mu], 0.0, 1.0);
        row += r(mu, i);
      }
      // Exact row renormalization against drift.
      for (int i = 0; i < q; ++i) r(mu, i) /= row;
    }
    return StepFractionalPartition(lens, std::move(r));
  }
};

double transport_energy(const StepGraphon& w, const Mat& j, const TransportState& st) {
  // E = -sum_{i,j} J_ij * x_i^T W x_j  (columns of x, W unweighted values).
  int k = st.k, q = st.q;
  Mat wx(k, q, 0.0);
  for (int mu = 0; mu < k; ++mu)
    for (int nu = 0; nu < k; ++nu) {
      double v = w.value(mu, nu);
      if (v == 0.0) continue;
      for (int i = 0; i < q; ++i) wx(mu, i) += v * st.x(nu, i);
    }
  double e = 0.0;
  for (int i = 0; i < q; ++i)
    for (int jj = 0; jj < q; ++jj) {
      if (j(i, jj) == 0.0) continue;
      double s = 0.0;
      for (int mu = 0; mu < k; ++mu) s += st.x(mu, i) * wx(mu, jj);
      e += j(i, jj) * s;
    }
  return -e;
}

// First-improvement sweeps over all 2x2 exchange cycles; exact 1-D
// quadratic minimization along each cycle.
double transport_descent(const StepGraphon& w, const Mat& j, TransportState& st) {
  int k = st.k, q = st.q;
  double e = transport_energy(w, j, st);
  bool improved = true;
  for (int pass = 0; pass < 200 && improved; ++pass) {
    improved = false;
    for (int mu = 0; mu < k; ++mu)
      for (int nu = mu + 1; nu < k; ++nu)
        for (int i = 0; i < q; ++i)
          for (int jj = i + 1; jj < q; ++jj) {
            double t_lo = -std::min(st.x(mu, i), st.x(nu, jj));
            double t_hi = std::min(st.x(mu, jj), st.x(nu, i));
            if (t_hi - t_lo < 1e-14) continue;
            // E(t) = A t^2 + B t + e along x_mu,i += t, x_mu,jj -= t,
            // x_nu,i -= t, x_nu,jj += t.
            double s = w.value(mu, mu) - 2.0 * w.value(mu, nu) + w.value(nu, nu);
            double a_coef = -s * (j(i, i) + j(jj, jj) - 2.0 * j(i, jj));
            double b_coef = 0.0;
            for (int b = 0; b < q; ++b) {
              double gb = 0.0;
              for (int lam = 0; lam < k; ++lam)
                gb += (w.value(mu, lam) - w.value(nu, lam)) * st.x(lam, b);
              b_coef += -2.0 * (j(i, b) - j(jj, b)) * gb;
            }
            double t_best = t_lo;
            double v_best = a_coef * t_lo * t_lo + b_coef * t_lo;
            double v_hi = a_coef * t_hi * t_hi + b_coef * t_hi;
            if (v_hi < v_best) {
              v_best = v_hi;
              t_best = t_hi;
            }
            if (a_coef > 0.0) {
              double t_star = std::clamp(-b_coef / (2.0 * a_coef), t_lo, t_hi);
              double v_star = a_coef * t_star * t_star + b_coef * t_star;
              if (v_star < v_best) {
                v_best = v_star;
                t_best = t_star;
              }
            }
            if (v_best < -1e-14) {
              st.x(mu, i) += t_best;
              st.x(mu, jj) -= t_best;
              st.x(nu, i) -= t_best;
              st.x(nu, jj) += t_best;
              e += v_best;
              improved = true;
            }
          }
  }
  return e;
}

TransportState product_start(const StepGraphon& w, const std::vector<double>& a) {
  TransportState st;
  st.k = w.k();
  st.q = static_cast<int>(a.size());
  st.lens = w.step_lengths();
  st.x = Mat(st.k, st.q);
  for (int mu = 0; mu < st.k; ++mu)
    for (int i = 0; i < st.q; ++i) st.x(mu, i) = w.len(mu) * a[i];
  return st;
}

void randomize_transport(TransportState& st, CounterRng& rng, int moves) {
  for (int t = 0; t < moves; ++t) {
    int mu = rng.uniform_int(0, st.k - 1), nu = rng.uniform_int(0, st.k - 1);
    int i = rng.uniform_int(0, st.q - 1), jj = rng.uniform_int(0, st.q - 1);
    if (mu == nu || i == jj) continue;
    double t_lo = -std::min(st.x(mu, i), st.x(nu, jj));
    double t_hi = std::min(st.x(mu, jj), st.x(nu, i));
    if (t_hi <= t_lo) continue;
    double tv = rng.uniform(t_lo, t_hi);
    st.x(mu, i) += tv;
    st.x(mu, jj) -= tv;
    st.x(nu, i) -= tv;
    st.x(nu, jj) += tv;
  }
}

}  // namespace

EnergyResult graphon_gse(const StepGraphon& w, const Mat& j, const std::vector<double>& a,
                         double mesh, int restarts, uint64_t seed) {
  if (j.rows() != static_cast<int>(a.size()) || !j.is_symmetric_exact())
    throw ValidationError("coupling matrix does not match target vector");
  validate_simplex(a);
  int q = j.rows();
  EnergyResult res;

  if (is_constant_graphon(w)) {
    double c = w.value(0, 0);
    double s = 0.0;
    for (int i = 0; i < q; ++i)
      for (int jj = 0; jj < q; ++jj) s += j(i, jj) * a[i] * a[jj];
    res.value = -c * s;
    res.opt_rho = StepFractionalPartition::constant_rows(w.step_lengths(), a);
    res.exact_flag = true;
    res.method = "closed_form";
    return res;
  }

  // Local descent from the product start plus seeded restarts.
  CounterRng root(seed);
  TransportState best_state = product_start(w, a);
  double best = transport_descent(w, j, best_state);
  for (int r = 0; r < std::max(0, restarts); ++r) {
    CounterRng rng = root.split(r);
    TransportState st = product_start(w, a);
    randomize_transport(st, rng, 20 * w.k() * q);
    double v = transport_descent(w, j, st);
    if (v < best) {
      best = v;
      best_state = st;
    }
  }
  res.value = best;
  res.opt_rho = best_state.to_rho();
  res.exact_flag = false;
  res.method = "local_descent";
  res.resolution = std::numeric_limits<double>::infinity();

  // Simplex-grid certification at small k*q: |value - inf| bounded by the
  // grid resolution 2 * ||J||_inf * ||W||_inf * 2q/r.
  if (mesh > 0.0) {
    int r = static_cast<int>(std::ceil(1.0 / mesh));
    double rows = 1.0;
    for (int i = 1; i < q; ++i) rows *= static_cast<double>(r + i) / i;
    if (std::pow(rows, w.k()) <= 2e6) {
      std::vector<std::vector<double>> grid_rows;
      {
        std::vector<int> counts(q, 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
          if (pos == q - 1) {
            counts[pos] = left;
            std::vector<double> row(q);
            for (int i = 0; i < q; ++i) row[i] = static_cast<double>(counts[i]) / r;
            grid_rows.push_back(std::move(row));
            return;
          }
          for (int c = 0; c <= left; ++c) {
            counts[pos] = c;
            rec(pos + 1, left - c);
          }
        };
        rec(0, r);
      }
      double tol = 2.0 * q / static_cast<double>(r);
      int m = static_cast<int>(grid_rows.size());
      std::vector<int> choice(w.k(), 0);
      double grid_best = std::numeric_limits<double>::infinity();
      Mat weights(w.k(), q);
      while (true) {
        double l1 = 0.0;
        for (int i = 0; i < q; ++i) {
          double ai = 0.0;
          for (int mu = 0; mu < w.k(); ++mu) ai += w.len(mu) * grid_rows[choice[mu]][i];
          l1 += std::fabs(ai - a[i]);
        }
        if (l1 <= tol + 1e-12) {
          for (int mu = 0; mu < w.k(); ++mu)
            for (int i = 0; i < q; ++i) weights(mu, i) = grid_rows[choice[mu]][i];
          StepFractionalPartition rho(w.step_lengths(), weights);
          grid_best = std::min(grid_best, graphon_energy(w, j, rho));
        }
        int d = 0;
        while (d < w.k() && choice[d] == m - 1) choice[d++] = 0;
        if (d == w.k()) break;
        ++choice[d];
      }
      if (std::isfinite(grid_best)) {
        double resolution = 2.0 * j.max_abs() * w.max_abs_value() * tol;
        res.value = std::min(res.value, grid_best);
        res.resolution = resolution;
        res.method = "grid+local_descent";
      }
    }
  }
  return res;
}

EnergyResult graphon_free_energy(const StepGraphon& w, const Mat& j, const std::vector<double>& a,
                                 int iters, int restarts, uint64_t seed) {
  if (j.rows() != static_cast<int>(a.size()) || !j.is_symmetric_exact())
    throw ValidationError("coupling matrix does not match target vector");
  validate_simplex(a);
  int q = j.rows();
  int k = w.k();
  EnergyResult res;

  double entropy_a = entropy_of(a);
  if (is_constant_graphon(w) || j.max_abs() == 0.0) {
    // Energy is forced (beta_ij = c * a_i a_j), entropy is maximized by
    // the constant partition rho = a.
    double c = is_constant_graphon(w) ? w.value(0, 0) : 0.0;
    double s = 0.0;
    if (j.max_abs() != 0.0)
      for (int i = 0; i < q; ++i)
        for (int jj = 0; jj < q; ++jj) s += j(i, jj) * a[i] * a[jj];
    res.value = -c * s - entropy_a;
    res.opt_rho = StepFractionalPartition::constant_rows(w.step_lengths(), a);
    res.exact_flag = true;
    res.method = "closed_form";
    return res;
  }

  // Mean-field iteration: rho_mu,i ~ u_i * exp(-g_mu,i), with dual scalers
  // u_i fitted so that alpha(rho) = a.
  auto objective = [&](const Mat& rho) {
    StepFractionalPartition p(w.step_lengths(), rho);
    return graphon_energy(w, j, p) - entropy(p);
  };

  CounterRng root(seed);
  double best = std::numeric_limits<double>::infinity();
  Mat best_rho;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    CounterRng rng = root.split(r);
    Mat rho(k, q);
    for (int mu = 0; mu < k; ++mu)
      for (int i = 0; i < q; ++i) rho(mu, i) = a[i];
    if (r > 0) {
      for (int mu = 0; mu < k; ++mu) {
        double tot = 0.0;
        for (int i = 0; i < q; ++i) {
          rho(mu, i) = (a[i] + 1e-9) * (0.25 + rng.next_unit());
          tot += rho(mu, i);
        }
        for (int i = 0; i < q; ++i) rho(mu, i) /= tot;
      }
    }
    for (int it = 0; it < std::max(1, iters); ++it) {
      // Local fields g_mu,i = -2 sum_b J_ib sum_nu len_nu rho_nu,b W_mu,nu.
      Mat field(k, q, 0.0);
      for (int mu = 0; mu < k; ++mu)
        for (int i = 0; i < q; ++i) {
          double s = 0.0;
          for (int b = 0; b < q; ++b) {
            if (j(i, b) == 0.0) continue;
            double inner = 0.0;
            for (int nu = 0; nu < k; ++nu) inner += w.len(nu) * rho(nu, b) * w.value(mu, nu);
            s += j(i, b) * inner;
          }
          field(mu, i) = -2.0 * s;
        }
      // Base Boltzmann weights, then dual scaling to match alpha = a.
      Mat base(k, q);
      for (int mu = 0; mu < k; ++mu) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < q; ++i) mx = std::max(mx, -field(mu, i));
        for (int i = 0; i < q; ++i) base(mu, i) = std::exp(-field(mu, i) - mx);
      }
      std::vector<double> u(q, 1.0);
      Mat next(k, q);
      for (int fit = 0; fit < 500; ++fit) {
        for (int mu = 0; mu < k; ++mu) {
          double z = 0.0;
          for (int i = 0; i < q; ++i) z += u[i] * base(mu, i);
          for (int i = 0; i < q; ++i) next(mu, i) = u[i] * base(mu, i) / z;
        }
        double resid = 0.0;
        for (int i = 0; i < q; ++i) {
          double ai = 0.0;
          for (int mu = 0; mu < k; ++mu) ai += w.len(mu) * next(mu, i);
          resid = std::max(resid, std::fabs(ai - a[i]));
          if (a[i] <= 0.0) {
            u[i] = 0.0;
          } else if (ai > 0.0) {
            u[i] *= a[i] / ai;
          }
        }
        if (resid < 1e-10) break;
      }
      // Damped update.
      double theta = 0.7;
      for (int mu = 0; mu < k; ++mu) {
        double row = 0.0;
        for (int i = 0; i < q; ++i) {
          rho(mu, i) = (1.0 - theta) * rho(mu, i) + theta * next(mu, i);
          row += rho(mu, i);
        }
        for (int i = 0; i < q; ++i) rho(mu, i) /= row;
      }
    }
    // Final exact projection of the column sums onto a (IPF on the fixed
    // rho), then evaluate.
    for (int fit = 0; fit < 500; ++fit) {
      double resid = 0.0;
      for (int i = 0; i < q; ++i) {
        double ai = 0.0;
        for (int mu = 0; mu < k; ++mu) ai += w.len(mu) * rho(mu, i);
        resid = std::max(resid, std::fabs(ai - a[i]));
        if (ai > 0.0 && a[i] > 0.0)
          for (int mu = 0; mu < k; ++mu) rho(mu, i) *= a[i] / ai;
        else if (a[i] <= 0.0)
          for (int mu = 0; mu < k; ++mu) rho(mu, i) = 0.0;
      }
      for (int mu = 0; mu < k; ++mu) {
        double row = 0.0;
        for (int i = 0; i < q; ++i) row += rho(mu, i);
        for (int i = 0; i < q; ++i) rho(mu, i) /= row;
      }
      if (resid < 1e-10) break;
    }
    double v = objective(rho);
    if (v < best) {
      best = v;
      best_rho = rho;
    }
  }
  res.value = best;
  res.opt_rho = StepFractionalPartition(w.step_lengths(), best_rho);
  res.exact_flag = false;
  res.method = "mean_field";
  res.resolution = std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace graphlim
