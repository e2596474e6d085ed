#include <doctest.h>

#include <cmath>

#include "graphlim/large_deviations.hpp"
#include "graphlim/models.hpp"
#include "graphlim/statphys.hpp"
#include "test_helpers.hpp"

using namespace graphlim;
using namespace graphlim::testing;

namespace {

Quotient split_quotient() {
  Quotient s;
  s.alpha = {0.5, 0.5};
  s.beta = testing::sym2(0, 0.5, 0);
  return s;
}

Quotient merged_quotient() {
  Quotient s;
  s.alpha = {1.0, 0.0};
  s.beta = testing::sym2(1, 0, 0);
  return s;
}

BlockStructure trivial_blocks(int n) {
  BlockStructure b;
  b.class_of.assign(n, 0);
  b.classes = 1;
  return b;
}

}  // namespace

TEST_CASE("quotient_ball_probability on K2") {
  WeightedGraph g = k2();
  RateEstimate split = quotient_ball_probability(g, 2, split_quotient(), 0.01,
                                                 LdMethod::kExactEnumeration, 1e6, 0, 1);
  CHECK(split.probability == doctest::Approx(0.5).epsilon(1e-12));
  RateEstimate merged = quotient_ball_probability(g, 2, merged_quotient(), 0.01,
                                                  LdMethod::kExactEnumeration, 1e6, 0, 1);
  CHECK(merged.probability == doctest::Approx(0.25).epsilon(1e-12));
  SUBCASE("radius 4 covers the whole quotient space") {
    CounterRng rng(157);
    for (int t = 0; t < 10; ++t) {
      WeightedGraph h = random_graph(rng, rng.uniform_int(1, 5));
      RateEstimate all = quotient_ball_probability(h, 2, split_quotient(), 4.0,
                                                   LdMethod::kExactEnumeration, 1e6, 0, 1);
      CHECK(all.probability == doctest::Approx(1.0));
      CHECK(all.value == doctest::Approx(0.0));
    }
  }
  SUBCASE("impossible target has probability 0 and rate infinity") {
    Quotient impossible;
    impossible.alpha = {0.123, 0.877};
    impossible.beta = Mat::square(2, 0.0);
    RateEstimate r = quotient_ball_probability(g, 2, impossible, 0.001,
                                               LdMethod::kExactEnumeration, 1e6, 0, 1);
    CHECK(r.probability == 0.0);
    CHECK(std::isinf(r.value));
  }
}

TEST_CASE("exact_multinomial equals exact_enumeration on block-constant graphs") {
  CounterRng rng(163);
  for (int t = 0; t < 24; ++t) {
    // Block-constant fixtures: clique-plus-isolated and 2-block graphs.
    int n = rng.uniform_int(4, 9);
    WeightedGraph g = clique_plus_isolated(n, rng.uniform_int(0, n));
    BlockStructure blocks;
    blocks.class_of.resize(n);
    int c = 0;
    for (int v = 0; v < n; ++v) {
      bool in_clique = false;
      for (int u = 0; u < n && !in_clique; ++u)
        if (g.beta(v, u) != 0.0) in_clique = true;
      blocks.class_of[v] = in_clique ? 0 : 1;
      c = std::max(c, blocks.class_of[v] + 1);
    }
    blocks.classes = c;
    int q = rng.uniform_int(1, 3);
    // Random reachable target: quotient of a random map.
    std::vector<int> phi(n);
    for (int v = 0; v < n; ++v) phi[v] = rng.uniform_int(0, q - 1);
    Quotient target = quotient(g, VertexPartition(phi, q));
    for (double eps : {0.05, 0.3, 1.0}) {
      RateEstimate a =
          quotient_ball_probability(g, q, target, eps, LdMethod::kExactEnumeration, 1e8, 0, 1);
      RateEstimate b = quotient_ball_probability(g, q, target, eps, LdMethod::kExactMultinomial,
                                                 1e8, 0, 1, &blocks);
      CHECK(a.probability == doctest::Approx(b.probability).epsilon(1e-12));
    }
  }
}

TEST_CASE("probability is monotone in eps and rates stay in range") {
  CounterRng rng(167);
  for (int t = 0; t < 10; ++t) {
    int n = rng.uniform_int(2, 6), q = rng.uniform_int(1, 3);
    WeightedGraph g = random_graph(rng, n, true);
    std::vector<int> phi(n);
    for (int v = 0; v < n; ++v) phi[v] = rng.uniform_int(0, q - 1);
    Quotient target = quotient(g, VertexPartition(phi, q));
    double prev_p = -1.0, prev_rate = std::numeric_limits<double>::infinity();
    for (double eps : {0.01, 0.1, 0.5, 2.0, 4.0}) {
      RateEstimate r =
          quotient_ball_probability(g, q, target, eps, LdMethod::kExactEnumeration, 1e7, 0, 1);
      CHECK(r.probability >= prev_p - 1e-15);
      CHECK(r.value <= prev_rate + 1e-12);
      prev_p = r.probability;
      prev_rate = r.value;
      if (std::isfinite(r.value)) {
        CHECK(r.value >= -1e-12);
        CHECK(r.value <= std::log(static_cast<double>(q)) + 1e-12);
      }
    }
  }
}

TEST_CASE("monte carlo agrees with enumeration within its error bars") {
  WeightedGraph g = k3();
  Quotient target = quotient(g, VertexPartition({0, 0, 1}, 2));
  RateEstimate exact =
      quotient_ball_probability(g, 2, target, 0.05, LdMethod::kExactEnumeration, 1e6, 0, 1);
  RateEstimate mc =
      quotient_ball_probability(g, 2, target, 0.05, LdMethod::kMonteCarlo, 1e6, 20000, 7);
  CHECK(std::fabs(mc.probability - exact.probability) <= 0.02);
  CHECK(mc.samples == 20000);
}

TEST_CASE("q = 1 collapses to the single quotient") {
  WeightedGraph g = k3();
  Quotient target = quotient(g, VertexPartition({0, 0, 0}, 1));
  RateEstimate r =
      quotient_ball_probability(g, 1, target, 0.01, LdMethod::kExactEnumeration, 1e6, 0, 1);
  CHECK(r.probability == 1.0);
  CHECK(r.value == 0.0);
  BlockStructure blocks = trivial_blocks(3);
  (void)blocks;
}

TEST_CASE("empirical_rate emits a value per graph") {
  std::vector<WeightedGraph> gs = {k2(), k3(), c4()};
  Quotient target = quotient(k2(), VertexPartition({0, 1}, 2));
  auto rates = empirical_rate(gs, 2, target, 2.0, LdMethod::kExactEnumeration, 1e7, 0, 1);
  CHECK(rates.size() == 3);
  for (const auto& r : rates) CHECK(std::isfinite(r.value));
}

TEST_CASE("free-energy consistency with ball probabilities at K2/K3 scale") {
  // Z^(a,eps) = q^n * sum over isolated quotient atoms of P_atom * exp(n <beta, J>).
  CounterRng rng(173);
  for (const WeightedGraph& g : {k2(), k3()}) {
    int q = 2;
    Mat j = testing::sym2(0.8, -0.4, 0.3);
    std::vector<double> a = {0.5, 0.5};
    double eps = 0.6;
    CouplingModel m(j, {}, a, eps);
    double f_direct = microcanonical_free_energy(g, m, 1e6).value;
    auto atoms = enumerate_quotients(g, q, 1e6);
    std::vector<double> terms;
    for (const auto& s : atoms) {
      bool feasible = true;
      for (int i = 0; i < q; ++i)
        if (std::fabs(s.alpha[i] - a[i]) > eps + 1e-12) feasible = false;
      if (!feasible) continue;
      RateEstimate pr =
          quotient_ball_probability(g, q, s, 1e-9, LdMethod::kExactEnumeration, 1e6, 0, 1);
      if (pr.probability == 0.0) continue;
      double pairing = 0.0;
      for (int x = 0; x < q; ++x)
        for (int y = 0; y < q; ++y) pairing += s.beta(x, y) * j(x, y);
      terms.push_back(std::log(pr.probability) + g.n() * std::log(2.0) + g.n() * pairing);
    }
    double f_from_atoms = -log_sum_exp(terms) / g.n();
    CHECK(f_from_atoms == doctest::Approx(f_direct).epsilon(1e-9));
  }
}

TEST_CASE("graphon_rate") {
  SUBCASE("target reached by the uniform partition has rate 0") {
    CounterRng rng(179);
    StepGraphon w = random_graphon(rng, 2, 1.0);
    Quotient target =
        fractional_quotient(w, StepFractionalPartition::uniform(w.step_lengths(), 2));
    GraphonRateResult r = graphon_rate(w, 2, target, 1.0 / 8, 4, 1);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("unreachable target has rate infinity") {
    StepGraphon w = StepGraphon::constant(1.0);
    Quotient target;
    target.alpha = {0.5, 0.5};
    target.beta = testing::sym2(0.5, -0.5, 0.5);  // negative mass is unreachable
    GraphonRateResult r = graphon_rate(w, 2, target, 1.0 / 8, 4, 1);
    CHECK(std::isinf(r.value));
  }
  SUBCASE("zero graphon with the balanced alpha target") {
    Quotient target;
    target.alpha = {0.5, 0.5};
    target.beta = Mat::square(2, 0.0);
    GraphonRateResult r = graphon_rate(StepGraphon::zero(), 2, target, 1.0 / 8, 4, 1);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("clique rate function fixture (small scale)") {
  // n = 200, c_n = 14: the multinomial route reproduces the closed-form
  // rate log 2 + sum_i alpha_i log alpha_i within the finite-n error.
  int n = 200, c = 14;
  WeightedGraph g = clique_plus_isolated(n, c);
  BlockStructure blocks;
  blocks.class_of.resize(n);
  for (int v = 0; v < n; ++v) blocks.class_of[v] = v < c ? 0 : 1;
  blocks.classes = 2;
  int b1 = 3;                 // clique vertices in part 1
  int a1 = n / 4 - b1;        // fills alpha = (1/4, 3/4)
  std::vector<std::vector<int>> counts = {{b1, c - b1}, {a1, (n - c) - a1}};
  // target from explicit counts
  std::vector<int> phi(n);
  for (int v = 0; v < c; ++v) phi[v] = v < b1 ? 0 : 1;
  for (int v = c; v < n; ++v) phi[v] = (v - c) < a1 ? 0 : 1;
  Quotient target = quotient(g, VertexPartition(phi, 2));
  RateEstimate r = quotient_ball_probability(g, 2, target, 0.01, LdMethod::kExactMultinomial,
                                             1e8, 0, 1, &blocks);
  double formula = std::log(2.0) + 0.25 * std::log(0.25) + 0.75 * std::log(0.75);
  CHECK(std::fabs(r.value - formula) < 0.08);  // n = 200 is still far out
}
