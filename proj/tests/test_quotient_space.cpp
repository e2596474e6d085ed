#include <doctest.h>

#include <cmath>

#include "graphlim/quotient_space.hpp"
#include "test_helpers.hpp"

using namespace graphlim;
using namespace graphlim::testing;

namespace {

Quotient make_quotient(std::vector<double> alpha, Mat beta) {
  Quotient s;
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  return s;
}

StepFractionalPartition random_rho(CounterRng& rng, const std::vector<double>& lens, int q) {
  int k = static_cast<int>(lens.size());
  Mat w(k, q);
  for (int mu = 0; mu < k; ++mu) {
    double tot = 0.0;
    std::vector<double> e(q);
    for (int i = 0; i < q; ++i) {
      e[i] = -std::log(1.0 - rng.next_unit());
      tot += e[i];
    }
    double acc = 0.0;
    for (int i = 0; i < q - 1; ++i) {
      w(mu, i) = e[i] / tot;
      acc += w(mu, i);
    }
    w(mu, q - 1) = 1.0 - acc;
  }
  return StepFractionalPartition(lens, std::move(w));
}

}  // namespace

TEST_CASE("d1 on quotients") {
  Quotient a = make_quotient({1.0, 0.0}, testing::sym2(1, 0, 0));
  Quotient b = make_quotient({0.5, 0.5}, testing::sym2(0, 0.5, 0));
  CHECK(d1(a, a) == 0.0);
  CHECK(d1(a, b) == doctest::Approx(3.0).epsilon(1e-12));
  Quotient e1 = make_quotient({1.0, 0.0}, Mat::square(2, 0.0));
  Quotient e2 = make_quotient({0.0, 1.0}, Mat::square(2, 0.0));
  CHECK(d1(e1, e2) == doctest::Approx(2.0).epsilon(1e-12));
  Quotient c = make_quotient({1.0}, Mat::square(1, 0.0));
  CHECK_THROWS_AS(d1(a, c), ValidationError);
}

TEST_CASE("hausdorff") {
  Quotient x = make_quotient({1.0, 0.0}, Mat::square(2, 0.0));
  Quotient y = make_quotient({0.0, 1.0}, Mat::square(2, 0.0));
  CHECK(hausdorff(std::vector<Quotient>{x}, {x}) == 0.0);
  CHECK(hausdorff(std::vector<Quotient>{x}, {y}) == doctest::Approx(d1(x, y)));
  CHECK(hausdorff(std::vector<Quotient>{x}, {x, y}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(hausdorff(std::vector<Quotient>{}, {x}), ValidationError);

  SUBCASE("metric properties on random finite sets") {
    CounterRng rng(71);
    for (int t = 0; t < 50; ++t) {
      StepGraphon w = random_graphon(rng, 2, 1.0);
      auto gen = [&](uint64_t s) {
        return sample_quotient_set(w, 2, 0.0, 5, s).points;
      };
      auto a = gen(3 * t), b = gen(3 * t + 1), c = gen(3 * t + 2);
      CHECK(hausdorff(a, b) == doctest::Approx(hausdorff(b, a)).epsilon(1e-12));
      CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12);
    }
  }
}

TEST_CASE("fractional_quotient") {
  SUBCASE("constant graphon with the uniform partition") {
    for (int q = 1; q <= 3; ++q) {
      StepGraphon w = StepGraphon::constant(1.0);
      Quotient s = fractional_quotient(w, StepFractionalPartition::uniform({1.0}, q));
      for (int i = 0; i < q; ++i) {
        CHECK(s.alpha[i] == doctest::Approx(1.0 / q).epsilon(1e-12));
        for (int j = 0; j < q; ++j)
          CHECK(s.beta(i, j) == doctest::Approx(1.0 / (q * q)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("hard split of embed(K2) matches the scaled graph quotient") {
    StepGraphon w = embed(k2());
    StepFractionalPartition rho = StepFractionalPartition::hard(w.step_lengths(), {0, 1}, 2);
    Quotient s = fractional_quotient(w, rho);
    Quotient gq = quotient(k2(), VertexPartition({0, 1}, 2));
    double norm1 = graph_norm(k2(), 1.0);
    CHECK(s.alpha[0] == doctest::Approx(gq.alpha[0]).epsilon(1e-12));
    CHECK(s.beta(0, 1) == doctest::Approx(norm1 * gq.beta(0, 1)).epsilon(1e-12));
    CHECK(s.beta(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("zero graphon") {
    CounterRng rng(73);
    StepFractionalPartition rho = random_rho(rng, {1.0}, 3);
    Quotient s = fractional_quotient(StepGraphon::zero(), rho);
    CHECK(s.beta.max_abs() == 0.0);
  }
  SUBCASE("graph/graphon quotient bridge on random graphs") {
    CounterRng rng(79);
    for (int t = 0; t < 40; ++t) {
      int n = rng.uniform_int(1, 6);
      WeightedGraph g = random_graph(rng, n);
      StepGraphon w = embed(g);
      int q = rng.uniform_int(1, 3);
      std::vector<int> phi(n);
      for (int v = 0; v < n; ++v) phi[v] = rng.uniform_int(0, q - 1);
      // embed() may drop zero-weight vertices; random_graph keeps all
      // weights positive so indices align.
      REQUIRE(w.k() == n);
      Quotient lhs = quotient(g, VertexPartition(phi, q));
      Quotient rhs = fractional_quotient(w, StepFractionalPartition::hard(w.step_lengths(), phi, q));
      double norm1 = graph_norm(g, 1.0);
      for (int i = 0; i < q; ++i) {
        CHECK(rhs.alpha[i] == doctest::Approx(lhs.alpha[i]).epsilon(1e-11));
        for (int j = 0; j < q; ++j)
          CHECK(rhs.beta(i, j) == doctest::Approx(norm1 * lhs.beta(i, j)).epsilon(1e-11));
      }
    }
  }
  SUBCASE("invariant under common refinement of the steps") {
    CounterRng rng(83);
    for (int t = 0; t < 30; ++t) {
      int k = rng.uniform_int(1, 4), q = rng.uniform_int(1, 3);
      StepGraphon w = random_graphon(rng, k);
      StepFractionalPartition rho = random_rho(rng, w.step_lengths(), q);
      // Split each step in half, duplicating values and rho rows.
      std::vector<double> lens2;
      Mat v2 = Mat::square(2 * k);
      Mat r2(2 * k, q);
      for (int i = 0; i < k; ++i) {
        lens2.push_back(w.len(i) / 2);
        lens2.push_back(w.len(i) / 2);
      }
      for (int i = 0; i < 2 * k; ++i) {
        for (int j = 0; j < 2 * k; ++j) v2(i, j) = w.value(i / 2, j / 2);
        for (int c = 0; c < q; ++c) r2(i, c) = rho.weight(i / 2, c);
      }
      Quotient a = fractional_quotient(w, rho);
      Quotient b = fractional_quotient(StepGraphon(lens2, v2),
                                       StepFractionalPartition(lens2, r2));
      CHECK(d1(a, b) <= 1e-12);
    }
  }
}

TEST_CASE("sample_quotient_set") {
  SUBCASE("constant graphon, q=2, mesh 1/2") {
    QuotientSet s = sample_quotient_set(StepGraphon::constant(1.0), 2, 0.5, 0, 1);
    CHECK(s.points.size() == 3);
    for (const auto& p : s.points)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(p.beta(i, j) == doctest::Approx(p.alpha[i] * p.alpha[j]).epsilon(1e-12));
    CHECK(s.meta.covering_radius == doctest::Approx(2.0 * 3.0 * 2.0 / 2.0));
  }
  SUBCASE("zero graphon sweeps the alpha simplex with beta = 0") {
    QuotientSet s = sample_quotient_set(StepGraphon::zero(), 2, 0.25, 0, 1);
    CHECK(s.points.size() == 5);
    for (const auto& p : s.points) CHECK(p.beta.max_abs() == 0.0);
  }
  SUBCASE("q=1 forces the single point (1, ||W||_1-signed integral)") {
    StepGraphon w = embed(k2());
    QuotientSet s = sample_quotient_set(w, 1, 0.5, 0, 1);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].alpha[0] == doctest::Approx(1.0));
    CHECK(s.points[0].beta(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("budget error on oversized grids without samples") {
    CounterRng rng(89);
    StepGraphon w = random_graphon(rng, 6);
    CHECK_THROWS_AS(sample_quotient_set(w, 4, 0.01, 0, 1), BudgetError);
    // ... but sampling mode is allowed
    QuotientSet s = sample_quotient_set(w, 4, 0.01, 10, 1);
    CHECK(s.points.size() >= 1);
    CHECK(std::isinf(s.meta.covering_radius));
  }
}

TEST_CASE("entropy") {
  CHECK(entropy(StepFractionalPartition::uniform({1.0}, 3)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(entropy(StepFractionalPartition::hard({0.3, 0.7}, {0, 1}, 2)) == 0.0);
  Mat w(1, 2);
  w(0, 0) = 0.75;
  w(0, 1) = 0.25;
  CHECK(entropy(StepFractionalPartition({1.0}, w)) == doctest::Approx(0.5623).epsilon(1e-4));
}

TEST_CASE("entropy continuity bound") {
  // |Ent(rho) - Ent(rho')| <= q * f(d1/q) with f(x) = x(1 - log x).
  CounterRng rng(97);
  for (int t = 0; t < 1000; ++t) {
    int k = rng.uniform_int(1, 4), q = rng.uniform_int(2, 4);
    StepGraphon w = random_graphon(rng, k);
    StepFractionalPartition a = random_rho(rng, w.step_lengths(), q);
    StepFractionalPartition b = random_rho(rng, w.step_lengths(), q);
    double d = d1(a, b);
    double lhs = std::fabs(entropy(a) - entropy(b));
    if (d == 0.0) {
      CHECK(lhs <= 1e-12);
    } else {
      double x = d / q;
      CHECK(lhs <= q * (x * (1.0 - std::log(x))) + 1e-12);
    }
  }
}

TEST_CASE("quotient map is Lipschitz in rho for bounded graphons") {
  // d1(W/rho, W/rho') <= (1 + 2 ||W||_inf) d1(rho, rho').
  CounterRng rng(101);
  for (int t = 0; t < 1000; ++t) {
    int k = rng.uniform_int(1, 4), q = rng.uniform_int(1, 3);
    StepGraphon w = random_graphon(rng, k);
    StepFractionalPartition a = random_rho(rng, w.step_lengths(), q);
    StepFractionalPartition b = random_rho(rng, w.step_lengths(), q);
    double d = d1(a, b);
    double lhs = d1(fractional_quotient(w, a), fractional_quotient(w, b));
    CHECK(lhs <= (1.0 + 2.0 * w.max_abs_value()) * d + 1e-12);
  }
}
