#include <doctest.h>

#include <cmath>

#include "graphlim/models.hpp"
#include "graphlim/statphys.hpp"
#include "test_helpers.hpp"

using namespace graphlim;
using namespace graphlim::testing;

TEST_CASE("erdos_renyi") {
  CHECK(erdos_renyi(7, 0.0, 1).edge_count() == 0);
  WeightedGraph full = erdos_renyi(6, 1.0, 1);
  CHECK(full.edge_count() == 15);
  CHECK(graph_norm(full, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  SUBCASE("density concentrates") {
    WeightedGraph g = erdos_renyi(1000, 0.1, 7);
    CHECK(graph_norm(g, 1.0) == doctest::Approx(0.1 * 999.0 / 1000.0).epsilon(0.1));
  }
  SUBCASE("determinism: identical seeds give identical graphs") {
    CHECK(erdos_renyi(50, 0.3, 99) == erdos_renyi(50, 0.3, 99));
    CHECK_FALSE(erdos_renyi(50, 0.3, 99) == erdos_renyi(50, 0.3, 100));
  }
}

TEST_CASE("sbm") {
  SUBCASE("all-ones block matrix reduces to ER statistics") {
    Mat b = Mat::square(2, 1.0);
    WeightedGraph g = sbm(500, b, 0.2, 3);
    CHECK(graph_norm(g, 1.0) == doctest::Approx(0.2).epsilon(0.1));
  }
  SUBCASE("zero density gives the edgeless graph") {
    Mat b = Mat::square(2, 1.0);
    CHECK(sbm(20, b, 0.0, 3).edge_count() == 0);
  }
  SUBCASE("within and across block densities track rho * b_ij") {
    Mat b = testing::sym2(1.6, 0.4, 1.6);
    int n = 2000;
    WeightedGraph g = sbm(n, b, 0.2, 11);
    int half = n / 2;
    double within = 0.0, across = 0.0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        if ((u < half) == (v < half))
          within += g.beta(u, v);
        else
          across += g.beta(u, v);
      }
    double pairs_within = 2.0 * (half * (half - 1) / 2.0);
    double pairs_across = static_cast<double>(half) * half;
    CHECK(within / pairs_within == doctest::Approx(0.32).epsilon(0.07));
    CHECK(across / pairs_across == doctest::Approx(0.08).epsilon(0.12));
  }
  SUBCASE("parameter validation") {
    Mat b = testing::sym2(2.0, 0.0, 2.0);  // mean 1, max 2
    CHECK_THROWS_AS(sbm(10, b, 0.6, 1), ValidationError);
    Mat bad = testing::sym2(1.0, 0.5, 1.0);  // mean != 1
    CHECK_THROWS_AS(sbm(10, bad, 0.1, 1), ValidationError);
  }
}

TEST_CASE("power_law") {
  SUBCASE("two vertices hit the closed-form probability") {
    // p_12 = min(1, (1*2)^(-1/2)) = 1/sqrt(2); check via frequency.
    int hits = 0, trials = 4000;
    for (int s = 0; s < trials; ++s) hits += power_law(2, 0.5, 0.0, s).edge_count();
    CHECK(static_cast<double>(hits) / trials ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
  }
  SUBCASE("edge count within 3 sigma of the exact pair-probability sum") {
    int n = 1000;
    double alpha = 0.4, beta = 0.5;
    double mean = 0.0, var = 0.0;
    double nb = std::pow(n, beta);
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        double p = std::min(1.0, nb * std::pow(static_cast<double>(i) * j, -alpha));
        mean += p;
        var += p * (1 - p);
      }
    WeightedGraph g = power_law(n, alpha, beta, 17);
    CHECK(std::fabs(g.edge_count() - mean) <= 3.0 * std::sqrt(var));
  }
  SUBCASE("vertex 1 dominates the expected degrees") {
    WeightedGraph g = power_law(400, 0.8, 0.9, 23);
    std::vector<double> deg(400, 0.0);
    double total = 0.0;
    for (int u = 0; u < 400; ++u)
      for (int v = 0; v < 400; ++v) {
        deg[u] += g.beta(u, v);
        total += g.beta(u, v);
      }
    CHECK(deg[0] >= deg[399]);
    CHECK(total > 0.0);
  }
  CHECK_THROWS_AS(power_law(10, 1.2, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(power_law(10, 0.4, 0.9, 1), ValidationError);
}

TEST_CASE("w_random") {
  SUBCASE("constant graphon reduces to ER statistics") {
    WeightedGraph g = w_random(StepGraphon::constant(1.0), 800, 0.15, 5);
    CHECK(graph_norm(g, 1.0) == doctest::Approx(0.15).epsilon(0.1));
  }
  SUBCASE("block graphon matches block densities within 3 sigma") {
    // two equal steps with values (1.6, 0.4; 0.4, 1.6), integral 1
    StepGraphon w({0.5, 0.5}, testing::sym2(1.6, 0.4, 1.6));
    int n = 1500;
    double rho = 0.2;
    WeightedGraph g = w_random(w, n, rho, 29);
    double density = graph_norm(g, 1.0);
    CHECK(density == doctest::Approx(rho * (n - 1.0) / n).epsilon(0.1));
  }
  SUBCASE("single vertex") { CHECK(w_random(StepGraphon::constant(1.0), 1, 0.5, 1).n() == 1); }
  SUBCASE("negative graphons are rejected") {
    StepGraphon w({0.5, 0.5}, testing::sym2(2.2, -0.2, 2.2));
    CHECK_THROWS_AS(w_random(w, 10, 0.5, 1), ValidationError);
  }
}

TEST_CASE("clique_plus_isolated") {
  CHECK(clique_plus_isolated(5, 5).edge_count() == 10);
  CHECK(clique_plus_isolated(5, 0).edge_count() == 0);
  CHECK(clique_plus_isolated(5, 1).edge_count() == 0);
  CHECK(graph_norm(clique_plus_isolated(100, 10), 1.0) == doctest::Approx(0.009).epsilon(1e-12));
}

TEST_CASE("cycle_union") {
  WeightedGraph c = cycle_union(4, 1);
  CHECK(c.n() == 4);
  CHECK(c.edge_count() == 4);
  WeightedGraph cc = cycle_union(6, 2);
  CHECK(cc.n() == 12);
  CHECK(cc.edge_count() == 12);
  CHECK_THROWS_AS(cycle_union(5, 1), ValidationError);
}

TEST_CASE("disjoint union free-energy identity") {
  CounterRng rng(233);
  for (int t = 0; t < 10; ++t) {
    int n = rng.uniform_int(2, 5), q = rng.uniform_int(2, 3);
    WeightedGraph g = random_graph(rng, n, true, 0.6);
    if (graph_norm(g, 1.0) == 0.0) continue;
    Mat j = Mat::square(q);
    for (int a = 0; a < q; ++a)
      for (int b = a; b < q; ++b) {
        double x = rng.uniform(-1.0, 1.0);
        j(a, b) = x;
        j(b, a) = x;
      }
    std::vector<double> h(q);
    for (int i = 0; i < q; ++i) h[i] = rng.uniform(-0.5, 0.5);
    double f1 = free_energy(g, j, h, 1e7).value;
    double f2 = free_energy(disjoint_union(g, g), j, h, 1e7).value;
    CHECK(f1 == doctest::Approx(f2).epsilon(1e-9));
  }
}

TEST_CASE("C4 and C6 have different free energies") {
  // Recorded oracle: J = [[0,1],[1,0]] gives F(C4) = -log((1+e)^4 + (1-e)^4)/4.
  Mat j = testing::sym2(0, 1, 0);
  double f4 = free_energy(cycle_union(4, 1), j, {0, 0}, 1e6).value;
  double f6 = free_energy(cycle_union(6, 1), j, {0, 0}, 1e6).value;
  double e = std::exp(1.0);
  double transfer4 = -std::log(std::pow(1 + e, 4) + std::pow(1 - e, 4)) / 4.0;
  double transfer6 = -std::log(std::pow(1 + e, 6) + std::pow(1 - e, 6)) / 6.0;
  CHECK(f4 == doctest::Approx(transfer4).epsilon(1e-9));
  CHECK(f6 == doctest::Approx(transfer6).epsilon(1e-9));
  CHECK(std::fabs(f4 - f6) > 1e-3);
}

TEST_CASE("free energy is invariant under disjoint cycle copies") {
  Mat j = testing::sym2(0.5, -0.5, 0.5);
  double f1 = free_energy(cycle_union(4, 1), j, {0, 0}, 1e6).value;
  double f2 = free_energy(cycle_union(4, 2), j, {0, 0}, 1e6).value;
  CHECK(f1 == doctest::Approx(f2).epsilon(1e-9));
}
