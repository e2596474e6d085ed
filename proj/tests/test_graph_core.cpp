#include <doctest.h>

#include <cmath>

#include "graphlim/graph.hpp"
#include "test_helpers.hpp"

using namespace graphlim;
using namespace graphlim::testing;

TEST_CASE("graph construction validates invariants") {
  CHECK_THROWS_AS(WeightedGraph({0.0, 0.0}, Mat::square(2, 0.0)), ValidationError);
  CHECK_THROWS_AS(WeightedGraph({1.0, -0.5}, Mat::square(2, 0.0)), ValidationError);
  Mat asym = Mat::square(2, 0.0);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(WeightedGraph({1.0, 1.0}, asym), ValidationError);
  WeightedGraph g = k2();
  CHECK(g.total_weight() == 2.0);
  CHECK(g.max_weight() == 1.0);
}

TEST_CASE("graph_norm matches hand values") {
  CHECK(graph_norm(k3(), 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(graph_norm(edgeless(5), 2.0) == 0.0);
  CHECK(graph_norm(k2(), 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(graph_norm(k2(), std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(graph_norm(k2(), 0.5), ValidationError);
}

TEST_CASE("scale_graph scales the density linearly") {
  WeightedGraph g = k3();
  CHECK(graph_norm(scale_graph(g, 2.0), 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(graph_norm(scale_graph(g, 0.0), 1.0) == 0.0);
  CHECK(scale_graph(g, 1.0) == g);
  CounterRng rng(7);
  for (int t = 0; t < 50; ++t) {
    WeightedGraph h = random_graph(rng, rng.uniform_int(1, 7));
    double c = rng.uniform(-3.0, 3.0);
    CHECK(graph_norm(scale_graph(h, c), 1.0) ==
          doctest::Approx(std::fabs(c) * graph_norm(h, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("average_over_partition block averages") {
  SUBCASE("singleton parts act as identity") {
    WeightedGraph g = k2();
    VertexPartition p({0, 1}, 2);
    CHECK(average_over_partition(g, p) == g);
  }
  SUBCASE("C4 with the bipartition averages to 1 across, 0 within") {
    WeightedGraph g = c4();
    VertexPartition p({0, 1, 0, 1}, 2);
    WeightedGraph gp = average_over_partition(g, p);
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) {
        double expect = (p.assignment[u] != p.assignment[v]) ? 1.0 : 0.0;
        CHECK(gp.beta(u, v) == doctest::Approx(expect).epsilon(1e-12));
      }
  }
  SUBCASE("one part gives the constant density") {
    CounterRng rng(3);
    WeightedGraph g = random_graph(rng, 5);
    WeightedGraph gp = average_over_partition(g, VertexPartition(std::vector<int>(5, 0), 1));
    // With nonnegative weights the constant equals ||G||_1; here weights
    // may be signed so compare against the signed average.
    double ag2 = g.total_weight() * g.total_weight();
    double avg = 0.0;
    for (int u = 0; u < 5; ++u)
      for (int v = 0; v < 5; ++v) avg += g.alpha(u) * g.alpha(v) / ag2 * g.beta(u, v);
    CHECK(gp.beta(2, 3) == doctest::Approx(avg).epsilon(1e-10));
  }
  SUBCASE("idempotent") {
    CounterRng rng(11);
    for (int t = 0; t < 30; ++t) {
      int n = rng.uniform_int(2, 7);
      WeightedGraph g = random_graph(rng, n);
      std::vector<int> assign(n);
      int q = rng.uniform_int(1, 3);
      for (int v = 0; v < n; ++v) assign[v] = rng.uniform_int(0, q - 1);
      VertexPartition p(assign, q);
      WeightedGraph gp = average_over_partition(g, p);
      WeightedGraph gpp = average_over_partition(gp, p);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) CHECK(gpp.beta(u, v) == doctest::Approx(gp.beta(u, v)));
    }
  }
  SUBCASE("contraction of the density") {
    CounterRng rng(13);
    for (int t = 0; t < 100; ++t) {
      int n = rng.uniform_int(2, 7);
      WeightedGraph g = random_graph(rng, n);
      std::vector<int> assign(n);
      int q = rng.uniform_int(1, 4);
      for (int v = 0; v < n; ++v) assign[v] = rng.uniform_int(0, q - 1);
      WeightedGraph gp = average_over_partition(g, VertexPartition(assign, q));
      CHECK(graph_norm(gp, 1.0) <= graph_norm(g, 1.0) + 1e-12);
    }
  }
}

TEST_CASE("quotient matches hand values") {
  WeightedGraph g = k2();
  SUBCASE("both vertices in part 0") {
    Quotient s = quotient(g, VertexPartition({0, 0}, 2));
    CHECK(s.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.alpha[1] == 0.0);
    CHECK(s.beta(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.beta(1, 1) == 0.0);
  }
  SUBCASE("split across parts") {
    Quotient s = quotient(g, VertexPartition({0, 1}, 2));
    CHECK(s.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.beta(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.beta(0, 0) == 0.0);
  }
  SUBCASE("zero-edge graph gives beta = 0") {
    Quotient s = quotient(edgeless(3), VertexPartition({0, 1, 0}, 2));
    CHECK(s.beta.max_abs() == 0.0);
    CHECK(s.alpha[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("quotient normalization invariant") {
  CounterRng rng(17);
  for (int t = 0; t < 100; ++t) {
    int n = rng.uniform_int(1, 6);
    bool nonneg = rng.bernoulli(0.5);
    WeightedGraph g = random_graph(rng, n);
    if (nonneg) {
      Mat b = g.edge_weights();
      for (double& x : b.data()) x = std::fabs(x);
      g = WeightedGraph(g.vertex_weights(), std::move(b));
    }
    int q = rng.uniform_int(1, 3);
    std::vector<int> assign(n);
    for (int v = 0; v < n; ++v) assign[v] = rng.uniform_int(0, q - 1);
    Quotient s = quotient(g, VertexPartition(assign, q));
    double asum = 0.0;
    for (double a : s.alpha) asum += a;
    CHECK(asum == doctest::Approx(1.0).epsilon(1e-12));
    double bsum = s.beta.sum_abs();
    CHECK(bsum <= 1.0 + 1e-12);
    if (nonneg && graph_norm(g, 1.0) > 0.0)
      CHECK(bsum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("enumerate_quotients") {
  SUBCASE("K2 with q=2 has exactly 3 distinct quotients") {
    auto set = enumerate_quotients(k2(), 2, 100.0);
    CHECK(set.size() == 3);
  }
  SUBCASE("single vertex") {
    WeightedGraph g = edgeless(1);
    auto set = enumerate_quotients(g, 2, 100.0);
    CHECK(set.size() == 2);
    for (const auto& s : set) CHECK(s.beta.max_abs() == 0.0);
  }
  SUBCASE("budget guard") {
    CHECK_THROWS_AS(enumerate_quotients(k2(), 2, 2.0), BudgetError);
  }
  SUBCASE("agrees with per-map quotient application") {
    CounterRng rng(23);
    for (int t = 0; t < 20; ++t) {
      int n = rng.uniform_int(1, 5);
      WeightedGraph g = random_graph(rng, n);
      int q = rng.uniform_int(1, 3);
      auto set = enumerate_quotients(g, q, 1e6);
      for_each_map(n, q, [&](const std::vector<int>& phi) {
        Quotient s = quotient(g, VertexPartition(phi, q));
        bool found = false;
        for (const auto& t2 : set) {
          double d = 0.0;
          for (int i = 0; i < q; ++i) d += std::fabs(s.alpha[i] - t2.alpha[i]);
          for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) d += std::fabs(s.beta(i, j) - t2.beta(i, j));
          if (d <= 1e-11) found = true;
        }
        CHECK(found);
      });
    }
  }
}

TEST_CASE("maxcut") {
  CHECK(maxcut(c4()) == 4.0);
  CHECK(maxcut(k3()) == 2.0);
  CHECK(maxcut(edgeless(4)) == 0.0);
  CHECK_THROWS_AS(maxcut(WeightedGraph({1.0, 2.0}, testing::sym2(0, 1, 0))), ValidationError);
  SUBCASE("internal bipartition value agrees with quotient()") {
    CounterRng rng(29);
    for (int t = 0; t < 20; ++t) {
      int n = rng.uniform_int(2, 6);
      WeightedGraph g = random_graph(rng, n, /*unit_weights=*/true, 0.5);
      Mat b = g.edge_weights();
      for (double& x : b.data()) x = x != 0.0 ? 1.0 : 0.0;
      for (int i = 0; i < n; ++i) b(i, i) = 0.0;
      g = WeightedGraph(g.vertex_weights(), std::move(b));
      if (g.edge_count() == 0) continue;
      double best = 0.0;
      for_each_map(n, 2, [&](const std::vector<int>& phi) {
        Quotient s = quotient(g, VertexPartition(phi, 2));
        best = std::max(best, s.beta(0, 1) + s.beta(1, 0));
      });
      CHECK(maxcut(g) == doctest::Approx(best * g.edge_count()).epsilon(1e-9));
    }
  }
}

TEST_CASE("disjoint_union") {
  WeightedGraph g = disjoint_union(k2(), k2());
  CHECK(g.n() == 4);
  CHECK(g.edge_count() == 2);
  CHECK(g.beta(0, 1) == 1.0);
  CHECK(g.beta(2, 3) == 1.0);
  CHECK(g.beta(1, 2) == 0.0);
}
