#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rvine/eval.hpp"
#include "rvine/select.hpp"
#include "rvine/stats.hpp"

using namespace rvine;

namespace {

RVineMatrix make_matrix(const std::vector<std::vector<std::uint32_t>>& rows) {
  RVineMatrix M(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) M(r, c) = rows[r][c];
  return M;
}

RVineMatrix example_matrix() {
  return make_matrix({{7},
                      {4, 4},
                      {5, 6, 6},
                      {1, 5, 5, 5},
                      {2, 1, 1, 1, 1},
                      {3, 2, 2, 3, 3, 3},
                      {6, 3, 3, 2, 2, 2, 2}});
}

std::vector<GraphEdge> complete_graph(
    const std::vector<std::vector<double>>& w) {
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      GraphEdge e;
      e.i = i;
      e.j = j;
      e.weight = w[i][j];
      e.key_a = static_cast<std::uint32_t>(i + 1);
      e.key_b = static_cast<std::uint32_t>(j + 1);
      edges.push_back(e);
    }
  return edges;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> conditioned_pairs(
    const std::vector<ConstraintEntry>& tree) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& e : tree) out.insert({e.a, e.b});
  return out;
}

}  // namespace

TEST_SUITE("select") {

TEST_CASE("pairwise tau is symmetric with unit diagonal") {
  SplitMix64 rng(1);
  CopulaSample data;
  data.col.assign(4, std::vector<double>(60));
  for (auto& c : data.col)
    for (auto& x : c) x = rng.next_uniform();
  const auto tau = pairwise_tau(data);
  REQUIRE(tau.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(tau[i][i] == 1.0);
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK(tau[i][j] == tau[j][i]);
      CHECK(tau[i][j] ==
            doctest::Approx(kendall_tau(data.col[i], data.col[j]))
                .epsilon(1e-15));
    }
  }
}

TEST_CASE("maximum spanning tree matches exhaustive enumeration") {
  SplitMix64 rng(33);
  const std::size_t n = 6;
  const auto trees = oracle::all_trees(n);
  REQUIRE(trees.size() == 1296);  // n^(n-2) labeled trees
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        w[i][j] = w[j][i] = rng.next_uniform();
    const auto edges = complete_graph(w);
    const auto picked = max_spanning_tree(n, edges);
    REQUIRE(picked.size() == n - 1);
    double got = 0.0;
    for (std::size_t k : picked) got += edges[k].weight;
    double best = -1.0;
    for (const auto& t : trees) {
      double s = 0.0;
      for (auto [a, b] : t) s += w[a][b];
      best = std::max(best, s);
    }
    CHECK(got == doctest::Approx(best).epsilon(1e-12));

    // scaling all weights must not change the selected edges
    auto scaled = edges;
    for (auto& e : scaled) e.weight *= 3.0;
    CHECK(max_spanning_tree(n, scaled) == picked);
  }
}

TEST_CASE("spanning tree tie break prefers small conditioned pairs") {
  std::vector<std::vector<double>> w(5, std::vector<double>(5, 0.25));
  const auto edges = complete_graph(w);
  const auto picked = max_spanning_tree(5, edges);
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (std::size_t k : picked) got.insert({edges[k].i, edges[k].j});
  const std::set<std::pair<std::size_t, std::size_t>> star = {
      {0, 1}, {0, 2}, {0, 3}, {0, 4}};
  CHECK(got == star);
}

TEST_CASE("disconnected graphs are rejected") {
  std::vector<GraphEdge> edges(1);
  edges[0].i = 0;
  edges[0].j = 1;
  edges[0].weight = 1.0;
  CHECK_THROWS_WITH_AS(max_spanning_tree(3, edges), "graph is disconnected",
                       validation_error);
}

TEST_CASE("cvine root maximizes the tau column sum") {
  std::vector<std::vector<double>> tau = {
      {1.0, 0.2, 0.6, -0.1},
      {0.2, 1.0, 0.1, 0.3},
      {0.6, 0.1, 1.0, -0.4},
      {-0.1, 0.3, -0.4, 1.0},
  };
  // |tau| sums: 0.9, 0.6, 1.1, 0.8
  CHECK(select_cvine_root(tau) == 2);
  tau[0][1] = tau[1][0] = 0.4;  // sums: 1.1, 0.8, 1.1, 0.8 -> tie, lowest wins
  CHECK(select_cvine_root(tau) == 0);
}

TEST_CASE("dvine path dominates random orderings") {
  SplitMix64 rng(71);
  RVineModel model =
      oracle::random_model(example_matrix(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(model, 300, 9);
  const auto tau = pairwise_tau(data);
  const auto path = select_dvine_path(tau);
  REQUIRE(path.size() == 7);
  auto sorted = path;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 7; ++i) CHECK(sorted[i] == i);

  auto score = [&](const std::vector<std::size_t>& p) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      s += std::fabs(tau[p[k]][p[k + 1]]);
    return s;
  };
  const double got = score(path);
  std::vector<std::size_t> perm = sorted;
  for (int rep = 0; rep < 1000; ++rep) {
    for (std::size_t k = perm.size(); k-- > 1;) {
      const std::size_t j =
          static_cast<std::size_t>(rng.next_uniform() * (k + 1));
      std::swap(perm[k], perm[j]);
    }
    CHECK(got >= score(perm) - 1e-12);
  }
}

TEST_CASE("exceedance tau restricts to joint corners") {
  PairCopula c;
  c.family = Family::gaussian;
  c.theta = 0.6;
  SplitMix64 rng(13);
  std::vector<double> u(500), v(500);
  for (std::size_t i = 0; i < 500; ++i) {
    v[i] = rng.next_uniform();
    u[i] = hinv(c, rng.next_uniform(), v[i]);
  }
  for (bool lower : {true, false}) {
    const double delta = 0.25;
    std::vector<double> su, sv;
    for (std::size_t i = 0; i < 500; ++i) {
      const bool in = lower ? (u[i] <= delta && v[i] <= delta)
                            : (u[i] > 1 - delta && v[i] > 1 - delta);
      if (in) {
        su.push_back(u[i]);
        sv.push_back(v[i]);
      }
    }
    REQUIRE(su.size() >= 10);
    const auto got = exceedance_tau(u, v, delta, lower);
    REQUIRE(got.has_value());
    CHECK(*got == doctest::Approx(kendall_tau(su, sv)).epsilon(1e-15));
  }
  CHECK(!exceedance_tau(u, v, 0.01, true).has_value());
  CHECK_THROWS_AS(exceedance_tau(u, {0.5, 0.5}, 0.2, true), validation_error);
}

TEST_CASE("sequential selection builds a valid self consistent model") {
  SplitMix64 rng(55);
  RVineModel truth =
      oracle::random_model(example_matrix(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(truth, 750, 101);

  SelectionOptions opts;
  const SequentialFit fit = sequential_select(data, opts);
  CHECK_NOTHROW(check_model(fit.model));
  CHECK(fit.model.dim() == 7);
  REQUIRE(fit.trees.size() == 6);
  for (std::size_t t = 0; t < 6; ++t) CHECK(fit.trees[t].size() == 6 - t);

  // reported loglik equals the model's actual log likelihood
  CHECK(fit.loglik == doctest::Approx(loglik(fit.model, data)).epsilon(5e-7));

  // recorded trees agree with the structure matrix
  std::vector<ConstraintEntry> flat;
  for (const auto& tr : fit.trees)
    flat.insert(flat.end(), tr.begin(), tr.end());
  std::sort(flat.begin(), flat.end());
  CHECK(flat == constraint_set(fit.model.structure));

  // the first tree is the maximum spanning tree on |tau|
  const auto tau = pairwise_tau(data);
  std::vector<std::vector<double>> w(7, std::vector<double>(7, 0.0));
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) w[i][j] = std::fabs(tau[i][j]);
  const auto edges = complete_graph(w);
  const auto picked = max_spanning_tree(7, edges);
  std::set<std::pair<std::uint32_t, std::uint32_t>> mst;
  for (std::size_t k : picked)
    mst.insert({static_cast<std::uint32_t>(edges[k].i + 1),
                static_cast<std::uint32_t>(edges[k].j + 1)});
  CHECK(conditioned_pairs(fit.trees[0]) == mst);

  // selection is deterministic
  const SequentialFit fit2 = sequential_select(data, opts);
  CHECK(fit.model.structure == fit2.model.structure);
  CHECK(fit.loglik == fit2.loglik);
  for (std::size_t i = 0; i < fit.model.cells.size(); ++i) {
    CHECK(fit.model.cells[i].family == fit2.model.cells[i].family);
    CHECK(fit.model.cells[i].theta == fit2.model.cells[i].theta);
  }
}

TEST_CASE("cvine selection produces stars around the strongest node") {
  SplitMix64 rng(20);
  const auto ms = enumerate_rvine_matrices(5);
  RVineModel truth =
      oracle::random_model(ms.front(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(truth, 600, 3);

  SelectionOptions opts;
  opts.vine_class = VineClass::cvine;
  const SequentialFit fit = sequential_select(data, opts);
  CHECK_NOTHROW(check_model(fit.model));
  CHECK(fit.loglik == doctest::Approx(loglik(fit.model, data)).epsilon(5e-7));

  const auto tau = pairwise_tau(data);
  const std::uint32_t root =
      static_cast<std::uint32_t>(select_cvine_root(tau) + 1);
  for (const auto& e : fit.trees[0]) CHECK((e.a == root || e.b == root));
  // every tree of a canonical vine is a star
  for (const auto& tree : fit.trees) {
    std::map<std::uint32_t, int> deg;
    for (const auto& e : tree) {
      deg[e.a]++;
      deg[e.b]++;
    }
    std::size_t hubs = 0;
    for (const auto& [label, d] : deg)
      if (static_cast<std::size_t>(d) == tree.size()) ++hubs;
    CHECK(hubs >= (tree.size() > 1 ? 1 : 0));
  }
}

TEST_CASE("dvine selection follows the best insertion path") {
  SplitMix64 rng(21);
  const auto ms = enumerate_rvine_matrices(5);
  RVineModel truth =
      oracle::random_model(ms.front(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(truth, 600, 4);

  SelectionOptions opts;
  opts.vine_class = VineClass::dvine;
  const SequentialFit fit = sequential_select(data, opts);
  CHECK_NOTHROW(check_model(fit.model));
  CHECK(fit.loglik == doctest::Approx(loglik(fit.model, data)).epsilon(5e-7));

  const auto path = select_dvine_path(pairwise_tau(data));
  std::set<std::pair<std::uint32_t, std::uint32_t>> want;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto a = static_cast<std::uint32_t>(path[k] + 1);
    const auto b = static_cast<std::uint32_t>(path[k + 1] + 1);
    want.insert({std::min(a, b), std::max(a, b)});
  }
  CHECK(conditioned_pairs(fit.trees[0]) == want);
  // in a path every node has degree at most two
  std::map<std::uint32_t, int> deg;
  for (const auto& e : fit.trees[0]) {
    deg[e.a]++;
    deg[e.b]++;
  }
  for (const auto& [label, d] : deg) CHECK(d <= 2);
}

TEST_CASE("independence test option prunes independent pairs") {
  SplitMix64 rng(77);
  CopulaSample data;
  data.col.assign(3, std::vector<double>(400));
  for (auto& c : data.col)
    for (auto& x : c) x = rng.next_uniform();
  SelectionOptions opts;
  opts.use_indep_test = true;
  const SequentialFit fit = sequential_select(data, opts);
  for (std::size_t c = 0; c + 1 < 3; ++c)
    for (std::size_t r = c + 1; r < 3; ++r)
      CHECK(fit.model.cell(r, c).family == Family::independence);
  CHECK(fit.loglik == 0.0);
}

TEST_CASE("two variables reduce to a single pair fit") {
  PairCopula c;
  c.family = Family::gumbel;
  c.theta = 2.0;
  SplitMix64 rng(6);
  CopulaSample data;
  data.col.assign(2, std::vector<double>(500));
  for (std::size_t i = 0; i < 500; ++i) {
    data.col[1][i] = rng.next_uniform();
    data.col[0][i] = hinv(c, rng.next_uniform(), data.col[1][i]);
  }
  const SequentialFit fit = sequential_select(data, {});
  CHECK(fit.model.dim() == 2);
  CHECK(fit.trees.size() == 1);
  CHECK(fit.trees[0].size() == 1);
  CHECK(fit.trees[0][0].a == 1);
  CHECK(fit.trees[0][0].b == 2);
  PairSample ps;
  ps.u = data.col[0];
  ps.v = data.col[1];
  const PairFit pf = select_family(ps, all_parametric_families());
  CHECK(fit.loglik == doctest::Approx(pf.loglik).epsilon(1e-12));
}

TEST_CASE("selection rejects unusable input") {
  CopulaSample one;
  one.col = {{0.1, 0.2, 0.3}};
  CHECK_THROWS_AS(sequential_select(one, {}), validation_error);
  CopulaSample tiny;
  tiny.col = {{0.1, 0.2, 0.3, 0.4, 0.5}, {0.5, 0.4, 0.3, 0.2, 0.1}};
  CHECK_THROWS_AS(sequential_select(tiny, {}), validation_error);
  SelectionOptions bad;
  bad.families.clear();
  CopulaSample ok;
  SplitMix64 rng(2);
  ok.col.assign(2, std::vector<double>(50));
  for (auto& c : ok.col)
    for (auto& x : c) x = rng.next_uniform();
  CHECK_THROWS_AS(sequential_select(ok, bad), validation_error);
}

}  // TEST_SUITE
