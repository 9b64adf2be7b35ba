#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rvine/fit.hpp"
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

PairCopula make(Family f, double theta, double nu = 0.0) {
  PairCopula c;
  c.family = f;
  c.theta = theta;
  c.nu = nu;
  return c;
}

CopulaSample pair_data(const PairCopula& c, std::size_t n, uint64_t seed) {
  SplitMix64 rng(seed);
  CopulaSample s;
  s.col.assign(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    s.col[1][i] = rng.next_uniform();
    s.col[0][i] = hinv(c, rng.next_uniform(), s.col[1][i]);
  }
  return s;
}

RVineModel pair_model(const PairCopula& c) {
  RVineModel m(make_matrix({{2}, {1, 1}}));
  m.cell(1, 0) = c;
  return m;
}

}  // namespace

TEST_SUITE("fit") {

TEST_CASE("joint fit of a single pair agrees with the pair fit") {
  const PairCopula truth = make(Family::gaussian, 0.6);
  const CopulaSample data = pair_data(truth, 1500, 42);
  PairSample ps;
  ps.u = data.col[0];
  ps.v = data.col[1];
  const PairFit pf = fit_pair_mle(Family::gaussian, ps);

  const MleReport rep = fit_mle(pair_model(make(Family::gaussian, 0.2)), data);
  CHECK(rep.converged);
  CHECK(rep.n_params == 1);
  CHECK(rep.model.cell(1, 0).theta ==
        doctest::Approx(pf.copula.theta).epsilon(1e-5));
  CHECK(rep.loglik_mle == doctest::Approx(pf.loglik).epsilon(1e-8));
  CHECK(rep.loglik_seq ==
        doctest::Approx(loglik(pair_model(make(Family::gaussian, 0.2)), data))
            .epsilon(1e-12));
}

TEST_CASE("joint fit handles both student t parameters") {
  const PairCopula truth = make(Family::student_t, 0.5, 4.0);
  const CopulaSample data = pair_data(truth, 1200, 7);
  PairSample ps;
  ps.u = data.col[0];
  ps.v = data.col[1];
  const PairFit pf = fit_pair_mle(Family::student_t, ps);

  const MleReport rep =
      fit_mle(pair_model(make(Family::student_t, 0.3, 8.0)), data);
  CHECK(rep.converged);
  CHECK(rep.n_params == 2);
  CHECK(std::fabs(rep.model.cell(1, 0).theta - 0.5) < 0.06);
  CHECK(rep.model.cell(1, 0).nu > 2.0);
  CHECK(rep.model.cell(1, 0).nu <= 30.0);
  // the joint optimizer must not fall below the profiled pair fit by more
  // than the profile grid resolution
  CHECK(rep.loglik_mle >= pf.loglik - 1e-3);
  CHECK(std::fabs(rep.loglik_mle - pf.loglik) < 0.1);
}

TEST_CASE("joint estimation improves on the sequential start") {
  SplitMix64 rng(12);
  RVineModel truth =
      oracle::random_model(example_matrix(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(truth, 800, 19);
  const SequentialFit seq = sequential_select(data, {});
  const MleReport rep = fit_mle(seq.model, data);

  CHECK(rep.loglik_seq == doctest::Approx(seq.loglik).epsilon(1e-6));
  CHECK(rep.loglik_mle >= rep.loglik_seq);
  CHECK(rep.n_params == count_parameters(rep.model));
  const double N = static_cast<double>(data.n_rows());
  CHECK(rep.aic == doctest::Approx(-2.0 * rep.loglik_mle +
                                   2.0 * rep.n_params).epsilon(1e-12));
  CHECK(rep.bic ==
        doctest::Approx(-2.0 * rep.loglik_mle + rep.n_params * std::log(N))
            .epsilon(1e-12));
  CHECK(rep.iterations >= 1);
  CHECK_NOTHROW(check_model(rep.model));
  // families and structure stay fixed
  CHECK(rep.model.structure == seq.model.structure);
  for (std::size_t i = 0; i < rep.model.cells.size(); ++i)
    CHECK(rep.model.cells[i].family == seq.model.cells[i].family);
  CHECK(rep.loglik_mle == doctest::Approx(loglik(rep.model, data)).epsilon(1e-9));
}

TEST_CASE("the optimum is a local maximum in every parameter") {
  SplitMix64 rng(4);
  RVineModel truth = oracle::random_model(
      make_matrix({{3}, {1, 1}, {2, 2, 2}}),
      {Family::gaussian, Family::gumbel, Family::frank}, rng);
  const CopulaSample data = simulate(truth, 1000, 77);
  const MleReport rep = fit_mle(truth, data);
  CHECK(rep.loglik_mle >= rep.loglik_seq);

  const double base = loglik(rep.model, data);
  for (std::size_t c = 0; c + 1 < 3; ++c) {
    for (std::size_t r = c + 1; r < 3; ++r) {
      for (double step : {-1e-3, 1e-3}) {
        RVineModel bumped = rep.model;
        PairCopula& cop = bumped.cell(r, c);
        if (cop.family == Family::independence) continue;
        cop.theta += step;
        try {
          check_pair_copula(cop);
        } catch (const validation_error&) {
          continue;  // perturbation left the admissible range
        }
        CHECK(loglik(bumped, data) <= base + 1e-3);
      }
    }
  }
}

TEST_CASE("vuong comparison is antisymmetric and matched to erfc") {
  SplitMix64 rng(3);
  const auto ms = enumerate_rvine_matrices(3);
  RVineModel a = oracle::random_model(ms.front(), {Family::gaussian}, rng);
  RVineModel b = oracle::random_model(ms.back(), {Family::frank}, rng);
  const CopulaSample data = simulate(a, 500, 10);

  const VuongResult ab = vuong(a, b, data);
  const VuongResult ba = vuong(b, a, data);
  CHECK(ab.statistic == -ba.statistic);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.favored == -ba.favored);
  CHECK(ab.p_value ==
        doctest::Approx(std::erfc(std::fabs(ab.statistic) / std::sqrt(2.0)))
            .epsilon(1e-13));
}

TEST_CASE("vuong favors the generating model against independence") {
  SplitMix64 rng(9);
  RVineModel truth =
      oracle::random_model(example_matrix(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(truth, 2000, 21);
  RVineModel indep(example_matrix());  // all cells independence
  const VuongResult r = vuong(truth, indep, data);
  CHECK(r.statistic > 1.96);
  CHECK(r.favored == 1);
  const VuongResult rr = vuong(indep, truth, data);
  CHECK(rr.favored == -1);
}

TEST_CASE("vuong corrections order by penalty strength") {
  SplitMix64 rng(14);
  const auto ms = enumerate_rvine_matrices(3);
  // model a carries six parameters, model b three
  RVineModel a = oracle::random_model(ms.front(), {Family::student_t}, rng);
  RVineModel b = oracle::random_model(ms.front(), {Family::gaussian}, rng);
  REQUIRE(count_parameters(a) == 6);
  REQUIRE(count_parameters(b) == 3);
  const CopulaSample data = simulate(a, 100, 5);
  const double none = vuong(a, b, data, VuongCorrection::none).statistic;
  const double akaike = vuong(a, b, data, VuongCorrection::akaike).statistic;
  const double schwarz =
      vuong(a, b, data, VuongCorrection::schwarz).statistic;
  CHECK(none > akaike);
  CHECK(akaike > schwarz);
}

TEST_CASE("identical models cannot be compared") {
  SplitMix64 rng(2);
  const auto ms = enumerate_rvine_matrices(3);
  RVineModel a = oracle::random_model(ms.front(), {Family::gaussian}, rng);
  const CopulaSample data = simulate(a, 100, 3);
  CHECK_THROWS_AS(vuong(a, a, data), numerical_error);
}

TEST_CASE("fitting rejects unusable input") {
  const PairCopula truth = make(Family::gaussian, 0.5);
  const CopulaSample tiny = pair_data(truth, 5, 1);
  CHECK_THROWS_AS(fit_mle(pair_model(truth), tiny), validation_error);
  const CopulaSample data = pair_data(truth, 100, 1);
  RVineModel three(make_matrix({{3}, {1, 1}, {2, 2, 2}}));
  CHECK_THROWS_AS(fit_mle(three, data), validation_error);
  SplitMix64 rng(5);
  const auto ms = enumerate_rvine_matrices(3);
  RVineModel a = oracle::random_model(ms.front(), {Family::gaussian}, rng);
  RVineModel b(make_matrix({{2}, {1, 1}}));
  b.cell(1, 0) = make(Family::gaussian, 0.3);
  const CopulaSample d3 = simulate(a, 60, 8);
  CHECK_THROWS_AS(vuong(a, b, d3), validation_error);
  CHECK_THROWS_AS(vuong(b, a, pair_data(truth, 1, 2)), validation_error);
}

TEST_CASE("independence only models have nothing to optimize") {
  RVineModel indep(make_matrix({{3}, {1, 1}, {2, 2, 2}}));
  SplitMix64 rng(6);
  CopulaSample data;
  data.col.assign(3, std::vector<double>(60));
  for (auto& c : data.col)
    for (auto& x : c) x = rng.next_uniform();
  const MleReport rep = fit_mle(indep, data);
  CHECK(rep.n_params == 0);
  CHECK(rep.loglik_mle == 0.0);
  CHECK(rep.loglik_seq == 0.0);
  CHECK(rep.converged);
  CHECK(rep.aic == 0.0);
}

}  // TEST_SUITE
