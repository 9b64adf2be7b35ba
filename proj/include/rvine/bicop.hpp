#pragma once

#include <string>
#include <vector>

#include "rvine/common.hpp"

namespace rvine {

// Bivariate copula families. Serialization codes: independence 0, gaussian 1,
// student_t 2, gumbel 3, survival_gumbel 13, gumbel90 23, gumbel270 33,
// frank 5. The 90/270 rotations reflect the first/second argument of the base
// Gumbel and model negative dependence; the survival version reflects both.
enum class Family : int {
  independence = 0,
  gaussian = 1,
  student_t = 2,
  gumbel = 3,
  survival_gumbel = 13,
  gumbel90 = 23,
  gumbel270 = 33,
  frank = 5,
};

int family_code(Family f);
Family family_from_code(int code);
std::string family_name(Family f);
Family family_from_name(const std::string& name);
int family_param_count(Family f);

// Pair copula: family tag plus parameters. `nu` (degrees of freedom) is
// meaningful for student_t only.
struct PairCopula {
  Family family = Family::independence;
  double theta = 0.0;
  double nu = 0.0;
};

// Parameter bounds checked when models are constructed or loaded:
// gaussian/student_t |theta| < 1, student_t nu in (2, 30]; gumbel and
// survival_gumbel theta >= 1; gumbel90/gumbel270 theta <= -1; frank theta
// nonzero with |theta| <= 50.
void check_pair_copula(const PairCopula& c);

// Copula density and conditional distributions. Arguments must lie strictly
// inside (0,1) and are clamped to [1e-10, 1-1e-10] before evaluation.
double pdf(const PairCopula& c, double u, double v);
double log_pdf(const PairCopula& c, double u, double v);

// hfunc(u,v)  = dC/dv: conditional CDF of the first argument given the second.
// hfunc1(u,v) = dC/du: conditional CDF of the second argument given the first.
double hfunc(const PairCopula& c, double u, double v);
double hfunc1(const PairCopula& c, double u, double v);

// Inverse of u -> hfunc(u,v): closed form for gaussian/student_t, bisection
// to interval width 1e-10 (at most 100 halvings) otherwise.
double hinv(const PairCopula& c, double w, double v);

// Copula of the swapped pair (V,U): exchanges the 90/270 Gumbel rotations,
// leaves every exchangeable family unchanged.
PairCopula swap_args(const PairCopula& c);

// Population Kendall's tau of a pair copula and its inverse mapping.
// gaussian/student_t: theta = sin(pi*tau/2); gumbel family: |theta| =
// 1/(1-|tau|); frank: numerical inversion of the Debye-function relation
// (theta clamped to +-50). student_t results default to nu = 5.
double param_to_tau(const PairCopula& c);
PairCopula tau_to_param(Family f, double tau);

struct PairSample {
  std::vector<double> u, v;
};

void check_pair_sample(const PairSample& data, std::size_t min_n = 2);

struct PairFit {
  PairCopula copula;
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = true;
};

// Maximum-likelihood fit of one family on a pair sample (N >= 10). A
// student_t fit whose degrees of freedom end up at the upper search bound is
// demoted to the gaussian fit.
PairFit fit_pair_mle(Family f, const PairSample& data);

// AIC-based family choice across sign-compatible candidates; optional
// preliminary independence test short-circuits to the independence copula.
PairFit select_family(const PairSample& data,
                      const std::vector<Family>& candidates,
                      bool use_indep_test = false, double alpha = 0.05);

// Two-sided p-value of the asymptotic normal Kendall's-tau independence test
// with statistic sqrt(9N(N-1)/(2(2N+5))) * |tau|.
double indep_test(const PairSample& data);

// All parametric families (every family except independence), in a fixed
// deterministic order.
const std::vector<Family>& all_parametric_families();

}  // namespace rvine
