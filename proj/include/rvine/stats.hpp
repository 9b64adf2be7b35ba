#pragma once

#include <functional>
#include <vector>

namespace rvine {

// Standard normal quantile (Wichura's rational approximation, ~1e-15 accurate)
// and CDF.
double qnorm(double p);
double pnorm(double x);

// Student-t CDF and quantile with real degrees of freedom.
double pt(double x, double nu);
double qt(double p, double nu);

// Kendall's tau-b (tie corrected), O(N log N) via merge-sort inversion count.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// First Debye function D1(x) = (1/x) * integral_0^x t/(e^t-1) dt, D1(0)=1.
double debye1(double x);

// Golden-section minimization of a unimodal function on [a,b].
struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};
GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double xtol = 1e-9, int max_iter = 200);

// BFGS minimization with Armijo backtracking. `grad` may be empty, in which
// case central finite differences with step 1e-6*max(1,|x_i|) are used.
// Convergence: relative decrease of f below rel_ftol.
struct BfgsResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};
BfgsResult bfgs_min(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    std::vector<double> x0, double rel_ftol = 1e-8, int max_iter = 500);

}  // namespace rvine
