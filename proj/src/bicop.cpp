#include "rvine/bicop.hpp"

#include <algorithm>
#include <cmath>

#include "rvine/stats.hpp"

namespace rvine {

namespace {
constexpr double pi = 3.14159265358979323846;
}

int family_code(Family f) { return static_cast<int>(f); }

Family family_from_code(int code) {
  switch (code) {
    case 0: return Family::independence;
    case 1: return Family::gaussian;
    case 2: return Family::student_t;
    case 3: return Family::gumbel;
    case 13: return Family::survival_gumbel;
    case 23: return Family::gumbel90;
    case 33: return Family::gumbel270;
    case 5: return Family::frank;
    default:
      throw validation_error("unknown family code " + std::to_string(code));
  }
}

std::string family_name(Family f) {
  switch (f) {
    case Family::independence: return "indep";
    case Family::gaussian: return "gauss";
    case Family::student_t: return "t";
    case Family::gumbel: return "gumbel";
    case Family::survival_gumbel: return "sgumbel";
    case Family::gumbel90: return "gumbel90";
    case Family::gumbel270: return "gumbel270";
    case Family::frank: return "frank";
  }
  throw validation_error("unknown family tag");
}

Family family_from_name(const std::string& name) {
  for (Family f :
       {Family::independence, Family::gaussian, Family::student_t,
        Family::gumbel, Family::survival_gumbel, Family::gumbel90,
        Family::gumbel270, Family::frank})
    if (family_name(f) == name) return f;
  throw validation_error("unknown family name '" + name + "'");
}

int family_param_count(Family f) {
  switch (f) {
    case Family::independence: return 0;
    case Family::student_t: return 2;
    default: return 1;
  }
}

void check_pair_copula(const PairCopula& c) {
  const double th = c.theta;
  if (!std::isfinite(th)) throw validation_error("non-finite copula parameter");
  switch (c.family) {
    case Family::independence:
      return;
    case Family::gaussian:
      if (!(std::fabs(th) < 1.0))
        throw validation_error("gaussian theta must lie in (-1,1)");
      return;
    case Family::student_t:
      if (!(std::fabs(th) < 1.0))
        throw validation_error("student_t theta must lie in (-1,1)");
      if (!(c.nu > 2.0 && c.nu <= 30.0))
        throw validation_error("student_t nu must lie in (2,30]");
      return;
    case Family::gumbel:
    case Family::survival_gumbel:
      if (!(th >= 1.0))
        throw validation_error("gumbel theta must be >= 1");
      return;
    case Family::gumbel90:
    case Family::gumbel270:
      if (!(th <= -1.0))
        throw validation_error("rotated gumbel theta must be <= -1");
      return;
    case Family::frank:
      if (th == 0.0 || !(std::fabs(th) <= 50.0))
        throw validation_error("frank theta must be nonzero with |theta| <= 50");
      return;
  }
  throw validation_error("unknown family tag");
}

namespace {

// ----- gaussian -----

double gauss_log_pdf(double u, double v, double r) {
  if (r == 0.0) return 0.0;
  const double x = qnorm(u), y = qnorm(v);
  const double r2 = r * r, omr2 = 1.0 - r2;
  return -0.5 * std::log(omr2) -
         (r2 * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * omr2);
}

double gauss_hfunc(double u, double v, double r) {
  if (r == 0.0) return u;
  const double x = qnorm(u), y = qnorm(v);
  return pnorm((x - r * y) / std::sqrt(1.0 - r * r));
}

double gauss_hinv(double w, double v, double r) {
  if (r == 0.0) return w;
  return pnorm(qnorm(w) * std::sqrt(1.0 - r * r) + r * qnorm(v));
}

// ----- student t -----

double t_lgconst(double nu) {
  return std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
         2.0 * std::lgamma(0.5 * (nu + 1.0));
}

double t_log_pdf_xy(double x, double y, double r, double nu, double lgconst) {
  const double omr2 = 1.0 - r * r;
  return lgconst - 0.5 * std::log(omr2) -
         0.5 * (nu + 2.0) *
             std::log1p((x * x - 2.0 * r * x * y + y * y) / (nu * omr2)) +
         0.5 * (nu + 1.0) *
             (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

double t_log_pdf(double u, double v, double r, double nu) {
  return t_log_pdf_xy(qt(u, nu), qt(v, nu), r, nu, t_lgconst(nu));
}

double t_hfunc(double u, double v, double r, double nu) {
  const double x = qt(u, nu), y = qt(v, nu);
  const double scale = std::sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0));
  return pt((x - r * y) / scale, nu + 1.0);
}

double t_hinv(double w, double v, double r, double nu) {
  const double y = qt(v, nu);
  const double scale = std::sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0));
  return pt(qt(w, nu + 1.0) * scale + r * y, nu);
}

// ----- gumbel, base orientation, theta >= 1 -----

double gumbel_log_pdf_base(double u, double v, double th) {
  const double xt = -std::log(u), yt = -std::log(v);
  const double lxt = std::log(xt), lyt = std::log(yt);
  const double a = th * lxt, b = th * lyt;
  const double m = std::max(a, b);
  const double ls = m + std::log(std::exp(a - m) + std::exp(b - m));
  const double s_pow = std::exp(ls / th);  // s^(1/theta)
  return -s_pow + (th - 1.0) * (lxt + lyt) + xt + yt +
         (2.0 / th - 2.0) * ls + std::log1p((th - 1.0) / s_pow);
}

double gumbel_hfunc_base(double u, double v, double th) {
  (void)u;
  const double xt = -std::log(u), yt = -std::log(v);
  const double lxt = std::log(xt), lyt = std::log(yt);
  const double a = th * lxt, b = th * lyt;
  const double m = std::max(a, b);
  const double ls = m + std::log(std::exp(a - m) + std::exp(b - m));
  const double s_pow = std::exp(ls / th);
  return std::exp(-s_pow + (th - 1.0) * lyt + (1.0 / th - 1.0) * ls + yt);
}

// ----- frank, theta nonzero -----

double frank_denominator(double u, double v, double th) {
  if (th > 0.0 && th * (u + v) > 25.0)
    return std::exp(-th * u) + std::exp(-th * v) - std::exp(-th * (u + v)) -
           std::exp(-th);
  return -std::expm1(-th) - std::expm1(-th * u) * std::expm1(-th * v);
}

double frank_log_pdf(double u, double v, double th) {
  const double d = frank_denominator(u, v, th);
  const double lognum = std::log(std::fabs(th)) + std::max(0.0, -th) +
                        std::log1p(-std::exp(-std::fabs(th)));
  return lognum - th * (u + v) - 2.0 * std::log(std::fabs(d));
}

double frank_hfunc(double u, double v, double th) {
  const double num = -std::exp(-th * v) * std::expm1(-th * u);
  return num / frank_denominator(u, v, th);
}

double frank_tau_positive(double th) {
  return 1.0 - 4.0 / th * (1.0 - debye1(th));
}

}  // namespace

PairCopula swap_args(const PairCopula& c) {
  PairCopula s = c;
  if (c.family == Family::gumbel90)
    s.family = Family::gumbel270;
  else if (c.family == Family::gumbel270)
    s.family = Family::gumbel90;
  return s;
}

double log_pdf(const PairCopula& c, double u, double v) {
  require_unit_open(u, "pdf argument u");
  require_unit_open(v, "pdf argument v");
  u = clamp_unit(u);
  v = clamp_unit(v);
  switch (c.family) {
    case Family::independence: return 0.0;
    case Family::gaussian: return gauss_log_pdf(u, v, c.theta);
    case Family::student_t: return t_log_pdf(u, v, c.theta, c.nu);
    case Family::gumbel: return gumbel_log_pdf_base(u, v, c.theta);
    case Family::survival_gumbel:
      return gumbel_log_pdf_base(1.0 - u, 1.0 - v, c.theta);
    case Family::gumbel90:
      return gumbel_log_pdf_base(1.0 - u, v, -c.theta);
    case Family::gumbel270:
      return gumbel_log_pdf_base(u, 1.0 - v, -c.theta);
    case Family::frank: return frank_log_pdf(u, v, c.theta);
  }
  throw validation_error("unknown family tag");
}

double pdf(const PairCopula& c, double u, double v) {
  return std::exp(log_pdf(c, u, v));
}

double hfunc(const PairCopula& c, double u, double v) {
  require_unit_open(u, "hfunc argument u");
  require_unit_open(v, "hfunc argument v");
  u = clamp_unit(u);
  v = clamp_unit(v);
  double h;
  switch (c.family) {
    case Family::independence: h = u; break;
    case Family::gaussian: h = gauss_hfunc(u, v, c.theta); break;
    case Family::student_t: h = t_hfunc(u, v, c.theta, c.nu); break;
    case Family::gumbel: h = gumbel_hfunc_base(u, v, c.theta); break;
    case Family::survival_gumbel:
      h = 1.0 - gumbel_hfunc_base(1.0 - u, 1.0 - v, c.theta);
      break;
    case Family::gumbel90:
      h = 1.0 - gumbel_hfunc_base(1.0 - u, v, -c.theta);
      break;
    case Family::gumbel270:
      h = gumbel_hfunc_base(u, 1.0 - v, -c.theta);
      break;
    case Family::frank: h = frank_hfunc(u, v, c.theta); break;
    default: throw validation_error("unknown family tag");
  }
  return clamp_unit(h);
}

double hfunc1(const PairCopula& c, double u, double v) {
  return hfunc(swap_args(c), v, u);
}

namespace {

double hinv_bisect(const PairCopula& c, double w, double v) {
  double lo = unit_eps, hi = 1.0 - unit_eps;
  if (w <= hfunc(c, lo, v)) return lo;
  if (w >= hfunc(c, hi, v)) return hi;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hfunc(c, mid, v) < w)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double hinv(const PairCopula& c, double w, double v) {
  require_unit_open(w, "hinv argument w");
  require_unit_open(v, "hinv argument v");
  w = clamp_unit(w);
  v = clamp_unit(v);
  double u;
  switch (c.family) {
    case Family::independence: u = w; break;
    case Family::gaussian: u = gauss_hinv(w, v, c.theta); break;
    case Family::student_t: u = t_hinv(w, v, c.theta, c.nu); break;
    default: u = hinv_bisect(c, w, v); break;
  }
  return clamp_unit(u);
}

double param_to_tau(const PairCopula& c) {
  switch (c.family) {
    case Family::independence: return 0.0;
    case Family::gaussian:
    case Family::student_t: return 2.0 * std::asin(c.theta) / pi;
    case Family::gumbel:
    case Family::survival_gumbel: return 1.0 - 1.0 / c.theta;
    case Family::gumbel90:
    case Family::gumbel270: return -(1.0 - 1.0 / (-c.theta));
    case Family::frank: return frank_tau_positive(c.theta);
  }
  throw validation_error("unknown family tag");
}

PairCopula tau_to_param(Family f, double tau) {
  if (!(std::fabs(tau) < 1.0))
    throw validation_error("tau must lie in (-1,1)");
  PairCopula c;
  c.family = f;
  switch (f) {
    case Family::independence:
      if (std::fabs(tau) > 1e-12)
        throw validation_error("independence requires tau = 0");
      return c;
    case Family::gaussian:
      c.theta = std::sin(pi * tau / 2.0);
      return c;
    case Family::student_t:
      c.theta = std::sin(pi * tau / 2.0);
      c.nu = 5.0;
      return c;
    case Family::gumbel:
    case Family::survival_gumbel:
      if (tau < 0.0)
        throw validation_error("gumbel requires nonnegative tau");
      c.theta = 1.0 / (1.0 - tau);
      return c;
    case Family::gumbel90:
    case Family::gumbel270:
      if (tau > 0.0)
        throw validation_error("rotated gumbel requires nonpositive tau");
      c.theta = -1.0 / (1.0 + tau);
      return c;
    case Family::frank: {
      if (tau == 0.0)
        throw validation_error("frank requires nonzero tau");
      const double target = std::fabs(tau);
      double th;
      if (target >= frank_tau_positive(50.0)) {
        th = 50.0;
      } else {
        double lo = 1e-10, hi = 50.0;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (frank_tau_positive(mid) < target)
            lo = mid;
          else
            hi = mid;
        }
        th = 0.5 * (lo + hi);
      }
      c.theta = (tau > 0.0) ? th : -th;
      return c;
    }
  }
  throw validation_error("unknown family tag");
}

void check_pair_sample(const PairSample& data, std::size_t min_n) {
  if (data.u.size() != data.v.size())
    throw validation_error("pair sample: column length mismatch");
  if (data.u.size() < min_n)
    throw validation_error("pair sample: need at least " +
                           std::to_string(min_n) + " observations");
  for (std::size_t i = 0; i < data.u.size(); ++i) {
    require_unit_open(data.u[i], "pair sample entry");
    require_unit_open(data.v[i], "pair sample entry");
  }
}

double indep_test(const PairSample& data) {
  check_pair_sample(data, 10);
  const double n = static_cast<double>(data.u.size());
  const double tau = kendall_tau(data.u, data.v);
  const double stat =
      std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0))) * std::fabs(tau);
  return std::erfc(stat * 0.7071067811865475244);
}

namespace {

constexpr double z_max = 6.1030338227611125;  // atanh(0.99999)

PairFit finish_fit(Family f, double theta, double nu, double loglik) {
  PairFit fit;
  fit.copula = PairCopula{f, theta, nu};
  fit.loglik = loglik;
  fit.aic = -2.0 * loglik + 2.0 * family_param_count(f);
  fit.converged = true;
  return fit;
}

PairFit fit_gaussian(const PairSample& d) {
  auto negll = [&](double z) {
    const double r = std::tanh(z);
    double s = 0.0;
    for (std::size_t i = 0; i < d.u.size(); ++i)
      s += gauss_log_pdf(clamp_unit(d.u[i]), clamp_unit(d.v[i]), r);
    return -s;
  };
  const GoldenResult g = golden_min(negll, -z_max, z_max, 1e-8, 200);
  return finish_fit(Family::gaussian, std::tanh(g.x), 0.0, -g.fx);
}

PairFit fit_gumbel_family(Family f, const PairSample& d) {
  const double sign = (f == Family::gumbel90 || f == Family::gumbel270)
                          ? -1.0
                          : 1.0;
  auto negll = [&](double s) {
    const PairCopula c{f, sign * (1.0 + std::exp(s)), 0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i < d.u.size(); ++i)
      acc += log_pdf(c, d.u[i], d.v[i]);
    return -acc;
  };
  const GoldenResult g =
      golden_min(negll, std::log(1e-6), std::log(49.0), 1e-8, 200);
  return finish_fit(f, sign * (1.0 + std::exp(g.x)), 0.0, -g.fx);
}

PairFit fit_frank(const PairSample& d) {
  const double tau = kendall_tau(d.u, d.v);
  auto negll = [&](double th) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.u.size(); ++i)
      acc += frank_log_pdf(clamp_unit(d.u[i]), clamp_unit(d.v[i]), th);
    return -acc;
  };
  // the likelihood side matches the sign of the empirical tau
  const double lo = (tau < 0.0) ? -50.0 : 1e-8;
  const double hi = (tau < 0.0) ? -1e-8 : 50.0;
  const GoldenResult g = golden_min(negll, lo, hi, 1e-8, 200);
  return finish_fit(Family::frank, g.x, 0.0, -g.fx);
}

// Profile likelihood of the t copula at fixed nu, maximized over rho.
double t_profile_at_nu(const PairSample& d, double nu, double* rho_out) {
  const std::size_t n = d.u.size();
  std::vector<double> xx(n), yy(n), xy(n);
  double base = 0.0;
  const double lgconst = t_lgconst(nu);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = qt(clamp_unit(d.u[i]), nu);
    const double y = qt(clamp_unit(d.v[i]), nu);
    xx[i] = x * x;
    yy[i] = y * y;
    xy[i] = x * y;
    base += std::log1p(xx[i] / nu) + std::log1p(yy[i] / nu);
  }
  auto negll = [&](double z) {
    const double r = std::tanh(z);
    const double omr2 = 1.0 - r * r;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += std::log1p((xx[i] - 2.0 * r * xy[i] + yy[i]) / (nu * omr2));
    return -(n * (lgconst - 0.5 * std::log(omr2)) - 0.5 * (nu + 2.0) * s +
             0.5 * (nu + 1.0) * base);
  };
  const GoldenResult g = golden_min(negll, -z_max, z_max, 1e-8, 200);
  *rho_out = std::tanh(g.x);
  return -g.fx;
}

PairFit fit_student_t(const PairSample& d) {
  static const double nu_grid[] = {2.05, 2.5, 3.0, 4.0,  5.0, 6.0,
                                   8.0,  10.0, 14.0, 20.0, 30.0};
  const int n_grid = static_cast<int>(std::size(nu_grid));
  int best_idx = 0;
  double best_ll = -1e300, best_rho = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    double rho;
    const double ll = t_profile_at_nu(d, nu_grid[i], &rho);
    if (ll > best_ll) {
      best_ll = ll;
      best_rho = rho;
      best_idx = i;
    }
  }
  const double w_lo =
      std::log(nu_grid[std::max(0, best_idx - 1)] - 2.0);
  const double w_hi =
      std::log(nu_grid[std::min(n_grid - 1, best_idx + 1)] - 2.0);
  double best_nu = nu_grid[best_idx];
  if (w_hi > w_lo) {
    auto neg_profile = [&](double w) {
      double rho;
      return -t_profile_at_nu(d, 2.0 + std::exp(w), &rho);
    };
    const GoldenResult g = golden_min(neg_profile, w_lo, w_hi, 1e-3, 60);
    const double nu_ref = 2.0 + std::exp(g.x);
    if (-g.fx > best_ll) {
      best_nu = nu_ref;
      best_ll = -g.fx;
      t_profile_at_nu(d, nu_ref, &best_rho);
    }
  }
  if (best_nu >= 29.9)  // boundary solution: indistinguishable from gaussian
    return fit_gaussian(d);
  return finish_fit(Family::student_t, best_rho, best_nu, best_ll);
}

bool sign_compatible(Family f, double tau) {
  switch (f) {
    case Family::gumbel:
    case Family::survival_gumbel: return tau >= 0.0;
    case Family::gumbel90:
    case Family::gumbel270: return tau <= 0.0;
    default: return true;
  }
}

}  // namespace

PairFit fit_pair_mle(Family f, const PairSample& data) {
  check_pair_sample(data, 10);
  switch (f) {
    case Family::independence:
      return finish_fit(Family::independence, 0.0, 0.0, 0.0);
    case Family::gaussian: return fit_gaussian(data);
    case Family::student_t: return fit_student_t(data);
    case Family::gumbel:
    case Family::survival_gumbel:
    case Family::gumbel90:
    case Family::gumbel270: return fit_gumbel_family(f, data);
    case Family::frank: return fit_frank(data);
  }
  throw validation_error("unknown family tag");
}

PairFit select_family(const PairSample& data,
                      const std::vector<Family>& candidates,
                      bool use_indep_test, double alpha) {
  if (candidates.empty())
    throw validation_error("select_family: empty candidate set");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw validation_error("select_family: alpha outside (0,1)");
  check_pair_sample(data, 10);

  if (use_indep_test && indep_test(data) > alpha)
    return finish_fit(Family::independence, 0.0, 0.0, 0.0);

  const double tau = kendall_tau(data.u, data.v);
  bool found = false;
  PairFit best;
  for (Family f : candidates) {
    if (!sign_compatible(f, tau)) continue;
    PairFit fit = fit_pair_mle(f, data);
    if (!found || fit.aic < best.aic) {
      best = fit;
      found = true;
    }
  }
  if (!found)
    throw validation_error("select_family: no sign-compatible candidate");
  return best;
}

const std::vector<Family>& all_parametric_families() {
  static const std::vector<Family> fams = {
      Family::gaussian,        Family::student_t, Family::gumbel,
      Family::survival_gumbel, Family::gumbel90,  Family::gumbel270,
      Family::frank};
  return fams;
}

}  // namespace rvine
