#include "rvine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rvine/common.hpp"

namespace rvine {

double qnorm(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw numerical_error("qnorm: probability outside (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
            2.05319162663775882187e0) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
  }
  return (q < 0.0) ? -val : val;
}

double pnorm(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double pt(double x, double nu) {
  boost::math::students_t_distribution<double> d(nu);
  return boost::math::cdf(d, x);
}

double qt(double p, double nu) {
  if (!(p > 0.0 && p < 1.0))
    throw numerical_error("qt: probability outside (0,1)");
  boost::math::students_t_distribution<double> d(nu);
  return boost::math::quantile(d, p);
}

namespace {

// Count inversions of v in place; returns the number of strictly discordant
// pairs. Buffer reused across merge passes.
std::uint64_t merge_count(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> buf(n);
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    }
  }
  return swaps;
}

std::uint64_t tie_pairs(const std::vector<double>& sorted_keys) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted_keys.size(); ++i) {
    if (i < sorted_keys.size() && sorted_keys[i] == sorted_keys[i - 1]) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw validation_error("kendall_tau: length mismatch");
  if (n < 2) throw validation_error("kendall_tau: need at least two points");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;

  // x-tie and joint-tie counts on the (x,y)-sorted order.
  std::uint64_t n1 = 0, n3 = 0;
  {
    std::size_t run_x = 1, run_xy = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      const bool same_x = i < n && x[idx[i]] == x[idx[i - 1]];
      const bool same_xy = same_x && y[idx[i]] == y[idx[i - 1]];
      if (same_x) {
        ++run_x;
      } else {
        n1 += static_cast<std::uint64_t>(run_x) * (run_x - 1) / 2;
        run_x = 1;
      }
      if (same_xy) {
        ++run_xy;
      } else {
        n3 += static_cast<std::uint64_t>(run_xy) * (run_xy - 1) / 2;
        run_xy = 1;
      }
    }
  }

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  const std::uint64_t swaps = merge_count(ys);
  const std::uint64_t n2 = tie_pairs(ys);

  const double pq = static_cast<double>(n0) - static_cast<double>(n1) -
                    static_cast<double>(n2) + static_cast<double>(n3) -
                    2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  if (!(denom > 0.0)) return 0.0;
  return pq / denom;
}

namespace {

struct GaussLegendre {
  std::vector<double> x, w;  // nodes/weights on [-1,1]
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::fabs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }
};

const GaussLegendre& gl32() {
  static const GaussLegendre g(32);
  return g;
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, double max_width) {
  const auto& g = gl32();
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h, half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
      s += g.w[i] * f(mid + half * g.x[i]);
    total += s * half;
  }
  return total;
}

}  // namespace

double debye1(double x) {
  if (x == 0.0) return 1.0;
  if (x < 0.0) return debye1(-x) - x / 2.0;
  const double integral = integrate_panels(
      [](double t) { return t / std::expm1(t); }, 0.0, x, 8.0);
  return integral / x;
}

GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double xtol, int max_iter) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > xtol && it < max_iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
    ++it;
  }
  GoldenResult res;
  res.x = (fc < fd) ? c : d;
  res.fx = std::min(fc, fd);
  res.iterations = it;
  return res;
}

namespace {

std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> g(n), xp = x;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

BfgsResult bfgs_min(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    std::vector<double> x0, double rel_ftol, int max_iter) {
  const std::size_t n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.fx = f(res.x);
  if (n == 0) {
    res.converged = true;
    return res;
  }
  auto gradient = [&](const std::vector<double>& x) {
    return grad ? grad(x) : fd_gradient(f, x);
  };

  std::vector<double> g = gradient(res.x);
  auto norm = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
  };
  // start with unit-length steepest descent steps; the first curvature pair
  // rescales the whole approximation
  std::vector<double> hmat(n * n, 0.0);  // inverse Hessian approximation
  for (std::size_t i = 0; i < n; ++i)
    hmat[i * n + i] = 1.0 / std::max(1.0, norm(g));
  bool scaled = false;

  std::vector<double> p(n), xn(n), gn(n), s(n), yv(n), hy(n);
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += hmat[i * n + j] * g[j];
      p[i] = -acc;
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
    if (!(slope < 0.0)) {  // non-descent direction: reset to steepest descent
      const double unit = 1.0 / std::max(1.0, norm(g));
      for (std::size_t i = 0; i < n; ++i) {
        std::fill(hmat.begin() + i * n, hmat.begin() + (i + 1) * n, 0.0);
        hmat[i * n + i] = unit;
        p[i] = -g[i] * unit;
      }
      scaled = false;
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope -= g[i] * g[i] * unit;
      if (!(slope < 0.0)) {  // zero gradient
        res.converged = true;
        return res;
      }
    }

    double t = 1.0, fn = res.fx;
    bool improved = false;
    while (t > 1e-14) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + t * p[i];
      fn = f(xn);
      if (std::isfinite(fn) && fn <= res.fx + 1e-4 * t * slope) {
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {  // no progress possible within line-search budget
      res.converged = true;
      return res;
    }

    gn = gradient(xn);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      yv[i] = gn[i] - g[i];
      sy += s[i] * yv[i];
      ss += s[i] * s[i];
      yy += yv[i] * yv[i];
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      if (!scaled && yy > 0.0) {
        const double factor = sy / yy;
        std::fill(hmat.begin(), hmat.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) hmat[i * n + i] = factor;
        scaled = true;
      }
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += hmat[i * n + j] * yv[j];
        hy[i] = acc;
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
      const double c1 = (sy + yhy) / (sy * sy);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          hmat[i * n + j] += c1 * s[i] * s[j] -
                             (hy[i] * s[j] + s[i] * hy[j]) / sy;
    }

    const double drop = res.fx - fn;
    res.x = xn;
    res.fx = fn;
    g = gn;
    if (drop < rel_ftol * std::max(1.0, std::fabs(fn))) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;
  return res;
}

}  // namespace rvine
