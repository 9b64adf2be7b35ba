#include "rvine/fit.hpp"

#include <algorithm>
#include <cmath>

#include "rvine/stats.hpp"

namespace rvine {

namespace {

constexpr double rho_w_cap = 6.1030338227611125;     // atanh scale, |rho| < 1
constexpr double gumbel_w_cap = 3.8918202981106265;  // log(49): theta <= 50
constexpr double t_nu_w_lo = -4.605170185988091;     // log(0.01): nu >= 2.01
constexpr double t_nu_w_hi = 3.332204510175204;      // log(28):   nu <= 30

struct ParamSlot {
  std::size_t r = 0, c = 0;
  int which = 0;  // 0: dependence parameter, 1: degrees of freedom
};

double pack_param(const PairCopula& cop, int which) {
  if (which == 1) return std::log(cop.nu - 2.0);
  switch (cop.family) {
    case Family::gaussian:
    case Family::student_t: return std::atanh(cop.theta);
    case Family::gumbel:
    case Family::survival_gumbel:
      return std::log(std::max(cop.theta - 1.0, 1e-8));
    case Family::gumbel90:
    case Family::gumbel270:
      return std::log(std::max(-cop.theta - 1.0, 1e-8));
    case Family::frank: return cop.theta;
    case Family::independence: break;
  }
  throw validation_error("family carries no free parameter");
}

void unpack_param(PairCopula& cop, int which, double w) {
  if (which == 1) {
    cop.nu = 2.0 + std::exp(std::clamp(w, t_nu_w_lo, t_nu_w_hi));
    return;
  }
  switch (cop.family) {
    case Family::gaussian:
    case Family::student_t:
      cop.theta = std::tanh(std::clamp(w, -rho_w_cap, rho_w_cap));
      return;
    case Family::gumbel:
    case Family::survival_gumbel:
      cop.theta = 1.0 + std::exp(std::min(w, gumbel_w_cap));
      return;
    case Family::gumbel90:
    case Family::gumbel270:
      cop.theta = -1.0 - std::exp(std::min(w, gumbel_w_cap));
      return;
    case Family::frank: {
      double th = std::clamp(w, -50.0, 50.0);
      if (std::fabs(th) < 1e-8) th = (th < 0.0) ? -1e-8 : 1e-8;
      cop.theta = th;
      return;
    }
    case Family::independence: break;
  }
  throw validation_error("family carries no free parameter");
}

}  // namespace

MleReport fit_mle(const RVineModel& start, const CopulaSample& data) {
  check_model(start);
  check_sample(data, 10);
  if (data.n_cols() != start.dim())
    throw validation_error("sample width does not match the model");

  PreparedModel pm(start);
  const std::size_t n = pm.dim();
  const std::size_t N = data.n_rows();

  MleReport rep;
  rep.model = start;
  rep.n_params = count_parameters(start);
  rep.loglik_seq = pm.loglik(data);

  std::vector<ParamSlot> slots;
  std::vector<double> w0;
  for (std::size_t c = 0; c + 1 < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r) {
      const PairCopula& cop = pm.cell(r, c);
      const int k = family_param_count(cop.family);
      for (int which = 0; which < k; ++which) {
        slots.push_back({r, c, which});
        w0.push_back(pack_param(cop, which));
      }
    }

  auto finish = [&](double ll_mle, std::size_t iters, bool conv) {
    rep.loglik_mle = ll_mle;
    rep.iterations = iters;
    rep.converged = conv;
    const double p = static_cast<double>(rep.n_params);
    rep.aic = -2.0 * ll_mle + 2.0 * p;
    rep.bic = -2.0 * ll_mle + p * std::log(static_cast<double>(N));
    return rep;
  };

  if (slots.empty()) return finish(rep.loglik_seq, 0, true);

  // per-slot replay sets, computed once
  std::vector<std::vector<PreparedModel::CellRef>> affected(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s)
    affected[s] = pm.affected_cells(slots[s].r, slots[s].c);

  std::vector<std::vector<double>> rows(N, std::vector<double>(n));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = data.col[j][i];

  auto apply = [&](const std::vector<double>& w) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      PairCopula cop = pm.cell(slots[s].r, slots[s].c);
      unpack_param(cop, slots[s].which, w[s]);
      pm.set_cell(slots[s].r, slots[s].c, cop);
    }
  };

  std::vector<EvalCache> caches(N);
  std::vector<double> cached_w;

  auto full_eval = [&](const std::vector<double>& w) {
    apply(w);
    double ll = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      ll += pm.log_density_cached(rows[i].data(), caches[i]);
    cached_w = w;
    return ll;
  };

  auto objective = [&](const std::vector<double>& w) { return -full_eval(w); };

  auto gradient = [&](const std::vector<double>& w) {
    if (w != cached_w) full_eval(w);
    std::vector<double> g(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const double h = 1e-6 * std::max(1.0, std::fabs(w[s]));
      PairCopula plus = pm.cell(slots[s].r, slots[s].c);
      PairCopula minus = plus;
      unpack_param(plus, slots[s].which, w[s] + h);
      unpack_param(minus, slots[s].which, w[s] - h);
      double dplus = 0.0, dminus = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        dplus += pm.replay_delta(caches[i], affected[s], slots[s].r,
                                 slots[s].c, plus);
        dminus += pm.replay_delta(caches[i], affected[s], slots[s].r,
                                  slots[s].c, minus);
      }
      g[s] = -(dplus - dminus) / (2.0 * h);
    }
    return g;
  };

  const BfgsResult res = bfgs_min(objective, gradient, w0, 1e-8, 500);
  apply(res.x);
  for (std::size_t c = 0; c + 1 < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r)
      rep.model.cell(r, c) = pm.cell(r, c);
  return finish(-res.fx, static_cast<std::size_t>(res.iterations),
                res.converged);
}

VuongResult vuong(const RVineModel& a, const RVineModel& b,
                  const CopulaSample& data, VuongCorrection correction) {
  PreparedModel pa(a), pb(b);
  if (pa.dim() != pb.dim())
    throw validation_error("models have different dimensions");
  check_sample(data, 2);
  if (data.n_cols() != pa.dim())
    throw validation_error("sample width does not match the models");

  const std::size_t N = data.n_rows();
  EvalWorkspace ws;
  std::vector<double> row(pa.dim());
  std::vector<double> diff(N);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < pa.dim(); ++j) row[j] = data.col[j][i];
    diff[i] = pa.log_density(row.data(), ws) - pb.log_density(row.data(), ws);
    sum += diff[i];
  }
  const double mean = sum / static_cast<double>(N);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(N - 1));
  if (sd == 0.0)
    throw numerical_error("log-density differences have zero variance");

  const double dp = static_cast<double>(count_parameters(a)) -
                    static_cast<double>(count_parameters(b));
  double K = 0.0;
  if (correction == VuongCorrection::akaike) K = dp;
  if (correction == VuongCorrection::schwarz)
    K = dp * std::log(static_cast<double>(N)) / 2.0;

  VuongResult out;
  out.statistic = (sum - K) / (std::sqrt(static_cast<double>(N)) * sd);
  out.p_value = std::erfc(std::fabs(out.statistic) * 0.7071067811865475244);
  if (out.statistic > 1.96)
    out.favored = 1;
  else if (out.statistic < -1.96)
    out.favored = -1;
  return out;
}

}  // namespace rvine
