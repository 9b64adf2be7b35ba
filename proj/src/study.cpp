#include "rvine/study.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rvine/eval.hpp"
#include "rvine/rng.hpp"
#include "rvine/stats.hpp"

namespace rvine {

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::all_gauss: return "all_gauss";
    case Scenario::all_t: return "all_t";
    case Scenario::all_gumbel: return "all_gumbel";
    case Scenario::all_frank: return "all_frank";
    case Scenario::mixed: return "mixed";
    case Scenario::t_mixed: return "t_mixed";
  }
  throw validation_error("unknown scenario");
}

Scenario scenario_from_name(const std::string& name) {
  for (Scenario s : {Scenario::all_gauss, Scenario::all_t, Scenario::all_gumbel,
                     Scenario::all_frank, Scenario::mixed, Scenario::t_mixed})
    if (scenario_name(s) == name) return s;
  throw validation_error("unknown scenario '" + name + "'");
}

std::string tau_setting_name(TauSetting t) {
  return t == TauSetting::tau_const ? "const" : "mixed";
}

TauSetting tau_setting_from_name(const std::string& name) {
  if (name == "const") return TauSetting::tau_const;
  if (name == "mixed") return TauSetting::tau_mixed;
  throw validation_error("unknown tau setting '" + name + "'");
}

namespace {

const std::uint32_t kStructureRows[7][7] = {
    {7, 0, 0, 0, 0, 0, 0},
    {4, 4, 0, 0, 0, 0, 0},
    {5, 6, 6, 0, 0, 0, 0},
    {1, 5, 5, 5, 0, 0, 0},
    {2, 1, 1, 1, 1, 0, 0},
    {3, 2, 2, 3, 3, 3, 0},
    {6, 3, 3, 2, 2, 2, 2},
};

// dependence per cell, rows 2..7 (columns 1..row-1)
const std::vector<std::vector<double>> kTauConst = {
    {0.05},
    {0.10, 0.10},
    {0.15, 0.15, 0.15},
    {0.20, 0.20, 0.20, 0.20},
    {0.40, 0.40, 0.40, 0.40, 0.50},
    {0.60, 0.60, 0.60, 0.60, 0.70, 0.70},
};
const std::vector<std::vector<double>> kTauMixed = {
    {0.05},
    {0.10, 0.10},
    {0.15, 0.15, 0.15},
    {0.20, 0.20, 0.20, 0.20},
    {0.25, 0.30, 0.35, 0.40, 0.45},
    {0.50, 0.55, 0.60, 0.65, 0.70, 0.75},
};

constexpr Family N = Family::gaussian;
constexpr Family T = Family::student_t;
constexpr Family G = Family::gumbel;
constexpr Family SG = Family::survival_gumbel;
constexpr Family F = Family::frank;

const std::vector<std::vector<Family>> kFamMixed = {
    {N},
    {F, N},
    {N, F, N},
    {G, SG, G, SG},
    {F, N, F, N, T},
    {SG, G, SG, G, T, T},
};
const std::vector<std::vector<Family>> kFamTMixed = {
    {N},
    {F, N},
    {N, F, N},
    {G, SG, G, SG},
    {T, T, T, T, T},
    {T, T, T, T, T, T},
};

}  // namespace

RVineModel study_true_model(Scenario scenario, TauSetting tau_setting) {
  RVineMatrix M(7);
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 7; ++c) M(r, c) = kStructureRows[r][c];
  RVineModel model(M);

  const auto& taus =
      (tau_setting == TauSetting::tau_const) ? kTauConst : kTauMixed;

  for (std::size_t row = 2; row <= 7; ++row) {
    for (std::size_t col = 1; col <= row - 1; ++col) {
      const double tau = taus[row - 2][col - 1];
      Family fam;
      switch (scenario) {
        case Scenario::all_gauss: fam = N; break;
        case Scenario::all_t: fam = T; break;
        case Scenario::all_gumbel: fam = G; break;
        case Scenario::all_frank: fam = F; break;
        case Scenario::mixed: fam = kFamMixed[row - 2][col - 1]; break;
        case Scenario::t_mixed: fam = kFamTMixed[row - 2][col - 1]; break;
        default: throw validation_error("unknown scenario");
      }
      PairCopula cop = tau_to_param(fam, tau);
      if (fam == T) {
        if (scenario == Scenario::all_t)
          cop.nu = static_cast<double>(10 - row);
        else {
          static const double df_cycle[4] = {3.0, 4.0, 6.0, 8.0};
          cop.nu = df_cycle[(row + col) % 4];
        }
      }
      model.cell(row - 1, col - 1) = cop;
    }
  }
  check_model(model);
  return model;
}

namespace {

struct RepOutcome {
  double general = 0.0;
  double lower = std::nan("");
  double upper = std::nan("");
};

RepOutcome run_rep(const RVineModel& truth, const StudyOptions& o,
                   std::size_t rep) {
  const std::uint64_t seed_r = o.seed + rep;
  const CopulaSample x = simulate(truth, o.n_rows, seed_r);

  RVineModel fitted;
  if (o.force_true_model) {
    fitted = truth;
  } else {
    SelectionOptions sel;
    sel.families = all_parametric_families();
    sel.use_indep_test = false;
    sel.vine_class = VineClass::rvine;
    fitted = sequential_select(x, sel).model;
  }
  const CopulaSample y = simulate(fitted, o.n_rows, derive_seed(seed_r, 1));

  const std::size_t n = x.n_cols();
  RepOutcome out;
  double gen_sum = 0.0, lo_sum = 0.0, hi_sum = 0.0;
  std::size_t gen_k = 0, lo_k = 0, hi_k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      gen_sum += std::fabs(kendall_tau(x.col[i], x.col[j]) -
                           kendall_tau(y.col[i], y.col[j]));
      ++gen_k;
      const auto xl = exceedance_tau(x.col[i], x.col[j], 0.2, true);
      const auto yl = exceedance_tau(y.col[i], y.col[j], 0.2, true);
      if (xl && yl) {
        lo_sum += std::fabs(*xl - *yl);
        ++lo_k;
      }
      const auto xu = exceedance_tau(x.col[i], x.col[j], 0.2, false);
      const auto yu = exceedance_tau(y.col[i], y.col[j], 0.2, false);
      if (xu && yu) {
        hi_sum += std::fabs(*xu - *yu);
        ++hi_k;
      }
    }
  out.general = gen_sum / static_cast<double>(gen_k);
  if (lo_k) out.lower = lo_sum / static_cast<double>(lo_k);
  if (hi_k) out.upper = hi_sum / static_cast<double>(hi_k);
  return out;
}

}  // namespace

StudyResult run_study(const StudyOptions& opts) {
  if (opts.reps < 1) throw validation_error("study needs at least one rep");
  if (opts.n_rows < 10)
    throw validation_error("study needs at least 10 rows per rep");
  if (opts.threads < 1)
    throw validation_error("study needs at least one thread");

  const RVineModel truth =
      study_true_model(opts.scenario, opts.tau_setting);

  StudyResult res;
  res.rep_general.assign(opts.reps, std::nan(""));
  res.rep_lower.assign(opts.reps, std::nan(""));
  res.rep_upper.assign(opts.reps, std::nan(""));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load()) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= opts.reps) break;
      try {
        const RepOutcome o = run_rep(truth, opts, rep);
        res.rep_general[rep] = o.general;
        res.rep_lower[rep] = o.lower;
        res.rep_upper[rep] = o.upper;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t workers = std::min(opts.threads, opts.reps);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  auto aggregate = [](const std::vector<double>& v, double& mean,
                      std::size_t& count) {
    double s = 0.0;
    std::size_t k = 0;
    for (double x : v)
      if (!std::isnan(x)) {
        s += x;
        ++k;
      }
    count = k;
    mean = k ? s / static_cast<double>(k) : std::nan("");
  };
  aggregate(res.rep_general, res.general, res.reps_general);
  aggregate(res.rep_lower, res.lower, res.reps_lower);
  aggregate(res.rep_upper, res.upper, res.reps_upper);
  return res;
}

}  // namespace rvine
