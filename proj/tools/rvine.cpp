#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rvine/eval.hpp"
#include "rvine/fit.hpp"
#include "rvine/io.hpp"
#include "rvine/select.hpp"
#include "rvine/study.hpp"

namespace {

using namespace rvine;

std::vector<Family> parse_family_list(const std::string& csv) {
  std::vector<Family> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    const std::string name = csv.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!name.empty()) out.push_back(family_from_name(name));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw validation_error("no families given");
  return out;
}

CopulaSample sample_from_table(const Table& t) {
  CopulaSample s;
  s.col = t.cols;
  return s;
}

void print_family_histogram(const RVineModel& model) {
  std::map<int, std::size_t> counts;
  const std::size_t n = model.dim();
  for (std::size_t c = 0; c + 1 < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r)
      ++counts[family_code(model.cell(r, c).family)];
  std::printf("families:");
  for (const auto& [code, k] : counts)
    std::printf(" %s=%zu", family_name(family_from_code(code)).c_str(), k);
  std::printf("\n");
}

int cmd_pit(const std::string& in_path, const std::string& out_path,
            bool ranks) {
  const Table t = read_csv(in_path);
  if (ranks) {
    std::vector<std::vector<double>> cols;
    for (const auto& x : t.cols) cols.push_back(midranks(x));
    write_csv(out_path, t.header, cols);
  } else {
    const CopulaSample s = pit_transform(t);
    write_csv(out_path, t.header, s.col);
  }
  std::printf("wrote %zu rows x %zu columns to %s\n", t.n_rows(), t.n_cols(),
              out_path.c_str());
  return 0;
}

int cmd_fit(const std::string& in_path, const std::string& vine_class,
            const std::string& families_csv, bool indep_test, double alpha,
            bool mle, const std::string& out_path) {
  const Table t = read_csv(in_path);
  const CopulaSample data = sample_from_table(t);

  SelectionOptions sel;
  sel.families = parse_family_list(families_csv);
  sel.use_indep_test = indep_test;
  sel.alpha = alpha;
  if (vine_class == "rvine")
    sel.vine_class = VineClass::rvine;
  else if (vine_class == "cvine")
    sel.vine_class = VineClass::cvine;
  else if (vine_class == "dvine")
    sel.vine_class = VineClass::dvine;
  else
    throw validation_error("unknown structure class '" + vine_class + "'");

  const SequentialFit fit = sequential_select(data, sel);
  const std::size_t n = data.n_cols(), rows = data.n_rows();
  std::printf("variables: %zu\n", n);
  std::printf("observations: %zu\n", rows);
  std::printf("structure: %s\n", vine_class.c_str());
  print_family_histogram(fit.model);
  const std::size_t p = count_parameters(fit.model);
  std::printf("parameters: %zu\n", p);
  std::printf("sequential loglik: %.6f\n", fit.loglik);

  RVineModel final_model = fit.model;
  double ll = fit.loglik;
  if (mle) {
    const MleReport rep = fit_mle(fit.model, data);
    final_model = rep.model;
    ll = rep.loglik_mle;
    std::printf("mle loglik: %.6f (iterations=%zu, converged=%s)\n",
                rep.loglik_mle, rep.iterations,
                rep.converged ? "yes" : "no");
  }
  const double dp = static_cast<double>(p);
  std::printf("aic: %.6f\n", -2.0 * ll + 2.0 * dp);
  std::printf("bic: %.6f\n",
              -2.0 * ll + dp * std::log(static_cast<double>(rows)));
  if (!out_path.empty()) {
    save_model(out_path, final_model);
    std::printf("model written to %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_simulate(const std::string& model_path, std::size_t n_rows,
                 std::uint64_t seed, const std::string& out_path) {
  const RVineModel model = load_model(model_path);
  const CopulaSample s = simulate(model, n_rows, seed);
  std::vector<std::string> header;
  for (std::size_t j = 0; j < s.n_cols(); ++j)
    header.push_back("u" + std::to_string(j + 1));
  write_csv(out_path, header, s.col);
  std::printf("wrote %zu rows x %zu columns to %s\n", s.n_rows(), s.n_cols(),
              out_path.c_str());
  return 0;
}

int cmd_density(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
  const RVineModel model = load_model(model_path);
  const Table t = read_csv(in_path);
  const CopulaSample data = sample_from_table(t);
  check_sample(data);
  PreparedModel pm(model);
  if (data.n_cols() != pm.dim())
    throw validation_error("sample width does not match the model");
  EvalWorkspace ws;
  std::vector<double> row(pm.dim());
  std::vector<double> ld(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < pm.dim(); ++j) row[j] = data.col[j][i];
    ld[i] = pm.log_density(row.data(), ws);
  }
  write_csv(out_path, {"log_density"}, {ld});
  double total = 0.0;
  for (double v : ld) total += v;
  std::printf("rows: %zu\n", ld.size());
  std::printf("loglik: %.6f\n", total);
  return 0;
}

int cmd_compare(const std::string& model_a, const std::string& model_b,
                const std::string& in_path, const std::string& correction) {
  const RVineModel a = load_model(model_a);
  const RVineModel b = load_model(model_b);
  const Table t = read_csv(in_path);
  const CopulaSample data = sample_from_table(t);

  VuongCorrection corr;
  if (correction == "none")
    corr = VuongCorrection::none;
  else if (correction == "akaike")
    corr = VuongCorrection::akaike;
  else if (correction == "schwarz")
    corr = VuongCorrection::schwarz;
  else
    throw validation_error("unknown correction '" + correction + "'");

  const VuongResult r = vuong(a, b, data, corr);
  std::printf("statistic: %.6f\n", r.statistic);
  std::printf("p_value: %.6g\n", r.p_value);
  std::printf("favored: %s\n",
              r.favored > 0 ? "a" : (r.favored < 0 ? "b" : "none"));
  return 0;
}

int cmd_simstudy(const std::string& scenario, const std::string& tau,
                 std::size_t n_rows, std::size_t reps, std::uint64_t seed,
                 std::size_t threads) {
  StudyOptions opts;
  opts.scenario = scenario_from_name(scenario);
  opts.tau_setting = tau_setting_from_name(tau);
  opts.n_rows = n_rows;
  opts.reps = reps;
  opts.seed = seed;
  opts.threads = threads;
  const StudyResult res = run_study(opts);
  std::printf("scenario: %s tau: %s n: %zu reps: %zu seed: %llu\n",
              scenario.c_str(), tau.c_str(), n_rows, reps,
              static_cast<unsigned long long>(seed));
  std::printf("general: %.6f (reps=%zu)\n", res.general, res.reps_general);
  std::printf("lower: %.6f (reps=%zu)\n", res.lower, res.reps_lower);
  std::printf("upper: %.6f (reps=%zu)\n", res.upper, res.reps_upper);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regular vine copula toolkit"};
  app.require_subcommand(1);

  std::string in_path, out_path, model_path, model_b_path;
  std::string vine_class = "rvine";
  std::string families =
      "gauss,t,gumbel,sgumbel,gumbel90,gumbel270,frank";
  std::string correction = "none";
  std::string scenario, tau = "const";
  bool ranks = false, indep_test = false, mle = false;
  double alpha = 0.05;
  std::size_t n_rows = 1000, reps = 100, threads = 1;
  std::uint64_t seed = 42;

  CLI::App* pit = app.add_subcommand(
      "pit", "rank-transform raw data columns to (0,1)");
  pit->add_option("--in", in_path, "input CSV")->required();
  pit->add_option("--out", out_path, "output CSV")->required();
  pit->add_flag("--ranks", ranks, "write average ranks instead of uniforms");

  CLI::App* fit = app.add_subcommand(
      "fit", "select structure and pair copulas from copula-scale data");
  fit->add_option("--in", in_path, "input CSV of (0,1) data")->required();
  fit->add_option("--structure", vine_class, "rvine|cvine|dvine");
  fit->add_option("--families", families, "comma-separated candidate list");
  fit->add_flag("--indep-test", indep_test,
                "test each edge for independence first");
  fit->add_option("--alpha", alpha, "independence test level");
  fit->add_flag("--mle", mle, "refine all parameters jointly");
  fit->add_option("--out", out_path, "write the fitted model here");

  CLI::App* sim = app.add_subcommand("simulate", "draw rows from a model");
  sim->add_option("--model", model_path, "model file")->required();
  sim->add_option("--n", n_rows, "rows to draw")->required();
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out", out_path, "output CSV")->required();

  CLI::App* dens = app.add_subcommand(
      "density", "evaluate the model log density on data rows");
  dens->add_option("--model", model_path, "model file")->required();
  dens->add_option("--in", in_path, "input CSV of (0,1) data")->required();
  dens->add_option("--out", out_path, "output CSV")->required();

  CLI::App* cmp = app.add_subcommand(
      "compare", "test two fitted models against each other on data");
  cmp->add_option("--model-a", model_path, "first model file")->required();
  cmp->add_option("--model-b", model_b_path, "second model file")->required();
  cmp->add_option("--in", in_path, "input CSV of (0,1) data")->required();
  cmp->add_option("--correction", correction, "none|akaike|schwarz");

  CLI::App* study = app.add_subcommand(
      "simstudy", "repeated simulate/refit/resample comparison");
  study->add_option("--scenario", scenario,
                    "all_gauss|all_t|all_gumbel|all_frank|mixed|t_mixed")
      ->required();
  study->add_option("--tau", tau, "const|mixed");
  study->add_option("--n", n_rows, "rows per rep");
  study->add_option("--reps", reps, "number of reps");
  study->add_option("--seed", seed, "RNG seed");
  study->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(pit)) return cmd_pit(in_path, out_path, ranks);
    if (app.got_subcommand(fit))
      return cmd_fit(in_path, vine_class, families, indep_test, alpha, mle,
                     out_path);
    if (app.got_subcommand(sim))
      return cmd_simulate(model_path, n_rows, seed, out_path);
    if (app.got_subcommand(dens))
      return cmd_density(model_path, in_path, out_path);
    if (app.got_subcommand(cmp))
      return cmd_compare(model_path, model_b_path, in_path, correction);
    if (app.got_subcommand(study))
      return cmd_simstudy(scenario, tau, n_rows, reps, seed, threads);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
