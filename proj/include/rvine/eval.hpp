#pragma once

#include <cstdint>
#include <vector>

#include "rvine/model.hpp"
#include "rvine/sample.hpp"

namespace rvine {

// Scratch arrays for one density or simulation pass; reusable across rows.
struct EvalWorkspace {
  std::size_t n = 0;
  std::vector<double> v_direct, v_indirect, z2, u_int, x_int;

  void resize(std::size_t dim) {
    n = dim;
    v_direct.assign(dim * dim, 0.0);
    v_indirect.assign(dim * dim, 0.0);
    z2.assign(dim, 0.0);
    u_int.assign(dim, 0.0);
    x_int.assign(dim, 0.0);
  }
  double& dir(std::size_t r, std::size_t c) { return v_direct[r * n + c]; }
  double& ind(std::size_t r, std::size_t c) { return v_indirect[r * n + c]; }
};

// One full evaluation pass kept for later partial replays.
struct EvalCache {
  std::vector<double> dir, ind, logc;  // each n*n, row-major
};

// A model bound to an internally relabeled copy of its structure, ready for
// repeated evaluation. User-facing rows keep the original variable order:
// column j of the data corresponds to structure label j+1.
class PreparedModel {
 public:
  struct CellRef {
    std::uint16_t r = 0, c = 0;
  };

  explicit PreparedModel(const RVineModel& model);

  std::size_t dim() const { return n_; }
  const RVineModel& normalized() const { return norm_; }
  const std::vector<std::uint32_t>& label_map() const { return label_map_; }

  const PairCopula& cell(std::size_t r, std::size_t c) const {
    return norm_.cell(r, c);
  }
  void set_cell(std::size_t r, std::size_t c, const PairCopula& cop);

  double log_density(const double* u_row, EvalWorkspace& ws) const;
  double log_density(const std::vector<double>& u_row) const;
  double loglik(const CopulaSample& data) const;

  // Maps n independent uniforms to one joint draw (user variable order).
  void simulate_row(const double* w, double* out, EvalWorkspace& ws) const;

  // Cells in evaluation order (rightmost column first, bottom row first).
  const std::vector<CellRef>& eval_order() const { return order_; }

  // Cells (in evaluation order) whose inputs change when the copula in
  // (r,c) changes, including (r,c) itself.
  std::vector<CellRef> affected_cells(std::size_t r, std::size_t c) const;

  // Full pass that also records every propagated value and per-cell log
  // density for later replays.
  double log_density_cached(const double* u_row, EvalCache& cache) const;

  // Re-evaluates only `cells` (must be in evaluation order) against `cache`,
  // with the copula at (rx,cx) replaced by `override_cop`. Returns the log
  // density change relative to the cached pass; the cache is left untouched.
  double replay_delta(EvalCache& cache, const std::vector<CellRef>& cells,
                      std::size_t rx, std::size_t cx,
                      const PairCopula& override_cop) const;

 private:
  std::size_t n_ = 0;
  RVineModel norm_;
  RVineMatrix maxmat_;
  std::vector<std::uint32_t> label_map_;
  std::vector<CellRef> order_;

  double z2_from(const double* dir, const double* ind, std::size_t r,
                 std::size_t c) const;
};

double log_density(const RVineModel& model, const std::vector<double>& u_row);
double density(const RVineModel& model, const std::vector<double>& u_row);
double loglik(const RVineModel& model, const CopulaSample& data);

CopulaSample simulate(const RVineModel& model, std::size_t n_rows,
                      std::uint64_t seed);

}  // namespace rvine
