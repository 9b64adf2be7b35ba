#pragma once

#include <vector>

#include "rvine/bicop.hpp"
#include "rvine/structure.hpp"

namespace rvine {

// A vine structure together with one pair copula per below-diagonal cell.
// The copula in cell (r,c) joins the column's diagonal variable (first
// argument) with the variable labeled M(r,c) (second argument), conditioned
// on the labels below row r in column c.
struct RVineModel {
  RVineMatrix structure;
  std::vector<PairCopula> cells;  // row-major n*n; only r > c entries are used

  RVineModel() = default;
  explicit RVineModel(const RVineMatrix& M)
      : structure(M), cells(M.n * M.n) {}

  std::size_t dim() const { return structure.n; }
  const PairCopula& cell(std::size_t r, std::size_t c) const {
    return cells[r * structure.n + c];
  }
  PairCopula& cell(std::size_t r, std::size_t c) {
    return cells[r * structure.n + c];
  }
};

void check_model(const RVineModel& model);

// Total count of free copula parameters across all cells.
std::size_t count_parameters(const RVineModel& model);

// Relabels the structure so column c carries diagonal label n-c; copula cells
// stay in place. label_map[l-1] gives the new label for old label l.
struct NormalizeResult {
  RVineModel model;
  std::vector<std::uint32_t> label_map;
};
NormalizeResult normalize_diagonal(const RVineModel& model);

}  // namespace rvine
