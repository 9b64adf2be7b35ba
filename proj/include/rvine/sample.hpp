#pragma once

#include <cstddef>
#include <vector>

#include "rvine/common.hpp"

namespace rvine {

// Copula-scale data, one column per variable. All entries must lie strictly
// inside (0,1); columns share a common length.
struct CopulaSample {
  std::vector<std::vector<double>> col;

  std::size_t n_cols() const { return col.size(); }
  std::size_t n_rows() const { return col.empty() ? 0 : col.front().size(); }
};

inline void check_sample(const CopulaSample& data, std::size_t min_rows = 1) {
  if (data.col.empty()) throw validation_error("sample has no columns");
  const std::size_t rows = data.col.front().size();
  if (rows < min_rows)
    throw validation_error("sample needs at least " + std::to_string(min_rows) +
                           " rows");
  for (const auto& c : data.col) {
    if (c.size() != rows)
      throw validation_error("sample columns differ in length");
    for (double u : c) require_unit_open(u, "sample entry");
  }
}

}  // namespace rvine
