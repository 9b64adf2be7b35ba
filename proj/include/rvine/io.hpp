#pragma once

#include <string>
#include <vector>

#include "rvine/model.hpp"
#include "rvine/sample.hpp"

namespace rvine {

// Numeric table with named columns, as read from a comma-separated file
// with a header line. Cells must parse as finite numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;

  std::size_t n_cols() const { return cols.size(); }
  std::size_t n_rows() const { return cols.empty() ? 0 : cols.front().size(); }
};

Table read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& cols);

// Average ranks (1-based; tied values share the mean of their positions).
std::vector<double> midranks(const std::vector<double>& x);

// Rank-based probability integral transform: midrank/(N+1) per column.
// Constant columns are rejected.
CopulaSample pit_transform(const Table& table);

// Plain-text model serialization; doubles survive a round trip bit-exactly.
void save_model(const std::string& path, const RVineModel& model);
RVineModel load_model(const std::string& path);

}  // namespace rvine
