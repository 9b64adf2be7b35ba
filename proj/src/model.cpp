#include "rvine/model.hpp"

namespace rvine {

void check_model(const RVineModel& model) {
  check_rvine_matrix(model.structure);
  const std::size_t n = model.dim();
  if (model.cells.size() != n * n)
    throw validation_error("model cell storage does not match its dimension");
  for (std::size_t c = 0; c + 1 < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r) {
      try {
        check_pair_copula(model.cell(r, c));
      } catch (const validation_error& e) {
        throw validation_error("cell at row " + std::to_string(r + 1) +
                               ", column " + std::to_string(c + 1) + ": " +
                               e.what());
      }
    }
}

std::size_t count_parameters(const RVineModel& model) {
  const std::size_t n = model.dim();
  std::size_t p = 0;
  for (std::size_t c = 0; c + 1 < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r)
      p += static_cast<std::size_t>(family_param_count(model.cell(r, c).family));
  return p;
}

NormalizeResult normalize_diagonal(const RVineModel& model) {
  NormalizeResult res;
  res.label_map = normalizing_map(model.structure);
  res.model = model;
  res.model.structure = relabel_matrix(model.structure, res.label_map);
  return res;
}

}  // namespace rvine
