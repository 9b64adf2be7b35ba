#include "rvine/eval.hpp"

#include <cmath>

#include "rvine/rng.hpp"

namespace rvine {

PreparedModel::PreparedModel(const RVineModel& model) {
  check_model(model);
  n_ = model.dim();
  NormalizeResult norm = normalize_diagonal(model);
  norm_ = std::move(norm.model);
  label_map_ = std::move(norm.label_map);
  maxmat_ = max_matrix(norm_.structure);

  // every column must now hold exactly the labels 1..n-c with the largest
  // on the diagonal; the propagation below reads slots indexed by n - label
  const RVineMatrix& M = norm_.structure;
  for (std::size_t c = 0; c < n_; ++c) {
    if (M(c, c) != n_ - c)
      throw numerical_error("internal: diagonal not normalized");
    for (std::size_t r = c + 1; r < n_; ++r)
      if (M(r, c) >= n_ - c)
        throw numerical_error("internal: column labels not nested");
  }

  order_.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t c = n_ - 1; c-- > 0;)
    for (std::size_t r = n_; r-- > c + 1;)
      order_.push_back({static_cast<std::uint16_t>(r),
                        static_cast<std::uint16_t>(c)});
}

void PreparedModel::set_cell(std::size_t r, std::size_t c,
                             const PairCopula& cop) {
  check_pair_copula(cop);
  norm_.cell(r, c) = cop;
}

double PreparedModel::z2_from(const double* dir, const double* ind,
                              std::size_t r, std::size_t c) const {
  const std::uint32_t mm = maxmat_(r, c);
  const std::size_t c2 = n_ - mm;
  return (mm == norm_.structure(r, c)) ? dir[r * n_ + c2] : ind[r * n_ + c2];
}

double PreparedModel::log_density(const double* u_row,
                                  EvalWorkspace& ws) const {
  if (ws.n != n_) ws.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    require_unit_open(u_row[j], "density argument");
    ws.u_int[label_map_[j] - 1] = clamp_unit(u_row[j]);
  }
  for (std::size_t c = 0; c < n_; ++c)
    ws.dir(n_ - 1, c) = ws.u_int[n_ - c - 1];

  double ll = 0.0;
  for (const CellRef& cell_rc : order_) {
    const std::size_t r = cell_rc.r, c = cell_rc.c;
    const double z1 = ws.dir(r, c);
    const double z2 = z2_from(ws.v_direct.data(), ws.v_indirect.data(), r, c);
    const PairCopula& cop = norm_.cell(r, c);
    ll += log_pdf(cop, z1, z2);
    ws.dir(r - 1, c) = hfunc(cop, z1, z2);
    ws.ind(r - 1, c) = hfunc1(cop, z1, z2);
  }
  return ll;
}

double PreparedModel::log_density(const std::vector<double>& u_row) const {
  if (u_row.size() != n_)
    throw validation_error("density argument length does not match the model");
  EvalWorkspace ws;
  return log_density(u_row.data(), ws);
}

double PreparedModel::loglik(const CopulaSample& data) const {
  check_sample(data);
  if (data.n_cols() != n_)
    throw validation_error("sample width does not match the model");
  EvalWorkspace ws;
  std::vector<double> row(n_);
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < n_; ++j) row[j] = data.col[j][i];
    ll += log_density(row.data(), ws);
  }
  return ll;
}

void PreparedModel::simulate_row(const double* w, double* out,
                                 EvalWorkspace& ws) const {
  if (ws.n != n_) ws.resize(n_);
  for (std::size_t c = 0; c < n_; ++c) ws.dir(n_ - 1, c) = w[c];
  ws.x_int[0] = ws.dir(n_ - 1, n_ - 1);

  for (std::size_t c = n_ - 1; c-- > 0;) {
    for (std::size_t r = c + 1; r < n_; ++r) {
      ws.z2[r] = z2_from(ws.v_direct.data(), ws.v_indirect.data(), r, c);
      ws.dir(n_ - 1, c) = hinv(norm_.cell(r, c), ws.dir(n_ - 1, c), ws.z2[r]);
    }
    ws.x_int[n_ - c - 1] = ws.dir(n_ - 1, c);
    for (std::size_t r = n_; r-- > c + 1;) {
      const double z1 = ws.dir(r, c);
      const PairCopula& cop = norm_.cell(r, c);
      ws.dir(r - 1, c) = hfunc(cop, z1, ws.z2[r]);
      ws.ind(r - 1, c) = hfunc1(cop, z1, ws.z2[r]);
    }
  }
  for (std::size_t j = 0; j < n_; ++j) out[j] = ws.x_int[label_map_[j] - 1];
}

std::vector<PreparedModel::CellRef> PreparedModel::affected_cells(
    std::size_t r, std::size_t c) const {
  std::vector<char> dir_dirty(n_ * n_, 0), ind_dirty(n_ * n_, 0);
  std::vector<CellRef> out;
  bool past = false;
  for (const CellRef& y : order_) {
    const std::size_t yr = y.r, yc = y.c;
    bool hit = false;
    if (yr == r && yc == c) {
      past = true;
      hit = true;
    } else if (past) {
      if (dir_dirty[yr * n_ + yc]) hit = true;
      const std::uint32_t mm = maxmat_(yr, yc);
      const std::size_t c2 = n_ - mm;
      const std::vector<char>& arr =
          (mm == norm_.structure(yr, yc)) ? dir_dirty : ind_dirty;
      if (arr[yr * n_ + c2]) hit = true;
    }
    if (hit) {
      out.push_back(y);
      dir_dirty[(yr - 1) * n_ + yc] = 1;
      ind_dirty[(yr - 1) * n_ + yc] = 1;
    }
  }
  return out;
}

double PreparedModel::log_density_cached(const double* u_row,
                                         EvalCache& cache) const {
  cache.dir.assign(n_ * n_, 0.0);
  cache.ind.assign(n_ * n_, 0.0);
  cache.logc.assign(n_ * n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    require_unit_open(u_row[j], "density argument");
    cache.dir[(n_ - 1) * n_ + (n_ - label_map_[j])] = clamp_unit(u_row[j]);
  }
  double ll = 0.0;
  for (const CellRef& cell_rc : order_) {
    const std::size_t r = cell_rc.r, c = cell_rc.c;
    const double z1 = cache.dir[r * n_ + c];
    const double z2 = z2_from(cache.dir.data(), cache.ind.data(), r, c);
    const PairCopula& cop = norm_.cell(r, c);
    const double lc = log_pdf(cop, z1, z2);
    cache.logc[r * n_ + c] = lc;
    ll += lc;
    cache.dir[(r - 1) * n_ + c] = hfunc(cop, z1, z2);
    cache.ind[(r - 1) * n_ + c] = hfunc1(cop, z1, z2);
  }
  return ll;
}

double PreparedModel::replay_delta(EvalCache& cache,
                                   const std::vector<CellRef>& cells,
                                   std::size_t rx, std::size_t cx,
                                   const PairCopula& override_cop) const {
  // stash the slots the replay will write, restore them afterwards
  std::vector<double> saved_dir(cells.size()), saved_ind(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t slot = (cells[i].r - 1) * n_ + cells[i].c;
    saved_dir[i] = cache.dir[slot];
    saved_ind[i] = cache.ind[slot];
  }
  double delta = 0.0;
  for (const CellRef& cell_rc : cells) {
    const std::size_t r = cell_rc.r, c = cell_rc.c;
    const double z1 = cache.dir[r * n_ + c];
    const double z2 = z2_from(cache.dir.data(), cache.ind.data(), r, c);
    const PairCopula& cop =
        (r == rx && c == cx) ? override_cop : norm_.cell(r, c);
    delta += log_pdf(cop, z1, z2) - cache.logc[r * n_ + c];
    cache.dir[(r - 1) * n_ + c] = hfunc(cop, z1, z2);
    cache.ind[(r - 1) * n_ + c] = hfunc1(cop, z1, z2);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t slot = (cells[i].r - 1) * n_ + cells[i].c;
    cache.dir[slot] = saved_dir[i];
    cache.ind[slot] = saved_ind[i];
  }
  return delta;
}

double log_density(const RVineModel& model, const std::vector<double>& u_row) {
  return PreparedModel(model).log_density(u_row);
}

double density(const RVineModel& model, const std::vector<double>& u_row) {
  return std::exp(log_density(model, u_row));
}

double loglik(const RVineModel& model, const CopulaSample& data) {
  return PreparedModel(model).loglik(data);
}

CopulaSample simulate(const RVineModel& model, std::size_t n_rows,
                      std::uint64_t seed) {
  if (n_rows == 0)
    throw validation_error("simulation needs at least one row");
  PreparedModel pm(model);
  const std::size_t n = pm.dim();
  CopulaSample out;
  out.col.assign(n, std::vector<double>(n_rows));
  SplitMix64 rng(seed);
  EvalWorkspace ws;
  std::vector<double> w(n), row(n);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t c = 0; c < n; ++c) w[c] = rng.next_uniform();
    pm.simulate_row(w.data(), row.data(), ws);
    for (std::size_t j = 0; j < n; ++j) out.col[j][i] = row[j];
  }
  return out;
}

}  // namespace rvine
