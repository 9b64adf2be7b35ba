#include "rvine/structure.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace rvine {

bool operator==(const RVineMatrix& a, const RVineMatrix& b) {
  return a.n == b.n && a.m == b.m;
}

bool operator==(const ConstraintEntry& x, const ConstraintEntry& y) {
  return x.a == y.a && x.b == y.b && x.cond == y.cond;
}

bool operator<(const ConstraintEntry& x, const ConstraintEntry& y) {
  if (x.a != y.a) return x.a < y.a;
  if (x.b != y.b) return x.b < y.b;
  return x.cond < y.cond;
}

std::uint64_t label_bit(std::uint32_t label) {
  return 1ull << (label - 1);
}

std::string cond_to_string(std::uint64_t cond) {
  std::string s = "{";
  bool first = true;
  for (std::uint32_t l = 1; l <= 64; ++l)
    if (cond & label_bit(l)) {
      if (!first) s += ",";
      s += std::to_string(l);
      first = false;
    }
  return s + "}";
}

namespace {

std::string cell_str(std::size_t r, std::size_t c) {
  return "row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1);
}

// suffix[c][r] = bitmask of entries M(r,c), M(r+1,c), ..., M(n-1,c);
// suffix[c][n] = 0.
std::vector<std::vector<std::uint64_t>> column_suffix_masks(
    const RVineMatrix& M) {
  const std::size_t n = M.n;
  std::vector<std::vector<std::uint64_t>> sfx(n,
                                              std::vector<std::uint64_t>(n + 1, 0));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = n; r-- > c;)
      sfx[c][r] = sfx[c][r + 1] | label_bit(M(r, c));
  return sfx;
}

}  // namespace

std::optional<std::string> rvine_matrix_diagnosis(const RVineMatrix& M) {
  const std::size_t n = M.n;
  if (n == 0 || M.m.size() != n * n)
    return "matrix storage does not match its dimension";
  if (n > 64) return "dimension exceeds the supported maximum of 64";

  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const std::uint32_t x = M(r, c);
      if (c > r) {
        if (x != 0)
          return "entry above the diagonal at " + cell_str(r, c) +
                 " must be zero";
      } else if (x < 1 || x > n) {
        return "entry " + std::to_string(x) + " at " + cell_str(r, c) +
               " is not a label in 1.." + std::to_string(n);
      }
    }

  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t seen = 0;
    for (std::size_t r = c; r < n; ++r) {
      const std::uint64_t bit = label_bit(M(r, c));
      if (seen & bit)
        return "column " + std::to_string(c + 1) + " contains label " +
               std::to_string(M(r, c)) + " more than once";
      seen |= bit;
    }
  }

  const auto sfx = column_suffix_masks(M);
  for (std::size_t c = 1; c < n; ++c)
    if (sfx[c][c] & ~sfx[c - 1][c - 1])
      return "labels of column " + std::to_string(c + 1) +
             " are not a subset of column " + std::to_string(c);

  for (std::size_t c = 0; c + 1 < n; ++c)
    if (sfx[c + 1][c + 1] & label_bit(M(c, c)))
      return "diagonal label " + std::to_string(M(c, c)) + " of column " +
             std::to_string(c + 1) + " reappears in column " +
             std::to_string(c + 2);

  // Each above-bottom entry, together with the set below it, must replay a
  // constraint available from some column to its right.
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t k = i + 1; k + 1 < n; ++k) {
      const std::uint32_t x = M(k, i);
      const std::uint64_t d = sfx[i][k + 1];
      bool found = false;
      for (std::size_t j = i + 1; j + 1 < n && !found; ++j) {
        for (std::size_t kk = j + 1; kk < n && !found; ++kk) {
          if (x == M(j, j) && d == sfx[j][kk]) found = true;
          if (x == M(kk, j) && d == (label_bit(M(j, j)) | sfx[j][kk + 1]))
            found = true;
        }
      }
      if (!found)
        return "entry " + std::to_string(x) + " at " + cell_str(k, i) +
               " conditioned on " + cond_to_string(d) +
               " matches no constraint from the columns to its right";
    }

  return std::nullopt;
}

void check_rvine_matrix(const RVineMatrix& M) {
  if (auto why = rvine_matrix_diagnosis(M))
    throw validation_error("invalid vine matrix: " + *why);
}

std::vector<ConstraintEntry> constraint_set(const RVineMatrix& M) {
  const std::size_t n = M.n;
  const auto sfx = column_suffix_masks(M);
  std::vector<ConstraintEntry> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      ConstraintEntry e;
      e.a = std::min(M(i, i), M(k, i));
      e.b = std::max(M(i, i), M(k, i));
      e.cond = sfx[i][k + 1];
      out.push_back(e);
    }
  std::sort(out.begin(), out.end());
  return out;
}

RVineMatrix max_matrix(const RVineMatrix& M) {
  const std::size_t n = M.n;
  for (std::size_t c = 0; c < n; ++c)
    if (M(c, c) != n - c)
      throw validation_error("max_matrix requires a normalized diagonal");
  RVineMatrix out(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::uint32_t mx = 0;
    for (std::size_t r = n; r-- > c;) {
      mx = std::max(mx, M(r, c));
      out(r, c) = mx;
    }
  }
  return out;
}

std::vector<std::uint32_t> normalizing_map(const RVineMatrix& M) {
  const std::size_t n = M.n;
  std::vector<std::uint32_t> map(n, 0);
  std::uint64_t seen = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::uint32_t d = M(c, c);
    if (d < 1 || d > n)
      throw validation_error("diagonal label outside 1..n");
    if (seen & label_bit(d))
      throw validation_error("diagonal labels are not distinct");
    seen |= label_bit(d);
    map[d - 1] = static_cast<std::uint32_t>(n - c);
  }
  return map;
}

RVineMatrix relabel_matrix(const RVineMatrix& M,
                           const std::vector<std::uint32_t>& map) {
  if (map.size() != M.n)
    throw validation_error("relabel map size does not match the matrix");
  RVineMatrix out(M.n);
  for (std::size_t r = 0; r < M.n; ++r)
    for (std::size_t c = 0; c <= r; ++c) out(r, c) = map[M(r, c) - 1];
  return out;
}

TreeSequence matrix_to_trees(const RVineMatrix& M) {
  check_rvine_matrix(M);
  const std::size_t n = M.n;
  TreeSequence trees(n > 0 ? n - 1 : 0);
  for (const ConstraintEntry& e : constraint_set(M))
    trees[static_cast<std::size_t>(std::popcount(e.cond))].push_back(e);
  return trees;
}

RVineMatrix trees_to_matrix(const TreeSequence& trees) {
  const std::size_t n = trees.size() + 1;
  if (n > 64)
    throw validation_error("dimension exceeds the supported maximum of 64");
  if (n == 1) {
    RVineMatrix M(1);
    M(0, 0) = 1;
    return M;
  }

  struct Item {
    ConstraintEntry e;
    std::size_t level;
    bool used = false;
  };
  std::vector<Item> items;
  std::vector<ConstraintEntry> given;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (trees[t].size() != n - 1 - t)
      throw validation_error("tree " + std::to_string(t + 1) + " must have " +
                             std::to_string(n - 1 - t) + " edges");
    for (ConstraintEntry e : trees[t]) {
      if (e.a == e.b) throw validation_error("edge joins a label to itself");
      if (e.a > e.b) std::swap(e.a, e.b);
      if (e.a < 1 || e.b > n)
        throw validation_error("edge label outside 1..n");
      if (static_cast<std::size_t>(std::popcount(e.cond)) != t)
        throw validation_error("edge in tree " + std::to_string(t + 1) +
                               " must condition on " + std::to_string(t) +
                               " labels");
      if (e.cond >> n)
        throw validation_error("conditioning label outside 1..n");
      if (e.cond & (label_bit(e.a) | label_bit(e.b)))
        throw validation_error("edge conditions on its own pair");
      items.push_back({e, t, false});
      given.push_back(e);
    }
  }

  const char* not_a_vine = "tree sequence does not form a regular vine";
  RVineMatrix M(n);
  std::uint64_t active = (n == 64) ? ~0ull : ((1ull << n) - 1);

  for (std::size_t c = 0; c + 1 < n; ++c) {
    const std::size_t top = n - c - 2;  // level of the single remaining top edge
    const Item* top_item = nullptr;
    for (const Item& it : items)
      if (!it.used && it.level == top) {
        if (top_item) throw validation_error(not_a_vine);
        top_item = &it;
      }
    if (!top_item) throw validation_error(not_a_vine);
    const std::uint32_t d = std::max(top_item->e.a, top_item->e.b);

    for (std::size_t lvl = top + 1; lvl-- > 0;) {
      Item* hit = nullptr;
      for (Item& it : items)
        if (!it.used && it.level == lvl && (it.e.a == d || it.e.b == d)) {
          if (hit) throw validation_error(not_a_vine);
          hit = &it;
        }
      if (!hit) throw validation_error(not_a_vine);
      hit->used = true;
      M(n - 1 - lvl, c) = (hit->e.a == d) ? hit->e.b : hit->e.a;
    }
    M(c, c) = d;
    active &= ~label_bit(d);
    for (const Item& it : items)
      if (!it.used &&
          ((label_bit(it.e.a) | label_bit(it.e.b) | it.e.cond) & label_bit(d)))
        throw validation_error(not_a_vine);
  }

  if (std::popcount(active) != 1) throw validation_error(not_a_vine);
  M(n - 1, n - 1) =
      static_cast<std::uint32_t>(std::countr_zero(active)) + 1;

  if (rvine_matrix_diagnosis(M)) throw validation_error(not_a_vine);
  std::sort(given.begin(), given.end());
  if (constraint_set(M) != given) throw validation_error(not_a_vine);
  return M;
}

std::uint64_t count_rvines(std::size_t n) {
  if (n == 0) throw validation_error("count_rvines requires n >= 1");
  if (n >= 12)
    throw std::overflow_error("vine structure count exceeds 64 bits for n >= 12");
  if (n <= 2) return 1;
  std::uint64_t fact = 1;
  for (std::size_t i = 2; i <= n; ++i) fact *= i;
  const std::uint64_t exponent = (n - 2) * (n - 3) / 2;
  return (fact / 2) << exponent;
}

namespace {

void enumerate_columns(RVineMatrix& M, std::vector<std::uint32_t> active,
                       std::size_t c, std::vector<RVineMatrix>& out) {
  const std::size_t n = M.n;
  if (c + 1 == n) {
    M(c, c) = active[0];
    if (!rvine_matrix_diagnosis(M)) out.push_back(M);
    return;
  }
  std::sort(active.begin(), active.end());
  std::vector<std::uint32_t> arrangement = active;
  do {
    M(c, c) = arrangement[0];
    for (std::size_t r = c + 1; r < n; ++r)
      M(r, c) = arrangement[r - c];
    std::vector<std::uint32_t> rest(arrangement.begin() + 1,
                                    arrangement.end());
    enumerate_columns(M, rest, c + 1, out);
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));
}

}  // namespace

std::vector<RVineMatrix> enumerate_rvine_matrices(std::size_t n) {
  if (n < 1 || n > 5)
    throw validation_error("enumeration is supported for 1 <= n <= 5");
  std::vector<std::uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = static_cast<std::uint32_t>(i + 1);
  RVineMatrix M(n);
  std::vector<RVineMatrix> out;
  enumerate_columns(M, labels, 0, out);
  return out;
}

}  // namespace rvine
