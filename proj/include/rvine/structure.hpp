#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvine/common.hpp"

namespace rvine {

// Lower-triangular array of variable labels describing a vine structure.
// Row-major n*n storage, zero above the diagonal, labels are 1-based.
struct RVineMatrix {
  std::size_t n = 0;
  std::vector<std::uint32_t> m;

  RVineMatrix() = default;
  explicit RVineMatrix(std::size_t dim) : n(dim), m(dim * dim, 0) {}

  std::uint32_t operator()(std::size_t r, std::size_t c) const {
    return m[r * n + c];
  }
  std::uint32_t& operator()(std::size_t r, std::size_t c) {
    return m[r * n + c];
  }
};

bool operator==(const RVineMatrix& a, const RVineMatrix& b);

// One pair-copula constraint: conditioned pair {a,b} with a < b and the
// conditioning set as a bitmask (bit l-1 set when label l is conditioned on).
struct ConstraintEntry {
  std::uint32_t a = 0, b = 0;
  std::uint64_t cond = 0;
};

bool operator==(const ConstraintEntry& x, const ConstraintEntry& y);
bool operator<(const ConstraintEntry& x, const ConstraintEntry& y);

std::uint64_t label_bit(std::uint32_t label);
std::string cond_to_string(std::uint64_t cond);

// Checks whether M describes a vine structure. Returns an explanation of the
// first failed requirement (checked in a fixed order: label range, per-column
// distinctness, column nesting, diagonal elimination, constraint membership
// for every above-bottom entry), or nullopt when M is valid.
std::optional<std::string> rvine_matrix_diagnosis(const RVineMatrix& M);
void check_rvine_matrix(const RVineMatrix& M);

// All n(n-1)/2 constraints encoded by a valid matrix, sorted.
std::vector<ConstraintEntry> constraint_set(const RVineMatrix& M);

// Per-column suffix maxima over rows r..n-1. Requires a normalized diagonal
// (column c carries diagonal label n-c).
RVineMatrix max_matrix(const RVineMatrix& M);

// Relabeling map sending each diagonal label to n-c for its column c;
// map[l-1] is the new label for old label l.
std::vector<std::uint32_t> normalizing_map(const RVineMatrix& M);
RVineMatrix relabel_matrix(const RVineMatrix& M,
                           const std::vector<std::uint32_t>& map);

// trees[t] holds the constraints whose conditioning sets have size t.
using TreeSequence = std::vector<std::vector<ConstraintEntry>>;

TreeSequence matrix_to_trees(const RVineMatrix& M);

// Rebuilds a matrix from a tree sequence; throws validation_error when the
// input does not form a regular vine.
RVineMatrix trees_to_matrix(const TreeSequence& trees);

// Number of distinct vine structures on n variables; exact through n = 11,
// throws std::overflow_error beyond.
std::uint64_t count_rvines(std::size_t n);

// Every valid matrix on n <= 5 variables (distinct structures appear once per
// admissible diagonal ordering).
std::vector<RVineMatrix> enumerate_rvine_matrices(std::size_t n);

}  // namespace rvine
