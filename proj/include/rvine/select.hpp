#pragma once

#include <optional>
#include <vector>

#include "rvine/model.hpp"
#include "rvine/sample.hpp"

namespace rvine {

// Matrix of pairwise Kendall taus (unit diagonal).
std::vector<std::vector<double>> pairwise_tau(const CopulaSample& data);

struct GraphEdge {
  std::size_t i = 0, j = 0;            // node ids in the current graph
  double weight = 0.0;
  std::uint32_t key_a = 0, key_b = 0;  // conditioned pair, breaks weight ties
};

// Indices into `edges` forming a maximum-weight spanning tree (Prim, grown
// from node 0; ties prefer the lexicographically smaller (key_a,key_b), then
// the smaller edge index). Throws when the graph is disconnected.
std::vector<std::size_t> max_spanning_tree(std::size_t n_nodes,
                                           const std::vector<GraphEdge>& edges);

// Star center: node with the largest sum of |tau| to all others (ties toward
// the lowest index).
std::size_t select_cvine_root(const std::vector<std::vector<double>>& tau);

// Node ordering of a path maximizing the sum of |tau| over consecutive pairs,
// grown by best insertion from the strongest pair.
std::vector<std::size_t> select_dvine_path(
    const std::vector<std::vector<double>>& tau);

// Kendall's tau restricted to joint corner exceedances: both coordinates
// <= delta (lower) or > 1-delta (upper). Empty when fewer than 10 points
// land in the corner.
std::optional<double> exceedance_tau(const std::vector<double>& u,
                                     const std::vector<double>& v,
                                     double delta, bool lower);

enum class VineClass { rvine, cvine, dvine };

struct SelectionOptions {
  std::vector<Family> families = all_parametric_families();
  bool use_indep_test = false;
  double alpha = 0.05;
  VineClass vine_class = VineClass::rvine;
};

struct SequentialFit {
  RVineModel model;
  double loglik = 0.0;   // sum of the per-edge fit logliks
  TreeSequence trees;    // selected constraints, one list per tree
};

// Tree-by-tree structure selection with per-edge family choice and
// estimation. Each tree is chosen on |tau| weights computed from propagated
// pseudo-observations; only chosen edges are fitted.
SequentialFit sequential_select(const CopulaSample& data,
                                const SelectionOptions& opts = {});

}  // namespace rvine
