#include "rvine/select.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>

#include "rvine/bicop.hpp"
#include "rvine/stats.hpp"

namespace rvine {

std::vector<std::vector<double>> pairwise_tau(const CopulaSample& data) {
  check_sample(data, 2);
  const std::size_t n = data.n_cols();
  std::vector<std::vector<double>> tau(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      tau[i][j] = tau[j][i] = kendall_tau(data.col[i], data.col[j]);
  return tau;
}

std::vector<std::size_t> max_spanning_tree(
    std::size_t n_nodes, const std::vector<GraphEdge>& edges) {
  if (n_nodes == 0) throw validation_error("spanning tree needs nodes");
  std::vector<char> in_tree(n_nodes, 0);
  in_tree[0] = 1;
  std::vector<std::size_t> chosen;
  chosen.reserve(n_nodes - 1);
  for (std::size_t step = 0; step + 1 < n_nodes; ++step) {
    std::size_t best = edges.size();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const GraphEdge& g = edges[e];
      if (g.i >= n_nodes || g.j >= n_nodes)
        throw validation_error("edge endpoint outside the node range");
      if (in_tree[g.i] == in_tree[g.j]) continue;  // crossing edges only
      if (best == edges.size()) {
        best = e;
        continue;
      }
      const GraphEdge& b = edges[best];
      if (g.weight > b.weight ||
          (g.weight == b.weight &&
           std::make_pair(g.key_a, g.key_b) <
               std::make_pair(b.key_a, b.key_b)))
        best = e;
    }
    if (best == edges.size())
      throw validation_error("graph is disconnected");
    chosen.push_back(best);
    in_tree[edges[best].i] = in_tree[edges[best].j] = 1;
  }
  return chosen;
}

std::size_t select_cvine_root(const std::vector<std::vector<double>>& tau) {
  const std::size_t n = tau.size();
  if (n == 0) throw validation_error("empty tau matrix");
  std::size_t root = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += std::fabs(tau[i][j]);
    if (s > best) {
      best = s;
      root = i;
    }
  }
  return root;
}

std::vector<std::size_t> select_dvine_path(
    const std::vector<std::vector<double>>& tau) {
  const std::size_t n = tau.size();
  if (n == 0) throw validation_error("empty tau matrix");
  if (n == 1) return {0};

  std::vector<std::size_t> path;
  std::vector<char> placed(n, 0);
  {
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::fabs(tau[i][j]) > std::fabs(tau[bi][bj])) {
          bi = i;
          bj = j;
        }
    path = {bi, bj};
    placed[bi] = placed[bj] = 1;
  }

  while (path.size() < n) {
    double best_gain = -1e300;
    std::size_t best_v = 0, best_pos = 0;  // pos p: insert before path[p]
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v]) continue;
      for (std::size_t p = 0; p <= path.size(); ++p) {
        double gain;
        if (p == 0)
          gain = std::fabs(tau[v][path.front()]);
        else if (p == path.size())
          gain = std::fabs(tau[path.back()][v]);
        else
          gain = std::fabs(tau[path[p - 1]][v]) + std::fabs(tau[v][path[p]]) -
                 std::fabs(tau[path[p - 1]][path[p]]);
        if (gain > best_gain) {
          best_gain = gain;
          best_v = v;
          best_pos = p;
        }
      }
    }
    path.insert(path.begin() + static_cast<std::ptrdiff_t>(best_pos), best_v);
    placed[best_v] = 1;
  }
  return path;
}

std::optional<double> exceedance_tau(const std::vector<double>& u,
                                     const std::vector<double>& v,
                                     double delta, bool lower) {
  if (u.size() != v.size())
    throw validation_error("exceedance_tau: column length mismatch");
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("exceedance_tau: delta outside (0,1)");
  std::vector<double> su, sv;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const bool in_corner = lower ? (u[i] <= delta && v[i] <= delta)
                                 : (u[i] > 1.0 - delta && v[i] > 1.0 - delta);
    if (in_corner) {
      su.push_back(u[i]);
      sv.push_back(v[i]);
    }
  }
  if (su.size() < 10) return std::nullopt;
  return kendall_tau(su, sv);
}

namespace {

struct SelEdge {
  std::uint32_t a = 0, b = 0;      // conditioned labels, a < b
  std::uint64_t cond = 0, uni = 0;
  std::size_t end1 = 0, end2 = 0;  // node ids within the previous tree
  PairFit fit;
  double tau = 0.0;
  std::vector<double> Fa, Fb;      // pseudo-obs of a and b given uni minus self
};

void attach_pseudo_obs(SelEdge& e, const std::vector<double>& za,
                       const std::vector<double>& zb) {
  const std::size_t n = za.size();
  e.Fa.resize(n);
  e.Fb.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.Fa[i] = hfunc(e.fit.copula, za[i], zb[i]);
    e.Fb[i] = hfunc1(e.fit.copula, za[i], zb[i]);
  }
}

const std::vector<double>& pseudo_obs_for(const SelEdge& e,
                                          std::uint32_t label) {
  if (label == e.a) return e.Fa;
  if (label == e.b) return e.Fb;
  throw numerical_error("internal: pseudo-observations unavailable for label " +
                        std::to_string(label));
}

struct Candidate {
  std::size_t p = 0, q = 0;  // previous-tree edge indices
  std::uint32_t a = 0, b = 0;
  std::uint64_t cond = 0;
  const std::vector<double>* za = nullptr;
  const std::vector<double>* zb = nullptr;
  double tau = 0.0;
};

}  // namespace

SequentialFit sequential_select(const CopulaSample& data,
                                const SelectionOptions& opts) {
  check_sample(data, 10);
  const std::size_t n = data.n_cols();
  if (n < 2) throw validation_error("selection needs at least two variables");
  if (n > 64)
    throw validation_error("dimension exceeds the supported maximum of 64");
  if (opts.families.empty())
    throw validation_error("selection needs at least one candidate family");

  auto fit_edge = [&](const PairSample& ps) {
    return select_family(ps, opts.families, opts.use_indep_test, opts.alpha);
  };

  TreeSequence trees;
  std::vector<SelEdge> prev;
  double total_ll = 0.0;
  // fitted copula per constraint; first argument belongs to the smaller label
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>, PairCopula>
      fitted;

  {  // first tree: nodes are the variables themselves
    const auto tau = pairwise_tau(data);
    std::vector<std::pair<std::size_t, std::size_t>> picked;
    switch (opts.vine_class) {
      case VineClass::rvine: {
        std::vector<GraphEdge> ges;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            ges.push_back({i, j, std::fabs(tau[i][j]),
                           static_cast<std::uint32_t>(i + 1),
                           static_cast<std::uint32_t>(j + 1)});
        for (std::size_t e : max_spanning_tree(n, ges))
          picked.emplace_back(ges[e].i, ges[e].j);
        break;
      }
      case VineClass::cvine: {
        const std::size_t root = select_cvine_root(tau);
        for (std::size_t j = 0; j < n; ++j)
          if (j != root) picked.emplace_back(std::min(root, j),
                                             std::max(root, j));
        break;
      }
      case VineClass::dvine: {
        const auto path = select_dvine_path(tau);
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
          picked.emplace_back(std::min(path[k], path[k + 1]),
                              std::max(path[k], path[k + 1]));
        break;
      }
    }

    std::vector<ConstraintEntry> entries;
    for (const auto& [i, j] : picked) {
      SelEdge e;
      e.a = static_cast<std::uint32_t>(i + 1);
      e.b = static_cast<std::uint32_t>(j + 1);
      e.cond = 0;
      e.uni = label_bit(e.a) | label_bit(e.b);
      e.end1 = i;
      e.end2 = j;
      e.tau = tau[i][j];
      PairSample ps{data.col[i], data.col[j]};
      e.fit = fit_edge(ps);
      attach_pseudo_obs(e, data.col[i], data.col[j]);
      total_ll += e.fit.loglik;
      entries.push_back({e.a, e.b, e.cond});
      fitted[{e.a, e.b, e.cond}] = e.fit.copula;
      prev.push_back(std::move(e));
    }
    trees.push_back(std::move(entries));
  }

  for (std::size_t t = 2; t < n; ++t) {
    const std::size_t m = prev.size();  // = n - t + 1 nodes
    std::vector<Candidate> cands;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        const int shared = (prev[p].end1 == prev[q].end1) +
                           (prev[p].end1 == prev[q].end2) +
                           (prev[p].end2 == prev[q].end1) +
                           (prev[p].end2 == prev[q].end2);
        if (shared != 1) continue;
        const std::uint64_t sym = prev[p].uni ^ prev[q].uni;
        if (std::popcount(sym) != 2)
          throw numerical_error("internal: proximity pair with bad overlap");
        Candidate cd;
        cd.p = p;
        cd.q = q;
        const auto low = static_cast<std::uint32_t>(std::countr_zero(sym)) + 1;
        const auto high =
            static_cast<std::uint32_t>(63 - std::countl_zero(sym)) + 1;
        cd.a = low;
        cd.b = high;
        cd.cond = prev[p].uni & prev[q].uni;
        const SelEdge& side_a =
            (prev[p].uni & label_bit(cd.a)) ? prev[p] : prev[q];
        const SelEdge& side_b =
            (prev[p].uni & label_bit(cd.b)) ? prev[p] : prev[q];
        cd.za = &pseudo_obs_for(side_a, cd.a);
        cd.zb = &pseudo_obs_for(side_b, cd.b);
        cd.tau = kendall_tau(*cd.za, *cd.zb);
        cands.push_back(cd);
      }

    std::vector<std::size_t> selected;
    switch (opts.vine_class) {
      case VineClass::rvine: {
        std::vector<GraphEdge> ges;
        ges.reserve(cands.size());
        for (const Candidate& cd : cands)
          ges.push_back({cd.p, cd.q, std::fabs(cd.tau), cd.a, cd.b});
        selected = max_spanning_tree(m, ges);
        break;
      }
      case VineClass::cvine: {
        std::vector<std::vector<double>> tm(m, std::vector<double>(m, 1.0));
        for (const Candidate& cd : cands)
          tm[cd.p][cd.q] = tm[cd.q][cd.p] = cd.tau;
        const std::size_t root = select_cvine_root(tm);
        for (std::size_t e = 0; e < cands.size(); ++e)
          if (cands[e].p == root || cands[e].q == root) selected.push_back(e);
        if (selected.size() != m - 1)
          throw numerical_error("internal: star tree has a bad edge count");
        break;
      }
      case VineClass::dvine: {
        if (cands.size() != m - 1)
          throw numerical_error("internal: path tree has a bad edge count");
        for (std::size_t e = 0; e < cands.size(); ++e) selected.push_back(e);
        break;
      }
    }

    std::vector<SelEdge> next;
    std::vector<ConstraintEntry> entries;
    for (std::size_t e : selected) {
      const Candidate& cd = cands[e];
      SelEdge ne;
      ne.a = cd.a;
      ne.b = cd.b;
      ne.cond = cd.cond;
      ne.uni = cd.cond | label_bit(cd.a) | label_bit(cd.b);
      ne.end1 = cd.p;
      ne.end2 = cd.q;
      ne.tau = cd.tau;
      PairSample ps{*cd.za, *cd.zb};
      ne.fit = fit_edge(ps);
      attach_pseudo_obs(ne, *cd.za, *cd.zb);
      total_ll += ne.fit.loglik;
      entries.push_back({ne.a, ne.b, ne.cond});
      fitted[{ne.a, ne.b, ne.cond}] = ne.fit.copula;
      next.push_back(std::move(ne));
    }
    trees.push_back(std::move(entries));
    prev = std::move(next);
  }

  SequentialFit out;
  out.trees = trees;
  out.loglik = total_ll;
  out.model = RVineModel(trees_to_matrix(trees));

  const RVineMatrix& M = out.model.structure;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    std::uint64_t below = 0;
    for (std::size_t r = n; r-- > c + 1;) {
      const std::uint32_t da = M(c, c), db = M(r, c);
      const auto it = fitted.find(
          {std::min(da, db), std::max(da, db), below});
      if (it == fitted.end())
        throw numerical_error("internal: selected edge missing from lookup");
      // the cell's first argument must belong to the diagonal label
      out.model.cell(r, c) =
          (da == std::min(da, db)) ? it->second : swap_args(it->second);
      below |= label_bit(db);
    }
  }
  return out;
}

}  // namespace rvine
