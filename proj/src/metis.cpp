#include "kgalign/metis.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace kgalign {

namespace {

// Undirected weighted graph in CSR form, the partitioner's working view.
struct UGraph {
  int n = 0;
  std::vector<int> indptr, adj;
  std::vector<double> ew;
  std::vector<double> vw;
  double total_vw = 0.0;
};

UGraph symmetrize(const WeightedAdjacency& a, const std::vector<double>* vertex_weights) {
  std::map<std::pair<int, int>, double> acc;
  for (int v = 0; v < a.n; ++v) {
    auto row = a.row(v);
    for (int e = 0; e < row.len; ++e) {
      const int u = row.src[e];
      if (u == v) continue;  // self-loops carry no cut information
      acc[{std::min(u, v), std::max(u, v)}] += row.weight[e];
    }
  }
  UGraph g;
  g.n = a.n;
  std::vector<std::vector<std::pair<int, double>>> rows(a.n);
  for (const auto& [key, w] : acc) {
    rows[key.first].emplace_back(key.second, w);
    rows[key.second].emplace_back(key.first, w);
  }
  g.indptr.assign(a.n + 1, 0);
  for (int v = 0; v < a.n; ++v) g.indptr[v + 1] = g.indptr[v] + static_cast<int>(rows[v].size());
  g.adj.reserve(g.indptr[a.n]);
  g.ew.reserve(g.indptr[a.n]);
  for (int v = 0; v < a.n; ++v)
    for (auto& [u, w] : rows[v]) {
      g.adj.push_back(u);
      g.ew.push_back(w);
    }
  g.vw.assign(a.n, 1.0);
  if (vertex_weights) {
    if (static_cast<int>(vertex_weights->size()) != a.n)
      throw std::invalid_argument("metis_partition: vertex_weights size mismatch");
    g.vw = *vertex_weights;
  }
  g.total_vw = std::accumulate(g.vw.begin(), g.vw.end(), 0.0);
  return g;
}

// Heavy-edge matching: each unmatched vertex (ascending id) pairs with its
// unmatched neighbor of maximum edge weight. Returns the fine-to-coarse map
// and the contracted graph.
std::pair<UGraph, std::vector<int>> coarsen(const UGraph& g) {
  std::vector<int> match(g.n, -1);
  for (int v = 0; v < g.n; ++v) {
    if (match[v] >= 0) continue;
    int best = -1;
    double best_w = -1.0;
    for (int e = g.indptr[v]; e < g.indptr[v + 1]; ++e) {
      const int u = g.adj[e];
      if (match[u] >= 0 || u == v) continue;
      if (g.ew[e] > best_w) {
        best_w = g.ew[e];
        best = u;
      }
    }
    if (best >= 0) {
      match[v] = best;
      match[best] = v;
    } else {
      match[v] = v;
    }
  }
  std::vector<int> cmap(g.n, -1);
  int nc = 0;
  for (int v = 0; v < g.n; ++v) {
    if (cmap[v] >= 0) continue;
    cmap[v] = nc;
    cmap[match[v]] = nc;
    ++nc;
  }

  UGraph c;
  c.n = nc;
  c.vw.assign(nc, 0.0);
  for (int v = 0; v < g.n; ++v) c.vw[cmap[v]] += g.vw[v];
  c.total_vw = g.total_vw;
  std::map<std::pair<int, int>, double> acc;
  for (int v = 0; v < g.n; ++v)
    for (int e = g.indptr[v]; e < g.indptr[v + 1]; ++e) {
      const int u = g.adj[e];
      if (v >= u) continue;  // undirected edge appears twice in CSR
      const int cv = cmap[v], cu = cmap[u];
      if (cv == cu) continue;
      acc[{std::min(cv, cu), std::max(cv, cu)}] += g.ew[e];
    }
  std::vector<std::vector<std::pair<int, double>>> rows(nc);
  for (const auto& [key, w] : acc) {
    rows[key.first].emplace_back(key.second, w);
    rows[key.second].emplace_back(key.first, w);
  }
  c.indptr.assign(nc + 1, 0);
  for (int v = 0; v < nc; ++v) c.indptr[v + 1] = c.indptr[v] + static_cast<int>(rows[v].size());
  for (int v = 0; v < nc; ++v)
    for (auto& [u, w] : rows[v]) {
      c.adj.push_back(u);
      c.ew.push_back(w);
    }
  return {std::move(c), std::move(cmap)};
}

std::vector<std::vector<int>> components_of(const UGraph& g) {
  std::vector<int> comp(g.n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::queue<int> q;
    q.push(s);
    comp[s] = id;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      out[id].push_back(v);
      for (int e = g.indptr[v]; e < g.indptr[v + 1]; ++e)
        if (comp[g.adj[e]] < 0) {
          comp[g.adj[e]] = id;
          q.push(g.adj[e]);
        }
    }
  }
  return out;  // BFS order within each component, components by smallest seed id
}

int lightest_part(const std::vector<double>& part_w) {
  int best = 0;
  for (int p = 1; p < static_cast<int>(part_w.size()); ++p)
    if (part_w[p] < part_w[best]) best = p;
  return best;
}

// Whole components go to the lightest part when they fit under the balance
// cap; oversized components are streamed in BFS order, rolling to the next
// lightest part whenever the current one reaches the ideal target.
std::vector<int> initial_partition(const UGraph& g, int K, double max_target) {
  std::vector<int> labels(g.n, 0);
  if (K == 1) return labels;
  std::vector<std::vector<int>> comps = components_of(g);
  std::vector<double> comp_w(comps.size(), 0.0);
  for (size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_w[c] += g.vw[v];
  std::vector<int> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return comp_w[a] > comp_w[b]; });

  const double target = g.total_vw / K;
  std::vector<double> part_w(K, 0.0);
  for (int c : order) {
    int p = lightest_part(part_w);
    if (part_w[p] + comp_w[c] <= max_target) {
      for (int v : comps[c]) labels[v] = p;
      part_w[p] += comp_w[c];
      continue;
    }
    for (int v : comps[c]) {
      if (part_w[p] >= target) p = lightest_part(part_w);
      labels[v] = p;
      part_w[p] += g.vw[v];
    }
  }
  return labels;
}

// Boundary Kernighan-Lin-style passes: move a vertex to the neighboring part
// with the best cut gain when the move respects the balance cap; zero-gain
// moves are taken only when they strictly improve balance. Overloaded parts
// may shed vertices at negative gain.
void refine(const UGraph& g, std::vector<int>& labels, int K, double max_target) {
  if (K == 1 || g.n == 0) return;
  std::vector<double> part_w(K, 0.0);
  std::vector<int> part_n(K, 0);
  for (int v = 0; v < g.n; ++v) {
    part_w[labels[v]] += g.vw[v];
    ++part_n[labels[v]];
  }
  std::vector<double> conn(K, 0.0);
  std::vector<int> touched;

  for (int pass = 0; pass < 8; ++pass) {
    bool moved = false;
    for (int v = 0; v < g.n; ++v) {
      const int c = labels[v];
      if (part_n[c] <= 1) continue;  // never empty a part
      touched.clear();
      bool boundary = false;
      for (int e = g.indptr[v]; e < g.indptr[v + 1]; ++e) {
        const int p = labels[g.adj[e]];
        if (conn[p] == 0.0) touched.push_back(p);
        conn[p] += g.ew[e];
        if (p != c) boundary = true;
      }
      const bool overloaded = part_w[c] > max_target;
      if (boundary || overloaded) {
        int best = -1;
        double best_gain = 0.0;
        for (int p : touched) {
          if (p == c) continue;
          if (part_w[p] + g.vw[v] > max_target) continue;
          const double gain = conn[p] - conn[c];
          const bool acceptable =
              gain > 0.0 || overloaded || (gain == 0.0 && part_w[c] > part_w[p] + g.vw[v]);
          if (!acceptable) continue;
          if (best < 0 || gain > best_gain ||
              (gain == best_gain && part_w[p] < part_w[best])) {
            best = p;
            best_gain = gain;
          }
        }
        if (best >= 0) {
          part_w[c] -= g.vw[v];
          --part_n[c];
          part_w[best] += g.vw[v];
          ++part_n[best];
          labels[v] = best;
          moved = true;
        }
      }
      for (int p : touched) conn[p] = 0.0;
    }
    if (!moved) break;
  }
}

}  // namespace

std::vector<int> metis_partition(const WeightedAdjacency& adj, int K,
                                 const std::vector<double>* vertex_weights,
                                 double balance_factor) {
  if (K < 1) throw std::invalid_argument("metis_partition: K must be >= 1");
  if (adj.n == 0) return {};
  if (K == 1) return std::vector<int>(adj.n, 0);
  if (K >= adj.n) {
    std::vector<int> labels(adj.n);
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
  }

  UGraph g = symmetrize(adj, vertex_weights);
  const double max_target = balance_factor * g.total_vw / K;

  // Coarsening phase.
  std::vector<UGraph> levels;
  std::vector<std::vector<int>> maps;
  levels.push_back(std::move(g));
  const int coarse_enough = std::max(100, 8 * K);
  while (levels.back().n > coarse_enough) {
    auto [coarse, cmap] = coarsen(levels.back());
    if (coarse.n >= levels.back().n) break;  // matching stalled
    levels.push_back(std::move(coarse));
    maps.push_back(std::move(cmap));
  }

  // Initial partition at the coarsest level, then project and refine upward.
  std::vector<int> labels = initial_partition(levels.back(), K, max_target);
  refine(levels.back(), labels, K, max_target);
  for (int lvl = static_cast<int>(maps.size()) - 1; lvl >= 0; --lvl) {
    std::vector<int> fine(levels[lvl].n);
    for (int v = 0; v < levels[lvl].n; ++v) fine[v] = labels[maps[lvl][v]];
    labels = std::move(fine);
    refine(levels[lvl], labels, K, max_target);
  }
  return labels;
}

double partition_edge_cut(const WeightedAdjacency& adj, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != adj.n)
    throw std::invalid_argument("partition_edge_cut: labels size mismatch");
  double cut = 0.0;
  for (int v = 0; v < adj.n; ++v) {
    auto row = adj.row(v);
    for (int e = 0; e < row.len; ++e) {
      const int u = row.src[e];
      if (u == v) continue;
      if (labels[u] != labels[v]) cut += row.weight[e];
    }
  }
  return cut;  // each undirected edge's symmetrized weight counted once total
}

}  // namespace kgalign
