#include "kgalign/adjacency.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace kgalign {

WeightedAdjacency build_weighted_adjacency(const KnowledgeGraph& kg) {
  if (kg.triples.empty()) throw std::runtime_error("build_weighted_adjacency: KG has no triples");

  const int n = kg.num_entities();
  const int nr = kg.num_relations();

  std::vector<RelationStats> stats(nr);
  {
    std::vector<std::set<int>> heads(nr), tails(nr);
    for (const auto& t : kg.triples) {
      heads[t.rel].insert(t.head);
      tails[t.rel].insert(t.tail);
      stats[t.rel].triple_count++;
    }
    for (int r = 0; r < nr; ++r) {
      stats[r].distinct_heads = static_cast<int>(heads[r].size());
      stats[r].distinct_tails = static_cast<int>(tails[r].size());
      stats[r].fun = static_cast<double>(stats[r].distinct_heads) / stats[r].triple_count;
      stats[r].ifun = static_cast<double>(stats[r].distinct_tails) / stats[r].triple_count;
    }
  }

  // Accumulate a_uv keyed by (v, u): row v holds in-neighbors of v.
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : kg.triples) {
    acc[{t.tail, t.head}] += stats[t.rel].ifun;  // head influences tail
    acc[{t.head, t.tail}] += stats[t.rel].fun;   // tail influences head
  }
  for (int v = 0; v < n; ++v) acc[{v, v}] += 1.0;  // unit self-loop

  WeightedAdjacency adj;
  adj.n = n;
  adj.rel_stats = std::move(stats);
  adj.indptr.assign(n + 1, 0);
  adj.src.reserve(acc.size());
  adj.weight.reserve(acc.size());
  for (const auto& [key, w] : acc) adj.indptr[key.first + 1]++;
  for (int v = 0; v < n; ++v) adj.indptr[v + 1] += adj.indptr[v];
  for (const auto& [key, w] : acc) {  // std::map iterates (v, u) sorted: CSR order
    adj.src.push_back(key.second);
    adj.weight.push_back(w);
  }
  return adj;
}

}  // namespace kgalign
