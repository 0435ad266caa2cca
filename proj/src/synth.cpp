#include "kgalign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "kgalign/rng.hpp"

namespace kgalign {

namespace {

constexpr uint64_t kSeedBase = 0xB0;
constexpr uint64_t kSeedSide = 0xB1;  // + side index

struct PairHash {
  size_t operator()(const std::pair<int, int>& p) const {
    return std::hash<uint64_t>()((static_cast<uint64_t>(p.first) << 32) |
                                 static_cast<uint32_t>(p.second));
  }
};

// Barabasi-Albert style growth: every new node attaches `m` edges to existing
// nodes picked proportionally to degree. `endpoints` lists one entry per edge
// endpoint, so a uniform draw from it is a preferential draw.
std::vector<Triple> grow_base_graph(const SyntheticSpec& spec, Rng& rng) {
  const int n = spec.n_entities;
  const int m = std::max(1, static_cast<int>(std::lround(spec.avg_degree / 2.0)));
  std::vector<Triple> triples;
  triples.reserve(static_cast<size_t>(n) * m);
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<size_t>(n) * m * 2);
  std::uniform_int_distribution<int> rel(0, spec.n_relations - 1);
  std::bernoulli_distribution coin(0.5);

  for (int v = 1; v < n; ++v) {
    const int attach = std::min(v, m);
    std::unordered_set<int> picked;
    for (int e = 0; e < attach; ++e) {
      int u = -1;
      // Bounded retries keep the multigraph free of duplicate endpoints for
      // one node's batch; fall back to a uniform pick if the degree
      // distribution is too concentrated.
      for (int tries = 0; tries < 16; ++tries) {
        int cand;
        if (endpoints.empty()) {
          cand = std::uniform_int_distribution<int>(0, v - 1)(rng);
        } else {
          cand = endpoints[std::uniform_int_distribution<size_t>(0, endpoints.size() - 1)(rng)];
        }
        if (cand != v && !picked.count(cand)) {
          u = cand;
          break;
        }
      }
      if (u < 0) {
        for (int cand = 0; cand < v; ++cand)
          if (!picked.count(cand)) {
            u = cand;
            break;
          }
      }
      if (u < 0) continue;
      picked.insert(u);
      const int r = rel(rng);
      if (coin(rng))
        triples.push_back({v, r, u});
      else
        triples.push_back({u, r, v});
      endpoints.push_back(v);
      endpoints.push_back(u);
    }
  }
  return triples;
}

int count_components(int n, const std::vector<Triple>& triples) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int components = n;
  for (const Triple& t : triples) {
    int a = find(t.head), b = find(t.tail);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

KnowledgeGraph make_side(const SyntheticSpec& spec, const std::vector<Triple>& base,
                         const std::string& prefix, const std::vector<int>& perm, Rng& rng) {
  std::bernoulli_distribution drop(spec.edge_dropout);
  std::bernoulli_distribution remap(spec.relation_remap_prob);
  std::uniform_int_distribution<int> rel(0, spec.n_relations - 1);

  std::vector<Triple> kept;
  kept.reserve(base.size());
  for (const Triple& t : base) {
    if (spec.edge_dropout > 0.0 && drop(rng)) continue;
    int r = t.rel;
    if (spec.relation_remap_prob > 0.0 && remap(rng)) r = rel(rng);
    kept.push_back({perm[t.head], r, perm[t.tail]});
  }
  std::shuffle(kept.begin(), kept.end(), rng);

  // Exact duplicates would be collapsed by a save/load round trip; collapse
  // them here so persistence is an identity on the generated graph.
  std::unordered_set<uint64_t> seen;
  std::vector<Triple> unique;
  unique.reserve(kept.size());
  for (const Triple& t : kept) {
    uint64_t key = (static_cast<uint64_t>(t.head) * spec.n_relations + t.rel) *
                       static_cast<uint64_t>(spec.n_entities) +
                   t.tail;
    if (seen.insert(key).second) unique.push_back(t);
  }

  KnowledgeGraph kg;
  kg.entity_labels.reserve(spec.n_entities);
  for (int i = 0; i < spec.n_entities; ++i) {
    kg.entity_labels.push_back(prefix + "e" + std::to_string(i));
    kg.entity_ids[kg.entity_labels.back()] = i;
  }
  for (int r = 0; r < spec.n_relations; ++r) {
    kg.relation_labels.push_back("r" + std::to_string(r));
    kg.relation_ids[kg.relation_labels.back()] = r;
  }
  kg.triples = std::move(unique);
  return kg;
}

}  // namespace

SyntheticBenchmark generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_entities < 10)
    throw std::invalid_argument("generate_synthetic: n_entities must be >= 10");
  if (spec.n_relations < 1)
    throw std::invalid_argument("generate_synthetic: n_relations must be >= 1");
  if (spec.avg_degree < 1.0)
    throw std::invalid_argument("generate_synthetic: avg_degree must be >= 1");
  if (spec.edge_dropout < 0.0 || spec.edge_dropout >= 1.0)
    throw std::invalid_argument("generate_synthetic: edge_dropout must lie in [0,1)");
  if (spec.relation_remap_prob < 0.0 || spec.relation_remap_prob > 1.0)
    throw std::invalid_argument("generate_synthetic: relation_remap_prob must lie in [0,1]");

  Rng base_rng(derive_seed(spec.rng_seed, kSeedBase));
  std::vector<Triple> base = grow_base_graph(spec, base_rng);
  if (int c = count_components(spec.n_entities, base); c > 1)
    std::fprintf(stderr,
                 "generate_synthetic: warning: base graph has %d components; proceeding\n", c);

  SyntheticBenchmark out;
  std::vector<std::vector<int>> perms(2);
  for (int side = 0; side < 2; ++side) {
    Rng rng(derive_seed(spec.rng_seed, kSeedSide + side));
    std::vector<int>& perm = perms[side];
    perm.resize(spec.n_entities);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    KnowledgeGraph kg = make_side(spec, base, side == 0 ? "s/" : "t/", perm, rng);
    (side == 0 ? out.kg_s : out.kg_t) = std::move(kg);
  }

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(spec.n_entities);
  for (int e = 0; e < spec.n_entities; ++e) pairs.emplace_back(perms[0][e], perms[1][e]);
  out.alignment = make_alignment(std::move(pairs), AlignmentRole::Seed);
  return out;
}

}  // namespace kgalign
