#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "kgalign/adjacency.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/rng.hpp"

using namespace kgalign;

namespace {

KnowledgeGraph kg_from(std::vector<Triple> triples, int n_entities, int n_relations) {
  KnowledgeGraph kg;
  for (int i = 0; i < n_entities; ++i) {
    kg.entity_labels.push_back("e" + std::to_string(i));
    kg.entity_ids[kg.entity_labels.back()] = i;
  }
  for (int i = 0; i < n_relations; ++i) {
    kg.relation_labels.push_back("r" + std::to_string(i));
    kg.relation_ids[kg.relation_labels.back()] = i;
  }
  kg.triples = std::move(triples);
  return kg;
}

// Matrix entry a_ij: the weight with which entity i influences entity j.
// Stored in row j of the in-edge CSR.
double entry(const WeightedAdjacency& adj, int i, int j) {
  auto row = adj.row(j);
  for (int e = 0; e < row.len; ++e)
    if (row.src[e] == i) return row.weight[e];
  return 0.0;
}

}  // namespace

TEST_CASE("two triples sharing a head: fun and ifun drive asymmetric weights") {
  // {(a,r,b),(a,r,c)}: fun(r) = 1/2, ifun(r) = 1.
  KnowledgeGraph kg = kg_from({{0, 0, 1}, {0, 0, 2}}, 3, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  CHECK(adj.rel_stats[0].fun == doctest::Approx(0.5));
  CHECK(adj.rel_stats[0].ifun == doctest::Approx(1.0));
  CHECK(entry(adj, 0, 1) == doctest::Approx(1.0));  // a -> b carries ifun
  CHECK(entry(adj, 1, 0) == doctest::Approx(0.5));  // b -> a carries fun
  CHECK(entry(adj, 0, 2) == doctest::Approx(1.0));
  CHECK(entry(adj, 2, 0) == doctest::Approx(0.5));
  CHECK(entry(adj, 1, 2) == 0.0);
}

TEST_CASE("single triple gives symmetric unit weights") {
  KnowledgeGraph kg = kg_from({{0, 0, 1}}, 2, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  CHECK(adj.rel_stats[0].fun == doctest::Approx(1.0));
  CHECK(adj.rel_stats[0].ifun == doctest::Approx(1.0));
  CHECK(entry(adj, 0, 1) == doctest::Approx(1.0));
  CHECK(entry(adj, 1, 0) == doctest::Approx(1.0));
}

TEST_CASE("every entity receives a unit self-loop") {
  KnowledgeGraph kg = kg_from({{0, 0, 1}}, 3, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  for (int v = 0; v < 3; ++v) CHECK(entry(adj, v, v) == doctest::Approx(1.0));
}

TEST_CASE("entity untouched by any triple has only its self-loop") {
  KnowledgeGraph kg = kg_from({{0, 0, 1}}, 3, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  auto row = adj.row(2);
  REQUIRE(row.len == 1);
  CHECK(row.src[0] == 2);
  CHECK(row.weight[0] == doctest::Approx(1.0));
  CHECK(adj.degree(2) == 0);
}

TEST_CASE("self-loop triple stacks fun + ifun on top of the unit loop") {
  KnowledgeGraph kg = kg_from({{0, 0, 0}}, 1, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  CHECK(entry(adj, 0, 0) == doctest::Approx(1.0 + 1.0 + 1.0));
}

TEST_CASE("parallel relations between the same pair accumulate") {
  // r0: (a,r0,b); r1: (a,r1,b). Both have fun = ifun = 1.
  KnowledgeGraph kg = kg_from({{0, 0, 1}, {0, 1, 1}}, 2, 2);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  CHECK(entry(adj, 0, 1) == doctest::Approx(2.0));
  CHECK(entry(adj, 1, 0) == doctest::Approx(2.0));
}

TEST_CASE("empty KG is rejected") {
  KnowledgeGraph kg = kg_from({}, 2, 1);
  CHECK_THROWS_WITH(build_weighted_adjacency(kg), doctest::Contains("no triples"));
}

TEST_CASE("fun * triple_count recovers the distinct-head count exactly") {
  Rng rng(5);
  std::uniform_int_distribution<int> ent(0, 39), rel(0, 4);
  std::set<Triple, decltype([](const Triple& a, const Triple& b) {
             return std::tie(a.head, a.rel, a.tail) < std::tie(b.head, b.rel, b.tail);
           })>
      seen;
  std::vector<Triple> triples;
  for (int i = 0; i < 200; ++i) {
    Triple t{ent(rng), rel(rng), ent(rng)};
    if (seen.insert(t).second) triples.push_back(t);
  }
  KnowledgeGraph kg = kg_from(triples, 40, 5);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  for (const auto& st : adj.rel_stats) {
    if (st.triple_count == 0) continue;
    CHECK(std::lround(st.fun * st.triple_count) == st.distinct_heads);
    CHECK(std::abs(st.fun * st.triple_count - st.distinct_heads) < 1e-9);
    CHECK(std::lround(st.ifun * st.triple_count) == st.distinct_tails);
    CHECK(st.fun > 0.0);
    CHECK(st.fun <= 1.0);
    CHECK(st.ifun > 0.0);
    CHECK(st.ifun <= 1.0);
  }
}

TEST_CASE("sparsity pattern equals the undirected support of the triple set") {
  Rng rng(9);
  std::uniform_int_distribution<int> ent(0, 19), rel(0, 2);
  std::vector<Triple> triples;
  for (int i = 0; i < 60; ++i) triples.push_back({ent(rng), rel(rng), ent(rng)});
  std::set<Triple, decltype([](const Triple& a, const Triple& b) {
             return std::tie(a.head, a.rel, a.tail) < std::tie(b.head, b.rel, b.tail);
           })>
      dedup(triples.begin(), triples.end());
  KnowledgeGraph kg = kg_from({dedup.begin(), dedup.end()}, 20, 3);
  WeightedAdjacency adj = build_weighted_adjacency(kg);

  std::set<std::pair<int, int>> support;  // undirected, no diagonal
  for (const auto& t : kg.triples)
    if (t.head != t.tail) {
      support.insert({t.head, t.tail});
      support.insert({t.tail, t.head});
    }
  std::set<std::pair<int, int>> pattern;
  for (int v = 0; v < adj.n; ++v) {
    auto row = adj.row(v);
    for (int e = 0; e < row.len; ++e) {
      CHECK(row.weight[e] > 0.0);
      if (row.src[e] != v) pattern.insert({row.src[e], v});
    }
  }
  CHECK(pattern == support);
}

TEST_CASE("weights are non-negative and rows are sorted by neighbor id") {
  KnowledgeGraph kg = kg_from({{0, 0, 1}, {2, 0, 1}, {1, 0, 2}, {3, 0, 1}}, 4, 1);
  WeightedAdjacency adj = build_weighted_adjacency(kg);
  REQUIRE(static_cast<int>(adj.indptr.size()) == adj.n + 1);
  for (int v = 0; v < adj.n; ++v) {
    auto row = adj.row(v);
    for (int e = 0; e + 1 < row.len; ++e) CHECK(row.src[e] < row.src[e + 1]);
  }
}
