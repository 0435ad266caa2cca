#pragma once
// Knowledge-graph data model and dataset ingestion.
//
// File formats (OpenEA convention, UTF-8, tab-separated):
//   rel_triples_* : one triple per line, "head<TAB>relation<TAB>tail"
//   ent_links     : one pair per line,  "source_label<TAB>target_label"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgalign {

struct Triple {
  int head;
  int rel;
  int tail;
  bool operator==(const Triple&) const = default;
};

// Entities and relations carry dense ids assigned in first-seen file order.
// Immutable after construction; safe for concurrent reads.
struct KnowledgeGraph {
  std::vector<std::string> entity_labels;    // id -> label
  std::vector<std::string> relation_labels;  // id -> label
  std::unordered_map<std::string, int> entity_ids;
  std::unordered_map<std::string, int> relation_ids;
  std::vector<Triple> triples;  // deduplicated, file order of first occurrence

  int num_entities() const { return static_cast<int>(entity_labels.size()); }
  int num_relations() const { return static_cast<int>(relation_labels.size()); }
};

enum class AlignmentRole { Seed, Test };

// 1-to-1 pairs (source entity id, target entity id).
struct AlignmentSet {
  std::vector<std::pair<int, int>> pairs;
  AlignmentRole role = AlignmentRole::Seed;

  int size() const { return static_cast<int>(pairs.size()); }
};

KnowledgeGraph load_kg(const std::string& triples_path);
void save_kg(const KnowledgeGraph& kg, const std::string& triples_path);

AlignmentSet load_alignment(const std::string& links_path, const KnowledgeGraph& kg_s,
                            const KnowledgeGraph& kg_t);
void save_alignment(const AlignmentSet& a, const KnowledgeGraph& kg_s,
                    const KnowledgeGraph& kg_t, const std::string& path);

// Builds an AlignmentSet from already-resolved id pairs, enforcing 1-to-1.
AlignmentSet make_alignment(std::vector<std::pair<int, int>> pairs, AlignmentRole role);

// Reproducible seed/test partition: |seed| = round(ratio * |pairs|), the split
// is a function of rng_seed only. ratio must lie in (0,1).
std::pair<AlignmentSet, AlignmentSet> split_seed(const AlignmentSet& alignment, double ratio,
                                                 uint64_t rng_seed);

}  // namespace kgalign
