#include "kgalign/kg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "kgalign/rng.hpp"

namespace kgalign {

namespace {

int intern(const std::string& label, std::unordered_map<std::string, int>& ids,
           std::vector<std::string>& labels) {
  auto [it, inserted] = ids.try_emplace(label, static_cast<int>(labels.size()));
  if (inserted) labels.push_back(label);
  return it->second;
}

// Splits a line into exactly `n` tab-separated fields; empty return = malformed.
std::vector<std::string> split_fields(const std::string& line, size_t n) {
  std::vector<std::string> out;
  size_t start = 0;
  while (out.size() < n) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (out.size() != n) return {};
  for (const auto& f : out)
    if (f.empty()) return {};
  // Reject extra fields.
  if (n > 0 && out.back().find('\t') != std::string::npos) return {};
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

KnowledgeGraph load_kg(const std::string& triples_path) {
  std::ifstream in(triples_path);
  if (!in) throw std::runtime_error("cannot open triples file: " + triples_path);

  KnowledgeGraph kg;
  std::set<std::tuple<int, int, int>> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_fields(line, 3);
    if (f.empty())
      throw std::runtime_error(triples_path + ":" + std::to_string(lineno) +
                               ": malformed triple line (expected head<TAB>relation<TAB>tail)");
    int h = intern(f[0], kg.entity_ids, kg.entity_labels);
    int r = intern(f[1], kg.relation_ids, kg.relation_labels);
    int t = intern(f[2], kg.entity_ids, kg.entity_labels);
    if (seen.emplace(h, r, t).second) kg.triples.push_back({h, r, t});
  }
  if (kg.triples.empty()) throw std::runtime_error(triples_path + ": no triples");
  return kg;
}

void save_kg(const KnowledgeGraph& kg, const std::string& triples_path) {
  std::ofstream out(triples_path);
  if (!out) throw std::runtime_error("cannot write triples file: " + triples_path);
  for (const auto& t : kg.triples)
    out << kg.entity_labels[t.head] << '\t' << kg.relation_labels[t.rel] << '\t'
        << kg.entity_labels[t.tail] << '\n';
}

AlignmentSet make_alignment(std::vector<std::pair<int, int>> pairs, AlignmentRole role) {
  std::vector<char> src_seen, tgt_seen;
  for (const auto& [s, t] : pairs) {
    if (s >= static_cast<int>(src_seen.size())) src_seen.resize(s + 1, 0);
    if (t >= static_cast<int>(tgt_seen.size())) tgt_seen.resize(t + 1, 0);
    if (src_seen[s]++)
      throw std::runtime_error("alignment violates 1-to-1: source id " + std::to_string(s) +
                               " appears twice");
    if (tgt_seen[t]++)
      throw std::runtime_error("alignment violates 1-to-1: target id " + std::to_string(t) +
                               " appears twice");
  }
  AlignmentSet a;
  a.pairs = std::move(pairs);
  a.role = role;
  return a;
}

AlignmentSet load_alignment(const std::string& links_path, const KnowledgeGraph& kg_s,
                            const KnowledgeGraph& kg_t) {
  std::ifstream in(links_path);
  if (!in) throw std::runtime_error("cannot open links file: " + links_path);

  std::vector<std::pair<int, int>> pairs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split_fields(line, 2);
    if (f.empty())
      throw std::runtime_error(links_path + ":" + std::to_string(lineno) +
                               ": malformed link line (expected src<TAB>tgt)");
    auto si = kg_s.entity_ids.find(f[0]);
    if (si == kg_s.entity_ids.end())
      throw std::runtime_error(links_path + ":" + std::to_string(lineno) +
                               ": unknown source entity \"" + f[0] + "\"");
    auto ti = kg_t.entity_ids.find(f[1]);
    if (ti == kg_t.entity_ids.end())
      throw std::runtime_error(links_path + ":" + std::to_string(lineno) +
                               ": unknown target entity \"" + f[1] + "\"");
    pairs.emplace_back(si->second, ti->second);
  }
  return make_alignment(std::move(pairs), AlignmentRole::Seed);
}

void save_alignment(const AlignmentSet& a, const KnowledgeGraph& kg_s,
                    const KnowledgeGraph& kg_t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write links file: " + path);
  for (const auto& [s, t] : a.pairs)
    out << kg_s.entity_labels[s] << '\t' << kg_t.entity_labels[t] << '\n';
}

std::pair<AlignmentSet, AlignmentSet> split_seed(const AlignmentSet& alignment, double ratio,
                                                 uint64_t rng_seed) {
  if (alignment.pairs.empty()) throw std::runtime_error("split_seed: empty alignment");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::runtime_error("split_seed: ratio must lie in (0,1)");

  std::vector<int> order(alignment.pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto n_seed = static_cast<size_t>(std::lround(ratio * alignment.size()));
  AlignmentSet seed, test;
  seed.role = AlignmentRole::Seed;
  test.role = AlignmentRole::Test;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_seed ? seed : test).pairs.push_back(alignment.pairs[order[i]]);
  return {std::move(seed), std::move(test)};
}

}  // namespace kgalign
