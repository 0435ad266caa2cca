#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unistd.h>

#include "kgalign/kg.hpp"

using namespace kgalign;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("kgalign_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("load_kg assigns first-seen ids and counts entities, relations, triples") {
  TempDir td;
  auto p = td.file("t", "a\tr\tb\na\tr\tc\n");
  KnowledgeGraph kg = load_kg(p);
  CHECK(kg.num_entities() == 3);
  CHECK(kg.num_relations() == 1);
  CHECK(kg.triples.size() == 2);
  CHECK(kg.entity_ids.at("a") == 0);
  CHECK(kg.entity_ids.at("b") == 1);
  CHECK(kg.entity_ids.at("c") == 2);
  CHECK(kg.triples[0] == Triple{0, 0, 1});
  CHECK(kg.triples[1] == Triple{0, 0, 2});
}

TEST_CASE("load_kg deduplicates repeated lines") {
  TempDir td;
  auto p = td.file("t", "a\tr\tb\na\tr\tb\n");
  KnowledgeGraph kg = load_kg(p);
  CHECK(kg.triples.size() == 1);
}

TEST_CASE("load_kg keeps self-loop triples as data") {
  TempDir td;
  auto p = td.file("t", "a\tr\ta\nb\tr\ta\n");
  KnowledgeGraph kg = load_kg(p);
  CHECK(kg.triples.size() == 2);
  CHECK(kg.triples[0] == Triple{0, 0, 0});
}

TEST_CASE("load_kg rejects an empty file") {
  TempDir td;
  auto p = td.file("t", "");
  CHECK_THROWS_WITH(load_kg(p), doctest::Contains("no triples"));
}

TEST_CASE("load_kg reports malformed lines with their line number") {
  TempDir td;
  auto p = td.file("t", "a\tr\tb\nbadline\n");
  CHECK_THROWS_WITH(load_kg(p), doctest::Contains(":2"));
}

TEST_CASE("load_kg fails cleanly on a missing file") {
  CHECK_THROWS_WITH(load_kg("/nonexistent/kgalign"), doctest::Contains("cannot open"));
}

TEST_CASE("KG round-trip preserves id maps and triple set") {
  TempDir td;
  auto p = td.file("t", "x\tr1\ty\ny\tr2\tz\nx\tr1\tz\n");
  KnowledgeGraph kg = load_kg(p);
  auto p2 = (td.path / "t2").string();
  save_kg(kg, p2);
  KnowledgeGraph kg2 = load_kg(p2);
  CHECK(kg2.entity_labels == kg.entity_labels);
  CHECK(kg2.relation_labels == kg.relation_labels);
  CHECK(kg2.triples == kg.triples);
}

TEST_CASE("load_alignment resolves labels and returns pairs in file order") {
  TempDir td;
  KnowledgeGraph s = load_kg(td.file("s", "a\tr\tb\nc\tr\tb\n"));
  KnowledgeGraph t = load_kg(td.file("t", "A\tr\tB\nC\tr\tB\n"));
  AlignmentSet al = load_alignment(td.file("l", "a\tA\nb\tB\nc\tC\n"), s, t);
  REQUIRE(al.size() == 3);
  CHECK(al.pairs[0] == std::pair<int, int>(s.entity_ids.at("a"), t.entity_ids.at("A")));
  CHECK(al.pairs[2] == std::pair<int, int>(s.entity_ids.at("c"), t.entity_ids.at("C")));
}

TEST_CASE("load_alignment names the offending unknown label") {
  TempDir td;
  KnowledgeGraph s = load_kg(td.file("s", "a\tr\tb\n"));
  KnowledgeGraph t = load_kg(td.file("t", "A\tr\tB\n"));
  CHECK_THROWS_WITH(load_alignment(td.file("l", "a\tA\nmissing\tB\n"), s, t),
                    doctest::Contains("missing"));
}

TEST_CASE("duplicate source or target entity violates 1-to-1") {
  TempDir td;
  KnowledgeGraph s = load_kg(td.file("s", "a\tr\tb\n"));
  KnowledgeGraph t = load_kg(td.file("t", "A\tr\tB\n"));
  CHECK_THROWS_WITH(load_alignment(td.file("l1", "a\tA\na\tB\n"), s, t),
                    doctest::Contains("1-to-1"));
  CHECK_THROWS_WITH(load_alignment(td.file("l2", "a\tA\nb\tA\n"), s, t),
                    doctest::Contains("1-to-1"));
}

TEST_CASE("alignment round-trip through labels") {
  TempDir td;
  KnowledgeGraph s = load_kg(td.file("s", "a\tr\tb\nc\tr\td\n"));
  KnowledgeGraph t = load_kg(td.file("t", "A\tr\tB\nC\tr\tD\n"));
  AlignmentSet al = load_alignment(td.file("l", "a\tA\nd\tD\n"), s, t);
  auto p = (td.path / "l2").string();
  save_alignment(al, s, t, p);
  AlignmentSet al2 = load_alignment(p, s, t);
  CHECK(al2.pairs == al.pairs);
}

TEST_CASE("split_seed: 10 pairs at ratio 0.3 gives 3 seed and 7 test") {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 10; ++i) pairs.emplace_back(i, i);
  AlignmentSet al = make_alignment(pairs, AlignmentRole::Seed);
  auto [seed, test] = split_seed(al, 0.3, 99);
  CHECK(seed.size() == 3);
  CHECK(test.size() == 7);
  CHECK(seed.role == AlignmentRole::Seed);
  CHECK(test.role == AlignmentRole::Test);
  // Partition: disjoint, union covers everything.
  std::set<std::pair<int, int>> all(seed.pairs.begin(), seed.pairs.end());
  for (auto& pr : test.pairs) CHECK(all.insert(pr).second);
  CHECK(all.size() == 10);
}

TEST_CASE("split_seed is a function of the rng seed only") {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 50; ++i) pairs.emplace_back(i, 100 + i);
  AlignmentSet al = make_alignment(pairs, AlignmentRole::Seed);
  auto [s1, t1] = split_seed(al, 0.3, 7);
  auto [s2, t2] = split_seed(al, 0.3, 7);
  CHECK(s1.pairs == s2.pairs);
  CHECK(t1.pairs == t2.pairs);
  auto [s3, t3] = split_seed(al, 0.3, 8);
  CHECK(s1.pairs != s3.pairs);  // overwhelmingly likely for 50 pairs
}

TEST_CASE("split_seed rejects out-of-range ratios and empty input") {
  AlignmentSet al = make_alignment({{0, 0}}, AlignmentRole::Seed);
  CHECK_THROWS_WITH(split_seed(al, 1.0, 1), doctest::Contains("ratio"));
  CHECK_THROWS_WITH(split_seed(al, 0.0, 1), doctest::Contains("ratio"));
  AlignmentSet empty;
  CHECK_THROWS_WITH(split_seed(empty, 0.3, 1), doctest::Contains("empty"));
}

TEST_CASE("make_alignment enforces 1-to-1 on resolved ids") {
  CHECK_THROWS_WITH(make_alignment({{0, 0}, {0, 1}}, AlignmentRole::Seed),
                    doctest::Contains("1-to-1"));
  CHECK_THROWS_WITH(make_alignment({{0, 0}, {1, 0}}, AlignmentRole::Seed),
                    doctest::Contains("1-to-1"));
}
