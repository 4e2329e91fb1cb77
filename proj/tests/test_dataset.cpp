#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sectore/dataset.hpp"
#include "sectore/synthetic.hpp"

using namespace sectore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sectore_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::tuple<int, int, int>> as_set(const std::vector<Triple>& v) {
  std::set<std::tuple<int, int, int>> s;
  for (const Triple& t : v) s.insert({t.head, t.relation, t.tail});
  return s;
}

}  // namespace

TEST_CASE("load_triples basics") {
  TempDir tmp;
  SUBCASE("empty file gives empty list and vocabulary") {
    write_file(tmp.path / "t.txt", "");
    Vocabulary vocab;
    auto triples = load_triples((tmp.path / "t.txt").string(), vocab, false);
    CHECK(triples.empty());
    CHECK(vocab.n_entities() == 0);
    CHECK(vocab.n_relations() == 0);
  }
  SUBCASE("ids assigned by first appearance") {
    write_file(tmp.path / "t.txt", "a\tlikes\tb\nb\tlikes\tc\na\tknows\tc\n");
    Vocabulary vocab;
    auto triples = load_triples((tmp.path / "t.txt").string(), vocab, false);
    REQUIRE(triples.size() == 3);
    CHECK(triples[0] == Triple{0, 0, 1});
    CHECK(triples[1] == Triple{1, 0, 2});
    CHECK(triples[2] == Triple{0, 1, 2});
    CHECK(vocab.entity_name(0) == "a");
    CHECK(vocab.relation_name(1) == "knows");
    CHECK(*vocab.entity_id("c") == 2);
  }
  SUBCASE("two-field line is a parse error naming line 1") {
    write_file(tmp.path / "t.txt", "a\tb\n");
    Vocabulary vocab;
    CHECK_THROWS_WITH_AS(load_triples((tmp.path / "t.txt").string(), vocab, false),
                         doctest::Contains(":1:"), std::runtime_error);
  }
  SUBCASE("four fields is also a parse error") {
    write_file(tmp.path / "t.txt", "a\tr\tb\nx\tr\ty\tz\n");
    Vocabulary vocab;
    CHECK_THROWS_WITH_AS(load_triples((tmp.path / "t.txt").string(), vocab, false),
                         doctest::Contains(":2:"), std::runtime_error);
  }
  SUBCASE("unknown name under a fixed vocabulary") {
    write_file(tmp.path / "a.txt", "a\tr\tb\n");
    write_file(tmp.path / "b.txt", "a\tr\tzzz\n");
    Vocabulary vocab;
    load_triples((tmp.path / "a.txt").string(), vocab, false);
    CHECK_THROWS_WITH_AS(load_triples((tmp.path / "b.txt").string(), vocab, true),
                         doctest::Contains("zzz"), std::runtime_error);
  }
  SUBCASE("duplicate line within a split is rejected") {
    write_file(tmp.path / "t.txt", "a\tr\tb\na\tr\tb\n");
    Vocabulary vocab;
    CHECK_THROWS_WITH_AS(load_triples((tmp.path / "t.txt").string(), vocab, false),
                         doctest::Contains("duplicate"), std::runtime_error);
  }
}

TEST_CASE("filter index") {
  SUBCASE("direct construction") {
    std::vector<Triple> split{{0, 0, 1}, {0, 0, 2}};
    auto idx = build_filter_index({&split});
    CHECK(idx.tails(0, 0) == std::vector<EntityId>{1, 2});
    CHECK(idx.heads(0, 1) == std::vector<EntityId>{0});
    CHECK(idx.heads(0, 2) == std::vector<EntityId>{0});
    CHECK(idx.contains({0, 0, 1}));
    CHECK_FALSE(idx.contains({1, 0, 0}));
  }
  SUBCASE("duplicates across splits appear once") {
    std::vector<Triple> a{{0, 0, 1}};
    std::vector<Triple> b{{0, 0, 1}, {2, 0, 1}};
    auto idx = build_filter_index({&a, &b});
    CHECK(idx.tails(0, 0) == std::vector<EntityId>{1});
    CHECK(idx.size() == 2);
  }
  SUBCASE("indexed size equals distinct triples in the union") {
    auto kg = generate_pattern_kg(Pattern::Inversion, 30, 60, 0.3, 5);
    std::set<std::tuple<int, int, int>> distinct;
    for (const auto* split : {&kg.dataset.train, &kg.dataset.valid, &kg.dataset.test})
      for (const Triple& t : *split) distinct.insert({t.head, t.relation, t.tail});
    CHECK(kg.dataset.filter_all.size() == distinct.size());
    // every test triple's own tail sits in its (h, r) tail set
    for (const Triple& t : kg.dataset.test) {
      const auto& tails = kg.dataset.filter_all.tails(t.head, t.relation);
      CHECK(std::binary_search(tails.begin(), tails.end(), t.tail));
    }
  }
}

TEST_CASE("dataset TSV round-trip") {
  TempDir tmp;
  auto kg = generate_pattern_kg(Pattern::Symmetry, 20, 40, 0.25, 3);
  save_dataset((tmp.path / "kg").string(), kg.dataset);
  Dataset re = load_dataset((tmp.path / "kg").string());
  CHECK(re.train == kg.dataset.train);
  CHECK(re.valid == kg.dataset.valid);
  CHECK(re.test == kg.dataset.test);
  CHECK(re.n_entities() == kg.dataset.n_entities());
  CHECK(re.n_relations() == kg.dataset.n_relations());
}

// Explicit rule application; the independent check that generated test
// triples really are entailed by the train split.
namespace {

bool entailed(const SyntheticKg& kg, const Triple& t) {
  const auto train = as_set(kg.dataset.train);
  switch (kg.pattern) {
    case Pattern::Symmetry:
      return t.relation == 0 && train.count({t.tail, 0, t.head}) > 0;
    case Pattern::Inversion:
      return t.relation == 1 && train.count({t.tail, 0, t.head}) > 0;
    case Pattern::Subsumption:
      return t.relation == 1 && train.count({t.head, 0, t.tail}) > 0;
    case Pattern::Intersection:
      return t.relation == 2 && train.count({t.head, 0, t.tail}) > 0 &&
             train.count({t.head, 1, t.tail}) > 0;
    default: return false;
  }
}

}  // namespace

TEST_CASE("pattern generators: test split is entailed by train") {
  for (Pattern p : {Pattern::Symmetry, Pattern::Inversion,
                    Pattern::Subsumption, Pattern::Intersection}) {
    CAPTURE(pattern_name(p));
    auto kg = generate_pattern_kg(p, 50, 120, 0.2, 17);
    CHECK_FALSE(kg.dataset.test.empty());
    CHECK_FALSE(kg.dataset.valid.empty());
    for (const Triple& t : kg.dataset.test) CHECK(entailed(kg, t));
    for (const Triple& t : kg.dataset.valid) CHECK(entailed(kg, t));
    CHECK(kg.entailed_false.empty());
  }
}

TEST_CASE("anti-symmetry and mutual-exclusion emit contrast files") {
  SUBCASE("anti-symmetry: reverses of train facts are entailed false") {
    auto kg = generate_pattern_kg(Pattern::AntiSymmetry, 50, 120, 0.2, 17);
    const auto train = as_set(kg.dataset.train);
    CHECK_FALSE(kg.entailed_false.empty());
    for (const Triple& t : kg.entailed_false) {
      CHECK(train.count({t.tail, t.relation, t.head}) > 0);  // reverse is true
      CHECK(train.count({t.head, t.relation, t.tail}) == 0);
    }
    // held-out true facts never contradict anti-symmetry
    for (const Triple& t : kg.dataset.test)
      CHECK(train.count({t.tail, 0, t.head}) == 0);
  }
  SUBCASE("mutual exclusion: re-typed train facts are entailed false") {
    auto kg = generate_pattern_kg(Pattern::MutualExclusion, 50, 80, 0.2, 17);
    const auto train = as_set(kg.dataset.train);
    CHECK_FALSE(kg.entailed_false.empty());
    for (const Triple& t : kg.entailed_false) {
      const RelationId other = t.relation == 0 ? 1 : 0;
      CHECK(train.count({t.head, other, t.tail}) > 0);
      CHECK(train.count({t.head, t.relation, t.tail}) == 0);
    }
  }
}

TEST_CASE("generator determinism: same seed, byte-identical output") {
  TempDir tmp;
  for (Pattern p : {Pattern::Symmetry, Pattern::AntiSymmetry,
                    Pattern::Inversion, Pattern::Subsumption,
                    Pattern::Intersection, Pattern::MutualExclusion}) {
    CAPTURE(pattern_name(p));
    auto kg1 = generate_pattern_kg(p, 30, 50, 0.3, 7);
    auto kg2 = generate_pattern_kg(p, 30, 50, 0.3, 7);
    save_synthetic((tmp.path / "a").string(), kg1);
    save_synthetic((tmp.path / "b").string(), kg2);
    for (const char* f : {"train.txt", "valid.txt", "test.txt", "manifest.txt"}) {
      CHECK(read_file(tmp.path / "a" / f) == read_file(tmp.path / "b" / f));
    }
    auto kg3 = generate_pattern_kg(p, 30, 50, 0.3, 8);
    save_synthetic((tmp.path / "c").string(), kg3);
    CHECK(read_file(tmp.path / "a" / "train.txt") !=
          read_file(tmp.path / "c" / "train.txt"));
  }
}

TEST_CASE("generator structural examples") {
  SUBCASE("symmetry: every test triple's reverse is in train") {
    auto kg = generate_pattern_kg(Pattern::Symmetry, 100, 200, 0.2, 7);
    const auto train = as_set(kg.dataset.train);
    for (const Triple& t : kg.dataset.test)
      CHECK(train.count({t.tail, 0, t.head}) > 0);
    CHECK(kg.dataset.valid.size() + kg.dataset.test.size() == 40);
  }
  SUBCASE("inversion: each test r1(b,a) has r0(a,b) in train") {
    auto kg = generate_pattern_kg(Pattern::Inversion, 100, 200, 0.2, 7);
    const auto train = as_set(kg.dataset.train);
    for (const Triple& t : kg.dataset.test) {
      CHECK(t.relation == 1);
      CHECK(train.count({t.tail, 0, t.head}) > 0);
    }
  }
  SUBCASE("capacity error") {
    CHECK_THROWS_AS(generate_pattern_kg(Pattern::Symmetry, 4, 1000, 0.2, 1),
                    std::runtime_error);
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(generate_pattern_kg(Pattern::Symmetry, 3, 2, 0.2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_pattern_kg(Pattern::Symmetry, 10, 5, 0.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_pattern_kg(Pattern::Symmetry, 10, 5, 1.0, 1),
                    std::invalid_argument);
  }
  SUBCASE("manifest records pattern, seed and counts") {
    TempDir tmp;
    auto kg = generate_pattern_kg(Pattern::MutualExclusion, 20, 30, 0.25, 41);
    save_synthetic((tmp.path / "kg").string(), kg);
    const std::string manifest = read_file(tmp.path / "kg" / "manifest.txt");
    CHECK(manifest.find("pattern=mutual-exclusion") != std::string::npos);
    CHECK(manifest.find("seed=41") != std::string::npos);
    CHECK(manifest.find("train=" + std::to_string(kg.dataset.train.size())) !=
          std::string::npos);
    CHECK(fs::exists(tmp.path / "kg" / "entailed_false.txt"));
  }
}

TEST_CASE("no duplicates within any generated split") {
  for (Pattern p : {Pattern::Symmetry, Pattern::AntiSymmetry,
                    Pattern::Inversion, Pattern::Subsumption,
                    Pattern::Intersection, Pattern::MutualExclusion}) {
    auto kg = generate_pattern_kg(p, 40, 80, 0.25, 23);
    for (const auto* split :
         {&kg.dataset.train, &kg.dataset.valid, &kg.dataset.test}) {
      CHECK(as_set(*split).size() == split->size());
    }
  }
}
