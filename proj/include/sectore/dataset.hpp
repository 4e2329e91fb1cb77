#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sectore {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Contiguous ids starting at 0, assigned by first appearance.
class Vocabulary {
 public:
  EntityId intern_entity(const std::string& name);
  RelationId intern_relation(const std::string& name);
  std::optional<EntityId> entity_id(const std::string& name) const;
  std::optional<RelationId> relation_id(const std::string& name) const;
  const std::string& entity_name(EntityId id) const { return entities_[id]; }
  const std::string& relation_name(RelationId id) const { return relations_[id]; }
  std::size_t n_entities() const { return entities_.size(); }
  std::size_t n_relations() const { return relations_.size(); }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
};

// For each (head, relation) the sorted set of true tails, and for each
// (relation, tail) the sorted set of true heads.
class FilterIndex {
 public:
  void add(const Triple& t);
  void finalize();  // sort + dedupe; call once after the last add

  const std::vector<EntityId>& tails(EntityId head, RelationId rel) const;
  const std::vector<EntityId>& heads(RelationId rel, EntityId tail) const;
  bool contains(const Triple& t) const;
  // Number of distinct triples indexed (after finalize).
  std::size_t size() const;

 private:
  static std::uint64_t key(std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_by_hr_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_by_rt_;
};

FilterIndex build_filter_index(const std::vector<const std::vector<Triple>*>& splits);

enum class Split { Train, Valid, Test };
const char* split_name(Split s);

struct Dataset {
  Vocabulary vocab;
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  FilterIndex filter_all;    // union of all three splits
  FilterIndex filter_train;  // train split only; negative-sampling filter

  const std::vector<Triple>& split(Split s) const;
  void rebuild_indexes();

  std::size_t n_entities() const { return vocab.n_entities(); }
  std::size_t n_relations() const { return vocab.n_relations(); }
};

// Parse one TSV file (head<TAB>relation<TAB>tail per line, UTF-8, LF).
// Without a vocabulary, builds one by first appearance; with one, resolves
// names against it and rejects unknowns. Malformed lines and duplicates
// within the file raise std::runtime_error naming the line.
std::vector<Triple> load_triples(const std::string& path, Vocabulary& vocab,
                                 bool vocab_is_fixed);

// Load train.txt/valid.txt/test.txt from a directory; vocabulary order is
// first appearance in train, then valid, then test.
Dataset load_dataset(const std::string& dir);

void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab);
void save_dataset(const std::string& dir, const Dataset& ds);

}  // namespace sectore
