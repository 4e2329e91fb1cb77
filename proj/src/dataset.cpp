#include "sectore/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sectore {

EntityId Vocabulary::intern_entity(const std::string& name) {
  auto it = entity_ids_.find(name);
  if (it != entity_ids_.end()) return it->second;
  const EntityId id = static_cast<EntityId>(entities_.size());
  entities_.push_back(name);
  entity_ids_.emplace(name, id);
  return id;
}

RelationId Vocabulary::intern_relation(const std::string& name) {
  auto it = relation_ids_.find(name);
  if (it != relation_ids_.end()) return it->second;
  const RelationId id = static_cast<RelationId>(relations_.size());
  relations_.push_back(name);
  relation_ids_.emplace(name, id);
  return id;
}

std::optional<EntityId> Vocabulary::entity_id(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Vocabulary::relation_id(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

void FilterIndex::add(const Triple& t) {
  tails_by_hr_[key(t.head, t.relation)].push_back(t.tail);
  heads_by_rt_[key(t.relation, t.tail)].push_back(t.head);
}

void FilterIndex::finalize() {
  for (auto* m : {&tails_by_hr_, &heads_by_rt_}) {
    for (auto& [k, v] : *m) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
}

namespace {
const std::vector<EntityId> kEmpty;
}

const std::vector<EntityId>& FilterIndex::tails(EntityId head,
                                                RelationId rel) const {
  auto it = tails_by_hr_.find(key(head, rel));
  return it == tails_by_hr_.end() ? kEmpty : it->second;
}

const std::vector<EntityId>& FilterIndex::heads(RelationId rel,
                                                EntityId tail) const {
  auto it = heads_by_rt_.find(key(rel, tail));
  return it == heads_by_rt_.end() ? kEmpty : it->second;
}

bool FilterIndex::contains(const Triple& t) const {
  const auto& ts = tails(t.head, t.relation);
  return std::binary_search(ts.begin(), ts.end(), t.tail);
}

std::size_t FilterIndex::size() const {
  std::size_t n = 0;
  for (const auto& [k, v] : tails_by_hr_) n += v.size();
  return n;
}

FilterIndex build_filter_index(
    const std::vector<const std::vector<Triple>*>& splits) {
  FilterIndex idx;
  for (const auto* split : splits) {
    for (const Triple& t : *split) idx.add(t);
  }
  idx.finalize();
  return idx;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "?";
}

const std::vector<Triple>& Dataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Valid: return valid;
    case Split::Test: return test;
  }
  return train;
}

void Dataset::rebuild_indexes() {
  filter_all = build_filter_index({&train, &valid, &test});
  filter_train = build_filter_index({&train});
}

std::vector<Triple> load_triples(const std::string& path, Vocabulary& vocab,
                                 bool vocab_is_fixed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open triple file: " + path);

  std::vector<Triple> triples;
  std::set<std::tuple<EntityId, RelationId, EntityId>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;  // trailing newline
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos
                          ? std::string::npos
                          : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    }
    const std::string h = line.substr(0, tab1);
    const std::string r = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string t = line.substr(tab2 + 1);

    Triple triple;
    if (vocab_is_fixed) {
      const auto hid = vocab.entity_id(h);
      const auto rid = vocab.relation_id(r);
      const auto tid = vocab.entity_id(t);
      if (!hid || !rid || !tid) {
        const std::string& bad = !hid ? h : (!rid ? r : t);
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": name not in vocabulary: " + bad);
      }
      triple = {*hid, *rid, *tid};
    } else {
      triple.head = vocab.intern_entity(h);
      triple.relation = vocab.intern_relation(r);
      triple.tail = vocab.intern_entity(t);
    }
    if (!seen.insert({triple.head, triple.relation, triple.tail}).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate triple within split");
    }
    triples.push_back(triple);
  }
  return triples;
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  Dataset ds;
  ds.train = load_triples((fs::path(dir) / "train.txt").string(), ds.vocab, false);
  ds.valid = load_triples((fs::path(dir) / "valid.txt").string(), ds.vocab, false);
  ds.test = load_triples((fs::path(dir) / "test.txt").string(), ds.vocab, false);
  ds.rebuild_indexes();
  return ds;
}

void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write triple file: " + path);
  for (const Triple& t : triples) {
    out << vocab.entity_name(t.head) << '\t' << vocab.relation_name(t.relation)
        << '\t' << vocab.entity_name(t.tail) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_dataset(const std::string& dir, const Dataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_triples((fs::path(dir) / "train.txt").string(), ds.train, ds.vocab);
  save_triples((fs::path(dir) / "valid.txt").string(), ds.valid, ds.vocab);
  save_triples((fs::path(dir) / "test.txt").string(), ds.test, ds.vocab);
}

}  // namespace sectore
