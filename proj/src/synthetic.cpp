#include "sectore/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "sectore/rng.hpp"

namespace sectore {

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::Symmetry: return "symmetry";
    case Pattern::AntiSymmetry: return "anti-symmetry";
    case Pattern::Inversion: return "inversion";
    case Pattern::Subsumption: return "subsumption";
    case Pattern::Intersection: return "intersection";
    case Pattern::MutualExclusion: return "mutual-exclusion";
  }
  return "?";
}

Pattern pattern_from_name(const std::string& name) {
  for (Pattern p : {Pattern::Symmetry, Pattern::AntiSymmetry,
                    Pattern::Inversion, Pattern::Subsumption,
                    Pattern::Intersection, Pattern::MutualExclusion}) {
    if (name == pattern_name(p)) return p;
  }
  throw std::invalid_argument("unknown pattern: " + name);
}

int pattern_arity(Pattern p) {
  switch (p) {
    case Pattern::Symmetry:
    case Pattern::AntiSymmetry: return 1;
    case Pattern::Inversion:
    case Pattern::Subsumption:
    case Pattern::MutualExclusion: return 2;
    case Pattern::Intersection: return 3;
  }
  return 0;
}

namespace {

using Pair = std::pair<EntityId, EntityId>;

struct PairPool {
  std::set<Pair> used;
  bool exclude_reverse = false;

  // Draws `count` fresh pairs (a != b), rejecting collisions with earlier
  // draws (and with their reverses when exclude_reverse is set).
  std::vector<Pair> draw(Rng& rng, std::size_t n_entities, std::size_t count) {
    std::vector<Pair> out;
    out.reserve(count);
    while (out.size() < count) {
      const auto a = static_cast<EntityId>(rng.next_below(n_entities));
      const auto b = static_cast<EntityId>(rng.next_below(n_entities));
      if (a == b) continue;
      if (used.count({a, b})) continue;
      if (exclude_reverse && used.count({b, a})) continue;
      used.insert({a, b});
      out.emplace_back(a, b);
    }
    return out;
  }
};

// Fisher-Yates with draws from Rng; fixed here so holdout selection is
// reproducible everywhere.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.next_below(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

struct Builder {
  SyntheticKg kg;
  std::size_t valid_count = 0;

  explicit Builder(Pattern p, std::size_t n_entities, std::size_t n_facts,
                   double holdout, std::uint64_t seed) {
    kg.pattern = p;
    kg.seed = seed;
    kg.n_entities = n_entities;
    kg.n_facts = n_facts;
    kg.holdout_fraction = holdout;
  }

  void train(EntityId h, RelationId r, EntityId t) {
    kg.dataset.train.push_back({h, r, t});
  }
  // Alternates valid, test, valid, ...
  void holdout(EntityId h, RelationId r, EntityId t) {
    auto& split = (valid_count++ % 2 == 0) ? kg.dataset.valid : kg.dataset.test;
    split.push_back({h, r, t});
  }
  void falsehood(EntityId h, RelationId r, EntityId t) {
    kg.entailed_false.push_back({h, r, t});
  }

  // Triples above carry provisional ids (entity k <-> "e<k>"). Re-intern by
  // first appearance in train, valid, test order so the in-memory dataset is
  // identical to its own save/load image.
  void finalize() {
    Vocabulary vocab;
    auto remap = [&](Triple& t) {
      t.head = vocab.intern_entity("e" + std::to_string(t.head));
      t.relation = vocab.intern_relation("r" + std::to_string(t.relation));
      t.tail = vocab.intern_entity("e" + std::to_string(t.tail));
    };
    for (Triple& t : kg.dataset.train) remap(t);
    for (Triple& t : kg.dataset.valid) remap(t);
    for (Triple& t : kg.dataset.test) remap(t);
    for (Triple& t : kg.entailed_false) remap(t);
    kg.dataset.vocab = std::move(vocab);
    kg.dataset.rebuild_indexes();
  }
};

}  // namespace

SyntheticKg generate_pattern_kg(Pattern pattern, std::size_t n_entities,
                                std::size_t n_facts, double holdout_fraction,
                                std::uint64_t seed) {
  if (n_entities < 4)
    throw std::invalid_argument("n_entities must be at least 4");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw std::invalid_argument("holdout_fraction must be in (0, 1)");
  if (n_facts == 0) throw std::invalid_argument("n_facts must be positive");

  const std::size_t ordered_cap = n_entities * (n_entities - 1);
  const std::size_t unordered_cap = ordered_cap / 2;
  const std::size_t extra = n_facts / 4;
  std::size_t needed = n_facts, cap = ordered_cap;
  switch (pattern) {
    case Pattern::Symmetry:
    case Pattern::AntiSymmetry: cap = unordered_cap; break;
    case Pattern::Inversion: break;
    case Pattern::Subsumption: needed = n_facts + extra; break;
    case Pattern::Intersection: needed = n_facts + 2 * extra; break;
    case Pattern::MutualExclusion: needed = 2 * n_facts; break;
  }
  if (needed > cap) {
    throw std::runtime_error(
        "n_facts too large: pattern needs " + std::to_string(needed) +
        " distinct pairs but only " + std::to_string(cap) + " exist for " +
        std::to_string(n_entities) + " entities");
  }

  Rng rng(seed);
  Builder b(pattern, n_entities, n_facts, holdout_fraction, seed);
  PairPool pool;
  pool.exclude_reverse =
      pattern == Pattern::Symmetry || pattern == Pattern::AntiSymmetry;

  const auto base = pool.draw(rng, n_entities, n_facts);
  const std::size_t n_hold = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(
             static_cast<double>(n_facts) * holdout_fraction)));
  if (n_hold >= n_facts)
    throw std::runtime_error(
        "holdout_fraction leaves no kept facts (needs at least 2 held-out "
        "and 1 kept fact)");

  std::vector<std::size_t> order(n_facts);
  for (std::size_t i = 0; i < n_facts; ++i) order[i] = i;
  shuffle_indices(order, rng);
  std::vector<bool> held(n_facts, false);
  for (std::size_t i = 0; i < n_hold; ++i) held[order[i]] = true;

  switch (pattern) {
    case Pattern::Symmetry:
      for (const auto& [a, t] : base) b.train(a, 0, t);
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].second, 0, base[i].first);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(t, 0, a);
      }
      break;

    case Pattern::AntiSymmetry:
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].first, 0, base[i].second);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(a, 0, t);
      }
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.falsehood(base[i].second, 0, base[i].first);
      break;

    case Pattern::Inversion:
      for (const auto& [a, t] : base) b.train(a, 0, t);
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].second, 1, base[i].first);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(t, 1, a);
      }
      break;

    case Pattern::Subsumption: {
      for (const auto& [a, t] : base) b.train(a, 0, t);
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].first, 1, base[i].second);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(a, 1, t);
      }
      for (const auto& [a, t] : pool.draw(rng, n_entities, extra))
        b.train(a, 1, t);
      break;
    }

    case Pattern::Intersection: {
      for (const auto& [a, t] : base) {
        b.train(a, 0, t);
        b.train(a, 1, t);
      }
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].first, 2, base[i].second);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(a, 2, t);
      }
      for (const auto& [a, t] : pool.draw(rng, n_entities, extra))
        b.train(a, 0, t);
      for (const auto& [a, t] : pool.draw(rng, n_entities, extra))
        b.train(a, 1, t);
      break;
    }

    case Pattern::MutualExclusion: {
      const auto other = pool.draw(rng, n_entities, n_facts);
      std::vector<std::size_t> order2(n_facts);
      for (std::size_t i = 0; i < n_facts; ++i) order2[i] = i;
      shuffle_indices(order2, rng);
      std::vector<bool> held2(n_facts, false);
      for (std::size_t i = 0; i < n_hold; ++i) held2[order2[i]] = true;

      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.train(base[i].first, 0, base[i].second);
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held2[i]) b.train(other[i].first, 1, other[i].second);
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = base[order[i]];
        b.holdout(a, 0, t);
      }
      for (std::size_t i = 0; i < n_hold; ++i) {
        const auto& [a, t] = other[order2[i]];
        b.holdout(a, 1, t);
      }
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held[i]) b.falsehood(base[i].first, 1, base[i].second);
      for (std::size_t i = 0; i < n_facts; ++i)
        if (!held2[i]) b.falsehood(other[i].first, 0, other[i].second);
      break;
    }
  }

  b.finalize();
  return b.kg;
}

void save_synthetic(const std::string& dir, const SyntheticKg& kg) {
  namespace fs = std::filesystem;
  save_dataset(dir, kg.dataset);
  if (!kg.entailed_false.empty()) {
    save_triples((fs::path(dir) / "entailed_false.txt").string(),
                 kg.entailed_false, kg.dataset.vocab);
  }
  std::ofstream mf(fs::path(dir) / "manifest.txt", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest in " + dir);
  mf << "pattern=" << pattern_name(kg.pattern) << '\n'
     << "seed=" << kg.seed << '\n'
     << "n_entities=" << kg.n_entities << '\n'
     << "n_facts=" << kg.n_facts << '\n'
     << "holdout_fraction=" << kg.holdout_fraction << '\n'
     << "train=" << kg.dataset.train.size() << '\n'
     << "valid=" << kg.dataset.valid.size() << '\n'
     << "test=" << kg.dataset.test.size() << '\n'
     << "entailed_false=" << kg.entailed_false.size() << '\n';
}

}  // namespace sectore
