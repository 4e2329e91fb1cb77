#pragma once

#include <cstdint>
#include <string>

#include "sectore/dataset.hpp"

namespace sectore {

enum class Pattern {
  Symmetry,
  AntiSymmetry,
  Inversion,
  Subsumption,
  Intersection,
  MutualExclusion,
};

const char* pattern_name(Pattern p);
Pattern pattern_from_name(const std::string& name);  // throws on unknown
int pattern_arity(Pattern p);                        // relations involved

// A synthetic KG whose test split is fully determined by the train split
// under one relation pattern. Entities are named e0..e{n-1}; relations
// r0 (and r1, r2 as the pattern needs them).
//
// Per pattern, with F base facts on distinct entity pairs (a != b) and
// H = round(F * holdout_fraction) of them designated holdout:
//   symmetry          r0(a,b) in train for every pair; the reverse r0(b,a)
//                     goes to train for kept pairs and to valid/test for
//                     holdout pairs.
//   inversion         r0(a,b) in train for every pair; r1(b,a) to train or
//                     valid/test by the same rule.
//   subsumption       r0(a,b) in train; r1(a,b) kept/held out likewise;
//                     plus F/4 extra r1-only train facts on fresh pairs so
//                     r1 strictly contains r0.
//   intersection      r0(a,b) and r1(a,b) in train; r2(a,b) kept/held out;
//                     plus F/4 r0-only and F/4 r1-only train facts.
//   anti-symmetry     F facts with no reversed pair; holdout facts go to
//                     valid/test as held-out true facts (the pattern entails
//                     no positives), and every train fact's reverse is
//                     emitted to entailed_false.
//   mutual-exclusion  F facts per relation on disjoint pair sets, H held out
//                     from each; each train fact re-typed with the other
//                     relation is emitted to entailed_false.
//
// Holdout facts alternate valid, test, valid, ... in shuffled order. All
// draws go through Rng(seed), so equal arguments give byte-identical output.
struct SyntheticKg {
  Dataset dataset;
  std::vector<Triple> entailed_false;
  Pattern pattern = Pattern::Symmetry;
  std::uint64_t seed = 0;
  std::size_t n_entities = 0;
  std::size_t n_facts = 0;
  double holdout_fraction = 0.0;
};

// Throws std::invalid_argument on bad arguments and std::runtime_error when
// n_facts exceeds the number of distinct pairs the pattern can use.
SyntheticKg generate_pattern_kg(Pattern pattern, std::size_t n_entities,
                                std::size_t n_facts, double holdout_fraction,
                                std::uint64_t seed);

// Writes train.txt/valid.txt/test.txt, manifest.txt (key=value lines:
// pattern, seed, n_entities, n_facts, holdout_fraction, split sizes), and
// entailed_false.txt when the pattern produces contrast triples.
void save_synthetic(const std::string& dir, const SyntheticKg& kg);

}  // namespace sectore
