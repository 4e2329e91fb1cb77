#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sectore/dataset.hpp"
#include "sectore/rng.hpp"

namespace sectore {

// Corrupts head or tail (fair coin) with a uniformly drawn entity. Candidates
// already true in the train split are rejected and redrawn, up to
// max_attempts per negative; after that the candidate is accepted as-is and
// `exhausted`, when given, is bumped.
std::vector<Triple> sample_negatives(const Dataset& dataset,
                                     const Triple& positive, std::size_t n,
                                     Rng& rng, std::size_t max_attempts = 100,
                                     std::uint64_t* exhausted = nullptr);

// Softmax of alpha * scores with max subtraction; alpha = 0 gives uniform
// weights. The result is a probability vector (sums to 1).
std::vector<double> adversarial_weights(std::span<const double> scores,
                                        double alpha);

}  // namespace sectore
