#include "sectore/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sectore {

std::vector<Triple> sample_negatives(const Dataset& dataset,
                                     const Triple& positive, std::size_t n,
                                     Rng& rng, std::size_t max_attempts,
                                     std::uint64_t* exhausted) {
  if (n == 0) throw std::invalid_argument("need at least one negative");
  const std::size_t n_entities = dataset.n_entities();
  if (n_entities < 2)
    throw std::invalid_argument("negative sampling needs at least 2 entities");
  std::vector<Triple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool corrupt_head = rng.coin();
    const EntityId original = corrupt_head ? positive.head : positive.tail;
    Triple neg = positive;
    for (std::size_t attempt = 0;; ++attempt) {
      auto e = static_cast<EntityId>(rng.next_below(n_entities));
      if (attempt + 1 >= max_attempts) {
        // Give up on filtering but keep the corruption real.
        if (e == original)
          e = static_cast<EntityId>((e + 1) % static_cast<EntityId>(n_entities));
        if (corrupt_head)
          neg.head = e;
        else
          neg.tail = e;
        if (exhausted) ++*exhausted;
        break;
      }
      if (e == original) continue;
      if (corrupt_head)
        neg.head = e;
      else
        neg.tail = e;
      if (!dataset.filter_train.contains(neg)) break;
    }
    out.push_back(neg);
  }
  return out;
}

std::vector<double> adversarial_weights(std::span<const double> scores,
                                        double alpha) {
  if (scores.empty()) throw std::invalid_argument("empty score vector");
  std::vector<double> w(scores.size());
  const double max_s = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(alpha * (scores[i] - max_s));
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace sectore
