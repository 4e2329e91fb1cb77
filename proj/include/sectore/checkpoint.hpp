#pragma once

#include <cstdint>
#include <string>

#include "sectore/model.hpp"

namespace sectore {

// A checkpoint is a pair of files sharing a base path:
//   <base>.meta.json    model name, d, |E|, |R|, beta, norm, ablation flags,
//                       step count
//   <base>.params.bin   ModelParams::flat() as IEEE-754 binary64,
//                       little-endian, in the documented layout order
struct Checkpoint {
  ModelParams params{1, 1, 1, 0.0};
  Norm norm = Norm::L1;
  AblationConfig ablation;
  std::uint64_t step = 0;
};

void save_checkpoint(const std::string& base, const ModelParams& params,
                     Norm norm, const AblationConfig& ablation,
                     std::uint64_t step);

// Accepts the base path or the path of either file.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sectore
