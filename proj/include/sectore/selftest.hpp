#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sectore::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  enum class Status { Pass, Fail, Skip } status = Status::Fail;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  bool run_scaled = false;     // include the long reduced-budget benchmark
  std::string data_dir = "data";  // where benchmark datasets are looked up
  int threads = 0;             // 0 = hardware concurrency
  std::uint64_t seed = 20260810;
};

// Runs every acceptance criterion: quick numerical checks plus two
// desk-scale training experiments; the scaled benchmark only with
// run_scaled. Criteria whose external inputs are absent report Skip.
std::vector<CriterionResult> run_all(const Options& options);

// True when no criterion failed (skips are allowed).
bool all_passed(const std::vector<CriterionResult>& results);

// One line per criterion plus a summary tail line.
void print_results(std::ostream& out,
                   const std::vector<CriterionResult>& results);

}  // namespace sectore::selftest
