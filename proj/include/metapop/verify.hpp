#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace metapop {

struct PropertyResult {
  std::string name;
  bool pass = true;
  bool informational = false;  ///< reported only; never fails the battery
  std::string detail;          ///< summary, or the first counterexample
};

/// The property battery behind `metapop verify`. `n` is the number of random
/// draws per randomized property (the conditions-(17) scan uses 500 n).
std::vector<PropertyResult> run_verification(std::uint64_t seed, int n);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace metapop
