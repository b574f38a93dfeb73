// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

namespace oracle {

// Clauses in DIMACS convention: +v / -v for v in 1..n.
using Cnf = std::vector<std::vector<int>>;

inline bool satisfies(const Cnf& cnf, std::uint32_t mask) {
  for (const auto& c : cnf) {
    bool ok = false;
    for (int l : c) {
      bool val = (mask >> (std::abs(l) - 1)) & 1u;
      if ((l > 0) == val) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

inline bool brute_sat(const Cnf& cnf, int n) {
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (satisfies(cnf, m)) return true;
  return false;
}

// True when every model of `cnf` satisfies `clause`.
inline bool implied(const Cnf& cnf, const std::vector<int>& clause, int n) {
  Cnf single{clause};
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (satisfies(cnf, m) && !satisfies(single, m)) return false;
  return true;
}

inline Cnf random_3cnf(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> var(1, n), coin(0, 1);
  Cnf cnf;
  for (int i = 0; i < m; ++i) {
    std::vector<int> c;
    for (int k = 0; k < 3; ++k) c.push_back(coin(rng) ? var(rng) : -var(rng));
    cnf.push_back(c);
  }
  return cnf;
}

}  // namespace oracle
