// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "strsolve/term.hpp"

namespace strsolve {

/// Ground values for variables, keyed by variable term.
struct Model {
  std::map<Term, std::string> strings;
  std::map<Term, std::int64_t> ints;
  std::map<Term, bool> bools;
};

}  // namespace strsolve
