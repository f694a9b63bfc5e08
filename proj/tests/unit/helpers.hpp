#pragma once

#include <string>
#include <vector>

#include "cupgame/rational.hpp"

namespace testutil {

inline cupgame::Rational R(const std::string& text) { return cupgame::Rational::parse(text); }

inline std::vector<cupgame::Rational> Rs(std::initializer_list<const char*> items) {
  std::vector<cupgame::Rational> out;
  for (const char* s : items) out.push_back(R(s));
  return out;
}

}  // namespace testutil
