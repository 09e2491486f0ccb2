#pragma once

#include <catch_amalgamated.hpp>

#include "thh/arith.hpp"

template <>
struct Catch::StringMaker<thh::AbelianGroup> {
  static std::string convert(const thh::AbelianGroup& g) { return g.str(); }
};
