#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <optional>

#include "tubesol/core/error.hpp"

namespace tubesol::test {

/// Kind of the Error thrown by fn, or empty when it returns normally.
template <class Fn>
std::optional<ErrorKind> thrown_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace tubesol::test

#define REQUIRE_KIND(expr, expected) REQUIRE(::tubesol::test::thrown_kind([&] { (void)(expr); }) == (expected))
