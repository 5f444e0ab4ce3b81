#pragma once

#include <string>

#include "doctest.h"
#include "zdiheat/error.hpp"

// Runs `expr` and returns the ErrorKind it raised; fails the test if nothing was thrown.
#define ZDH_ERROR_KIND(expr)                                 \
  ([&]() -> ::zdiheat::ErrorKind {                           \
    try {                                                    \
      (void)(expr);                                          \
    } catch (const ::zdiheat::Error& e) {                    \
      return e.kind();                                       \
    }                                                        \
    FAIL("expected zdiheat::Error from " #expr);             \
    return ::zdiheat::ErrorKind::kInvalidArgument;           \
  }())

inline std::string error_message(const auto& fn) {
  try {
    fn();
  } catch (const zdiheat::Error& e) {
    return e.what();
  }
  return {};
}
