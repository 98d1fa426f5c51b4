#pragma once

#include <optional>

#include "fractsect/error.hpp"

// Runs f and reports the code of the fractsect::Error it throws, if any.
template <class F>
std::optional<fractsect::ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const fractsect::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
