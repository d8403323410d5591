#pragma once

#include <string>

#include "alab/error.hpp"

// Reason string of the alab::Error thrown by f, or "" if nothing was thrown.
template <class F>
std::string error_reason(F&& f) {
  try {
    f();
  } catch (const alab::Error& e) {
    return e.reason();
  }
  return {};
}
