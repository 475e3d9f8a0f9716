#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cutforest {

// Base class for everything thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input: violated precondition, guard breach, structural mismatch.
struct precondition_error : error {
  using error::error;
};

// The answer is not knowable inside the current truncation radius.
// Callers scripting over radii treat this as "grow the ball", not "bad input".
struct truncation_error : error {
  using error::error;
};

// An invariant the theory guarantees failed to hold; always a bug or a
// violated theorem, never a user error.
struct internal_error : error {
  using error::error;
};

// Enumeration guards scale with CUTFOREST_GUARD_SCALE (integer >= 1).
inline int guard_scale() {
  static const int scale = [] {
    const char* env = std::getenv("CUTFOREST_GUARD_SCALE");
    if (!env) return 1;
    int v = std::atoi(env);
    return v < 1 ? 1 : (v > 64 ? 64 : v);
  }();
  return scale;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw precondition_error(what);
}

inline void check_internal(bool cond, const std::string& what) {
  if (!cond) throw internal_error(what);
}

}  // namespace cutforest
