#pragma once

#include <cstdio>
#include <string>

namespace vhfix {

// Shortest-ish decimal form that round-trips an IEEE double (17 significant
// digits). Used everywhere a number is serialized so outputs are reproducible
// byte for byte.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace vhfix
