#pragma once

/* Pass/fail outcome of a single sampled property check, with the first
 * violating sample kept as a witness. Serialized form:
 *
 *   property=<name> status=<pass|fail> witness=<u1,v1;u2,v2|none>
 */

#include <string>
#include <utility>
#include <vector>

#include "vhfix/numfmt.hpp"

namespace vhfix {

struct WitnessPoint {
  double at;
  double value;
};

struct PropertyReport {
  std::string property;
  bool passed = false;
  std::vector<WitnessPoint> witness;

  static PropertyReport pass(std::string name) { return {std::move(name), true, {}}; }
  static PropertyReport fail(std::string name, std::vector<WitnessPoint> w) {
    return {std::move(name), false, std::move(w)};
  }

  std::string to_line() const {
    std::string out = "property=" + property + " status=" + (passed ? "pass" : "fail");
    out += " witness=";
    if (witness.empty()) {
      out += "none";
    } else {
      for (std::size_t i = 0; i < witness.size(); ++i) {
        if (i) out += ";";
        out += fmt17(witness[i].at) + "," + fmt17(witness[i].value);
      }
    }
    return out;
  }
};

}  // namespace vhfix
