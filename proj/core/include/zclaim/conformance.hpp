#pragma once

// Trace grammars for the Issue and Redeem procedures. Each request's
// successful records must spell a path through its procedure; rejected
// records must not change state.

#include <string>
#include <vector>

#include "zclaim/protocol.hpp"

namespace zclaim {

struct ConformanceReport {
  std::vector<std::string> violations;
  std::size_t requests = 0;
  /// Requests still in a non-terminal state when the trace ends.
  std::size_t open = 0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

ConformanceReport check_conformance(const std::vector<TraceRecord>& trace);

}  // namespace zclaim
