#pragma once

#include <map>

#include "zclaim/result.hpp"
#include "zclaim/types.hpp"

namespace zclaim {

/// Scripted exchange-rate feed: units of the issuing currency per ZEC.
class RateFeed {
public:
  Status set_rate(Tick tick, Ratio rate);
  /// Latest rate set at or before `tick`.
  [[nodiscard]] Result<Ratio> get_rate(Tick tick) const;

  [[nodiscard]] const std::map<Tick, Ratio>& series() const { return series_; }

private:
  std::map<Tick, Ratio> series_;
};

}  // namespace zclaim
