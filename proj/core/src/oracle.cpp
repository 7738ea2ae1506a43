#include "zclaim/oracle.hpp"

namespace zclaim {

Status RateFeed::set_rate(Tick tick, Ratio rate) {
  if (rate.num <= 0 || rate.den <= 0) return reject(Reject::invalid_argument, "rate must be positive");
  series_[tick] = rate;
  return ok_status();
}

Result<Ratio> RateFeed::get_rate(Tick tick) const {
  auto it = series_.upper_bound(tick);
  if (it == series_.begin()) return reject(Reject::feed_unavailable, "no rate at or before tick");
  return std::prev(it)->second;
}

}  // namespace zclaim
