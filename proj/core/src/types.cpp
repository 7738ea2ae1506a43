#include "zclaim/result.hpp"
#include "zclaim/types.hpp"

#include <charconv>

namespace zclaim {

namespace {

std::int64_t parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Ratio parse_ratio(std::string_view text) {
  const auto slash = text.find('/');
  Ratio r;
  if (slash == std::string_view::npos) {
    r = Ratio{parse_int(text), 1};
  } else {
    r = Ratio{parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  }
  if (r.den <= 0) throw std::invalid_argument("ratio denominator must be positive");
  return r;
}

std::string to_string(const Ratio& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

std::string to_hex(const std::uint8_t* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

const char* to_string(Reject r) {
  switch (r) {
    case Reject::invalid_argument: return "invalid-argument";
    case Reject::unknown_entity: return "unknown-entity";
    case Reject::wrong_state: return "wrong-state";
    case Reject::deadline_passed: return "deadline-passed";
    case Reject::insufficient_funds: return "insufficient-funds";
    case Reject::unavailable: return "unavailable";
    case Reject::busy: return "busy";
    case Reject::double_spend: return "double-spend";
    case Reject::imbalance: return "imbalance";
    case Reject::bad_statement: return "bad-statement";
    case Reject::replay: return "replay";
    case Reject::not_final: return "not-final";
    case Reject::bad_path: return "bad-path";
    case Reject::not_found: return "not-found";
    case Reject::orphan: return "orphan";
    case Reject::insufficient_work: return "insufficient-work";
    case Reject::undercollateralized: return "undercollateralized";
    case Reject::inconsistent_witness: return "inconsistent-witness";
    case Reject::feed_unavailable: return "feed-unavailable";
    case Reject::challenge_rejected: return "challenge-rejected";
  }
  return "unknown";
}

}  // namespace zclaim
