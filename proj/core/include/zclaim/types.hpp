#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zclaim {

using Bytes32 = std::array<std::uint8_t, 32>;
using Tick = std::uint64_t;

/// Base units per whole coin, for both ZEC and the issuing-chain currency.
inline constexpr std::uint64_t kCoin = 100'000'000;

/// Non-negative amount in base units. Ledger arithmetic never goes through
/// floating point; subtraction below zero is a programming error.
class Amount {
public:
  constexpr Amount() = default;
  constexpr explicit Amount(std::uint64_t units) : units_(units) {}

  static constexpr Amount coins(std::uint64_t whole) { return Amount{whole * kCoin}; }

  [[nodiscard]] constexpr std::uint64_t units() const { return units_; }
  [[nodiscard]] constexpr bool is_zero() const { return units_ == 0; }

  constexpr Amount& operator+=(Amount other) {
    if (units_ > UINT64_MAX - other.units_) throw std::overflow_error("Amount overflow");
    units_ += other.units_;
    return *this;
  }
  constexpr Amount& operator-=(Amount other) {
    if (other.units_ > units_) throw std::underflow_error("Amount underflow");
    units_ -= other.units_;
    return *this;
  }
  friend constexpr Amount operator+(Amount a, Amount b) { return a += b; }
  friend constexpr Amount operator-(Amount a, Amount b) { return a -= b; }
  friend constexpr auto operator<=>(Amount, Amount) = default;

  /// max(0, a - b)
  friend constexpr Amount saturating_sub(Amount a, Amount b) {
    return a.units_ > b.units_ ? Amount{a.units_ - b.units_} : Amount{};
  }

private:
  std::uint64_t units_ = 0;
};

__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

/// Exact non-negative rational used for rates, fees and ratios in ledger
/// paths. Comparisons are done by the callers with wide cross products.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<Int128>(a.num) * b.den == static_cast<Int128>(b.num) * a.den;
  }
  friend constexpr std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const auto lhs = static_cast<Int128>(a.num) * b.den;
    const auto rhs = static_cast<Int128>(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

/// Parses "num/den" or a bare integer.
Ratio parse_ratio(std::string_view text);
std::string to_string(const Ratio& r);

enum class ActorId : std::uint32_t {};
enum class VaultId : std::uint32_t {};
enum class RequestId : std::uint32_t {};

constexpr std::uint32_t raw(ActorId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t raw(VaultId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t raw(RequestId id) { return static_cast<std::uint32_t>(id); }

std::string to_hex(const std::uint8_t* data, std::size_t size);
template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& bytes) {
  return to_hex(bytes.data(), bytes.size());
}

struct Bytes32Hash {
  std::size_t operator()(const Bytes32& b) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | b[i];
    return h;
  }
};

}  // namespace zclaim
