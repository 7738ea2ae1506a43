#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace zclaim {

/// Reasons an operation is refused. Rejections are ordinary protocol
/// outcomes (a byzantine actor tried something), not exceptions.
enum class Reject {
  invalid_argument,
  unknown_entity,
  wrong_state,
  deadline_passed,
  insufficient_funds,
  unavailable,
  busy,
  double_spend,
  imbalance,
  bad_statement,
  replay,
  not_final,
  bad_path,
  not_found,
  orphan,
  insufficient_work,
  undercollateralized,
  inconsistent_witness,
  feed_unavailable,
  challenge_rejected,
};

const char* to_string(Reject r);

struct Rejection {
  Reject code;
  std::string detail;
};

/// Value-or-rejection. Kept minimal until std::expected is available.
template <class T>
class [[nodiscard]] Result {
public:
  Result(T value) : data_(std::move(value)) {}
  Result(Rejection rejection) : data_(std::move(rejection)) {}

  [[nodiscard]] bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & {
    assert(ok());
    return std::get<0>(data_);
  }
  const T& value() const& {
    assert(ok());
    return std::get<0>(data_);
  }
  T&& value() && {
    assert(ok());
    return std::get<0>(std::move(data_));
  }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }
  T& operator*() { return value(); }
  const T& operator*() const { return value(); }

  [[nodiscard]] const Rejection& error() const {
    assert(!ok());
    return std::get<1>(data_);
  }

private:
  std::variant<T, Rejection> data_;
};

struct Unit {};

using Status = Result<Unit>;

inline Status ok_status() { return Unit{}; }

inline Rejection reject(Reject code, std::string detail = {}) {
  return Rejection{code, std::move(detail)};
}

}  // namespace zclaim
