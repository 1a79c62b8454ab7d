#pragma once

#include <compare>
#include <optional>
#include <ostream>
#include <string>

namespace clearsheet {

// Steps from transparency: 0 or a negative count, or Opaque (absorbing, below every finite value).
class Score {
 public:
  constexpr Score() = default;
  // Throws std::invalid_argument for positive values.
  static Score steps(int value);
  static constexpr Score opaque() {
    Score s;
    s.opaque_ = true;
    return s;
  }

  constexpr bool is_opaque() const { return opaque_; }
  constexpr bool is_transparent() const { return !opaque_ && value_ == 0; }
  // Finite value; std::nullopt when opaque.
  constexpr std::optional<int> finite() const { return opaque_ ? std::nullopt : std::optional<int>(value_); }

  constexpr bool operator==(const Score&) const = default;
  constexpr std::strong_ordering operator<=>(const Score& o) const {
    if (opaque_ || o.opaque_) return o.opaque_ <=> opaque_;
    return value_ <=> o.value_;
  }

 private:
  int value_ = 0;
  bool opaque_ = false;
};

Score score_add(Score a, Score b);
inline Score operator+(Score a, Score b) { return score_add(a, b); }
inline Score& operator+=(Score& a, Score b) { return a = score_add(a, b); }

// "0", "-2", "Opaque".
std::string to_string(Score s);
std::ostream& operator<<(std::ostream& os, Score s);

}  // namespace clearsheet
