#include "clearsheet/score.hpp"

#include <limits>
#include <stdexcept>

namespace clearsheet {

Score Score::steps(int value) {
  if (value > 0) throw std::invalid_argument("a score is never positive: " + std::to_string(value));
  Score s;
  s.value_ = value;
  return s;
}

Score score_add(Score a, Score b) {
  if (a.is_opaque() || b.is_opaque()) return Score::opaque();
  long long sum = static_cast<long long>(*a.finite()) + *b.finite();
  // Saturate instead of wrapping; a model this far gone is still finite.
  if (sum < std::numeric_limits<int>::min()) sum = std::numeric_limits<int>::min();
  return Score::steps(static_cast<int>(sum));
}

std::string to_string(Score s) { return s.is_opaque() ? "Opaque" : std::to_string(*s.finite()); }

std::ostream& operator<<(std::ostream& os, Score s) { return os << to_string(s); }

}  // namespace clearsheet
