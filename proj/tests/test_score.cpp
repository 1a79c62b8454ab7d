#include <doctest.h>

#include <limits>
#include <sstream>
#include <vector>

#include "clearsheet/score.hpp"

using clearsheet::Score;

namespace {

std::vector<Score> small_domain() {
  std::vector<Score> out{Score::opaque()};
  for (int v = -50; v <= 0; ++v) out.push_back(Score::steps(v));
  return out;
}

}  // namespace

TEST_CASE("steps accepts zero and negatives, rejects positives") {
  CHECK(Score::steps(0).is_transparent());
  CHECK(Score::steps(-3).finite() == -3);
  CHECK_FALSE(Score::steps(-3).is_transparent());
  CHECK_THROWS_AS(Score::steps(1), std::invalid_argument);
  CHECK(Score{} == Score::steps(0));
}

TEST_CASE("opaque sits below every finite score") {
  CHECK(Score::opaque() < Score::steps(std::numeric_limits<int>::min()));
  CHECK(Score::steps(-1) < Score::steps(0));
  CHECK(Score::opaque() == Score::opaque());
  CHECK_FALSE(Score::opaque().finite().has_value());
  CHECK_FALSE(Score::opaque().is_transparent());
}

TEST_CASE("addition sums finite scores and saturates at the floor") {
  CHECK(Score::steps(-2) + Score::steps(-3) == Score::steps(-5));
  Score s = Score::steps(-1);
  s += Score::steps(-1);
  CHECK(s == Score::steps(-2));
  Score floor = Score::steps(std::numeric_limits<int>::min());
  CHECK(floor + Score::steps(-1) == floor);
}

TEST_CASE("text forms") {
  CHECK(to_string(Score::steps(0)) == "0");
  CHECK(to_string(Score::steps(-2)) == "-2");
  CHECK(to_string(Score::opaque()) == "Opaque");
  std::ostringstream os;
  os << Score::steps(-7) << " " << Score::opaque();
  CHECK(os.str() == "-7 Opaque");
}

TEST_CASE("opaque absorbs under addition, exhaustively over [-50, 0]") {
  for (int v = -50; v <= 0; ++v) {
    CAPTURE(v);
    CHECK(score_add(Score::steps(v), Score::opaque()).is_opaque());
    CHECK(score_add(Score::opaque(), Score::steps(v)).is_opaque());
  }
  CHECK(score_add(Score::opaque(), Score::opaque()).is_opaque());
}

TEST_CASE("addition is commutative, associative and never raises a score") {
  auto d = small_domain();
  for (Score a : d) {
    for (Score b : d) {
      CHECK(a + b == b + a);
      CHECK(a + b <= a);
      CHECK(a + b <= b);
      CHECK(a + Score::steps(0) == a);
    }
  }
  for (int a = -12; a <= 0; ++a) {
    for (int b = -12; b <= 0; ++b) {
      for (int c = -12; c <= 0; ++c) {
        Score x = Score::steps(a), y = Score::steps(b), z = Score::steps(c);
        CHECK((x + y) + z == x + (y + z));
      }
    }
  }
}
