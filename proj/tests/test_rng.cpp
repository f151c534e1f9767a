#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qcse/rng.hpp"

using namespace qcse;

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(124);
  bool all_same = true;
  Rng a2(123);
  for (int i = 0; i < 100; ++i) all_same &= (a2.next_u64() == c.next_u64());
  CHECK_FALSE(all_same);
}

TEST_CASE("named sub-streams are independent of parent draws") {
  Rng a(7);
  const std::uint64_t before = a.sub("env").next_u64();
  a.next_u64();  // consume from the parent
  a.next_u64();
  const std::uint64_t after = a.sub("env").next_u64();
  CHECK(before == after);
  CHECK(a.sub("env").next_u64() != a.sub("init").next_u64());
  CHECK(a.sub("eval", 0).next_u64() != a.sub("eval", 1).next_u64());
}

TEST_CASE("uniform and normal have sane ranges and moments") {
  Rng rng(99);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));

  double nsum = 0.0, nsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    CHECK(std::isfinite(z));
    nsum += z;
    nsum2 += z * z;
  }
  CHECK(std::abs(nsum / n) < 0.02);
  CHECK(nsum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_int stays in range and rejects bad input") {
  Rng rng(5);
  int counts[7] = {0};
  for (int i = 0; i < 70000; ++i) {
    const int v = rng.uniform_int(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 9000);
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}
