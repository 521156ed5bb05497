#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "ircx/rng.h"

using namespace ircx;

TEST_CASE("streams are reproducible and pinned across versions") {
  // Anchors freeze the generator's output; a change here silently breaks
  // every stored checkpoint and dataset.
  Rng a = stream(42, "anchor", 0);
  CHECK(a.next_u64() == 2268755843845853920ull);
  CHECK(a.next_u64() == 9853004254442585832ull);
  CHECK(a.next_u64() == 9502890715342017100ull);
  CHECK(stream(42, "anchor", 1).next_u64() == 6759444130943943654ull);
  CHECK(hash_str(1, "x") == 10867193147394213079ull);
  CHECK(hash_combine(1, 2) == 11812867941337419652ull);
}

TEST_CASE("same key gives the same stream, different keys differ") {
  Rng a = stream(5, "q", 3);
  Rng b = stream(5, "q", 3);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = stream(5, "q", 4);
  Rng d = stream(5, "r", 3);
  Rng e = stream(6, "q", 3);
  Rng base = stream(5, "q", 3);
  const uint64_t first = base.next_u64();
  CHECK(c.next_u64() != first);
  CHECK(d.next_u64() != first);
  CHECK(e.next_u64() != first);
}

TEST_CASE("uniform ranges") {
  Rng r(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = r.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
    CHECK(r.uniform_index(7) < 7);
  }
}

TEST_CASE("uniform and normal moments sit in 5-sigma bands") {
  Rng r(99);
  const int n = 20000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    su += r.uniform();
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  // mean of U(0,1): sd of the mean = 1/sqrt(12n)
  CHECK(std::abs(su / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(sn / n) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("permutation is a permutation and seed-stable") {
  Rng r(7);
  const std::vector<int> p = r.permutation(8);
  CHECK(p == std::vector<int>{1, 3, 7, 5, 4, 0, 6, 2});  // pinned

  Rng big(11);
  const std::vector<int> q = big.permutation(1000);
  std::vector<int> sorted = q;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> iota(1000);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
}
