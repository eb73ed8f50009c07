#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "tvdiff/rng.hpp"

using namespace tvdiff;

TEST_SUITE("rng") {

TEST_CASE("same seed, same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are independent of call order") {
  Rng a = Rng::derive(7, Stream::kSplit, 3);
  Rng b = Rng::derive(7, Stream::kParamInit, 3);
  Rng a2 = Rng::derive(7, Stream::kSplit, 3);
  CHECK(a.next_u64() != b.next_u64());
  CHECK(a2.next_u64() == Rng::derive(7, Stream::kSplit, 3).next_u64());
}

TEST_CASE("distinct keys give distinct streams") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t k = 0; k < 100; ++k)
    firsts.insert(Rng::derive(0, Stream::kSplit, k).next_u64());
  CHECK(firsts.size() == 100);
}

TEST_CASE("uniform01 stays in [0,1), open variant in (0,1)") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_open01();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform_below covers the range without bias at small bounds") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[rng.uniform_below(7)];
  for (int c : counts) CHECK(std::abs(c - draws / 7) < 600);  // ~6 sigma
}

TEST_CASE("normal moments") {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gumbel moments (mean ~ Euler-Mascheroni, var ~ pi^2/6)") {
  Rng rng(9);
  double sum = 0.0, sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.gumbel();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  CHECK(std::abs(mean - 0.5772156649) < 0.02);
  CHECK(std::abs(var - M_PI * M_PI / 6.0) < 0.05);
}

TEST_CASE("shuffle is a permutation and deterministic") {
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng a(11), b(11);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

}  // TEST_SUITE
