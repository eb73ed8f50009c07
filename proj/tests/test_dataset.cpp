#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "support/synthetic.hpp"
#include "tvdiff/dataset.hpp"

using namespace tvdiff;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p);
  os << content;
  return p.string();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("load pair format, comments and blanks skipped") {
  const auto path = write_temp("tvdiff_pairs.tsv",
                               "# header comment\n"
                               "a\tx\n"
                               "\n"
                               "b\ty\n"
                               "a\tz\n");
  const auto recs = dataset::load_interactions(path, dataset::TsvFormat::kPair);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].user_id == "a");
  CHECK(recs[2].item_id == "z");
}

TEST_CASE("load rated format drops non-positive ratings") {
  const auto path = write_temp("tvdiff_rated.tsv",
                               "a\tx\t5\n"
                               "a\ty\t0\n"
                               "b\tx\t-1\n"
                               "b\tz\t2.5\n");
  const auto recs = dataset::load_interactions(path, dataset::TsvFormat::kRated);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].item_id == "x");
  CHECK(recs[1].user_id == "b");
}

TEST_CASE("malformed lines name the line number") {
  const auto path = write_temp("tvdiff_bad.tsv", "a\tx\nbroken-line\n");
  CHECK_THROWS_WITH_AS(dataset::load_interactions(path, dataset::TsvFormat::kPair),
                       doctest::Contains(":2"), std::runtime_error);
  const auto path2 = write_temp("tvdiff_bad2.tsv", "a\tx\tnot-a-number\n");
  CHECK_THROWS_AS(dataset::load_interactions(path2, dataset::TsvFormat::kRated),
                  std::runtime_error);
}

TEST_CASE("empty input refuses") {
  const auto path = write_temp("tvdiff_empty.tsv", "# nothing\n");
  CHECK_THROWS_AS(dataset::load_interactions(path, dataset::TsvFormat::kPair),
                  std::runtime_error);
}

TEST_CASE("split: 10 interactions at ratio 0.8 -> 8 train, 2 test") {
  std::vector<dataset::InteractionRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back({"u", "i" + std::to_string(i), 1.0});
  const auto ds = dataset::split_dataset(recs, 0.8, 0);
  REQUIRE(ds.m == 1);
  CHECK(ds.train_items[0].size() == 8);
  CHECK(ds.test_items[0].size() == 2);
}

TEST_CASE("split: every 1-interaction user keeps its item in train") {
  auto recs = testsupport::synthetic_records(40, 30, 1, 6, 17);
  const auto ds = dataset::split_dataset(recs, 0.8, 5);
  for (Index u = 0; u < ds.m; ++u) {
    const auto total = ds.train_items[static_cast<std::size_t>(u)].size() +
                       ds.test_items[static_cast<std::size_t>(u)].size();
    if (total == 1) {
      CHECK(ds.train_items[static_cast<std::size_t>(u)].size() == 1);
      CHECK(ds.test_items[static_cast<std::size_t>(u)].empty());
    }
  }
}

TEST_CASE("split proportions: train = max(1, floor(ratio*d)) per user") {
  const auto ds = testsupport::synthetic_dataset(60, 40, 1, 12, 0.8, 23);
  for (Index u = 0; u < ds.m; ++u) {
    const auto ui = static_cast<std::size_t>(u);
    const auto d = ds.train_items[ui].size() + ds.test_items[ui].size();
    const auto expect = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(d) + 1e-9)));
    CHECK(ds.train_items[ui].size() == expect);
  }
}

TEST_CASE("split deduplicates repeated pairs") {
  std::vector<dataset::InteractionRecord> recs = {
      {"u", "a", 1.0}, {"u", "b", 1.0}, {"u", "a", 1.0}, {"u", "a", 1.0},
      {"v", "b", 1.0}, {"v", "b", 1.0}, {"v", "c", 1.0}};
  const auto ds = dataset::split_dataset(recs, 0.8, 0);
  CHECK(ds.train_count() + ds.test_count() == 4);  // (u,a),(u,b),(v,b),(v,c)
}

TEST_CASE("split is deterministic in the seed and sensitive to it") {
  auto recs = testsupport::synthetic_records(30, 25, 2, 10, 3);
  const auto a = dataset::split_dataset(recs, 0.8, 9);
  const auto b = dataset::split_dataset(recs, 0.8, 9);
  const auto c = dataset::split_dataset(recs, 0.8, 10);
  CHECK(a.train_items == b.train_items);
  CHECK(a.test_items == b.test_items);
  CHECK(a.train_items != c.train_items);
}

TEST_CASE("train/test lists are sorted and disjoint; degrees are train-only") {
  const auto ds = testsupport::synthetic_dataset(50, 40, 1, 15, 0.8, 77);
  std::vector<Index> item_deg(static_cast<std::size_t>(ds.n), 0);
  for (Index u = 0; u < ds.m; ++u) {
    const auto ui = static_cast<std::size_t>(u);
    CHECK(std::is_sorted(ds.train_items[ui].begin(), ds.train_items[ui].end()));
    CHECK(std::is_sorted(ds.test_items[ui].begin(), ds.test_items[ui].end()));
    std::vector<Index> inter;
    std::set_intersection(ds.train_items[ui].begin(), ds.train_items[ui].end(),
                          ds.test_items[ui].begin(), ds.test_items[ui].end(),
                          std::back_inserter(inter));
    CHECK(inter.empty());
    CHECK(ds.user_degree[ui] == static_cast<Index>(ds.train_items[ui].size()));
    for (Index i : ds.train_items[ui]) ++item_deg[static_cast<std::size_t>(i)];
  }
  CHECK(ds.item_degree == item_deg);
}

TEST_CASE("fewer than two distinct interactions refuses") {
  std::vector<dataset::InteractionRecord> recs = {{"u", "a", 1.0}};
  CHECK_THROWS_AS(dataset::split_dataset(recs, 0.8, 0), std::runtime_error);
}

TEST_CASE("matrices: R_hat rows sum to 1, R binary, shared pattern") {
  const auto ds = testsupport::synthetic_dataset(20, 15, 1, 8, 0.8, 4);
  const auto mats = dataset::build_matrices(ds);
  CHECK(mats.R.nonZeros() == mats.R_hat.nonZeros());
  CHECK(mats.R.nonZeros() == mats.R_bar.nonZeros());
  for (Index u = 0; u < ds.m; ++u) {
    double row_sum = 0.0;
    for (SpMat::InnerIterator it(mats.R_hat, u); it; ++it) row_sum += it.value();
    if (ds.user_degree[static_cast<std::size_t>(u)] > 0)
      CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
    for (SpMat::InnerIterator it(mats.R, u); it; ++it) CHECK(it.value() == 1.0);
  }
}

TEST_CASE("R_bar: two users sharing an item gives 1/sqrt(2*2)") {
  auto ds = testsupport::explicit_dataset(3, {{0, 1}, {1, 2}}, {});
  const auto mats = dataset::build_matrices(ds);
  // d_u0 = 2, d_i1 = 2 -> R_bar(0,1) = 0.5
  CHECK(mats.R_bar.coeff(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("R_bar equals the dense D^-1/2 R D^-1/2 product on a random graph") {
  const auto ds = testsupport::synthetic_dataset(8, 12, 1, 6, 0.8, 31);
  const auto mats = dataset::build_matrices(ds);
  Mat dense = Mat::Zero(ds.m, ds.n);
  for (Index u = 0; u < ds.m; ++u)
    for (Index i : ds.train_items[static_cast<std::size_t>(u)]) dense(u, i) = 1.0;
  for (Index u = 0; u < ds.m; ++u)
    for (Index i = 0; i < ds.n; ++i)
      if (dense(u, i) != 0.0)
        dense(u, i) /= std::sqrt(
            static_cast<double>(ds.user_degree[static_cast<std::size_t>(u)]) *
            static_cast<double>(ds.item_degree[static_cast<std::size_t>(i)]));
  for (Index u = 0; u < ds.m; ++u)
    for (Index i = 0; i < ds.n; ++i)
      CHECK(mats.R_bar.coeff(u, i) == doctest::Approx(dense(u, i)).epsilon(1e-12));
}

TEST_CASE("save/load split round-trips ids, indices and counts") {
  const auto ds = testsupport::synthetic_dataset(25, 20, 2, 9, 0.8, 13);
  const fs::path dir = fs::temp_directory_path() / "tvdiff_split_rt";
  fs::remove_all(dir);
  dataset::save_split(ds, dir.string(), 0.8, 13, /*force=*/false);
  const auto back = dataset::load_split(dir.string());
  CHECK(back.m == ds.m);
  CHECK(back.n == ds.n);
  CHECK(back.train_items == ds.train_items);
  CHECK(back.test_items == ds.test_items);
  CHECK(back.user_ids == ds.user_ids);
  CHECK(back.item_ids == ds.item_ids);
  CHECK(back.user_degree == ds.user_degree);
  // Existing artifacts refuse without force and yield to it.
  CHECK_THROWS_AS(dataset::save_split(ds, dir.string(), 0.8, 13, false),
                  std::runtime_error);
  CHECK_NOTHROW(dataset::save_split(ds, dir.string(), 0.8, 13, true));
  fs::remove_all(dir);
}

TEST_CASE("holdout: round(fraction*d) clamped to [1, d-1], d=1 exempt") {
  const auto ds = testsupport::synthetic_dataset(60, 40, 1, 14, 0.8, 29);
  std::vector<std::vector<Index>> held;
  const auto core = dataset::holdout_validation(ds, 0.05, 0, &held);
  for (Index u = 0; u < ds.m; ++u) {
    const auto ui = static_cast<std::size_t>(u);
    const auto d = ds.train_items[ui].size();
    std::size_t expect =
        d >= 2 ? std::clamp<std::size_t>(
                     static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(d))),
                     1, d - 1)
               : 0;
    CHECK(held[ui].size() == expect);
    CHECK(core.train_items[ui].size() == d - expect);
    // Held-out items come from train and never overlap the core list.
    for (Index i : held[ui]) {
      CHECK(std::binary_search(ds.train_items[ui].begin(), ds.train_items[ui].end(), i));
      CHECK(!std::binary_search(core.train_items[ui].begin(),
                                core.train_items[ui].end(), i));
    }
  }
  CHECK(core.test_items == ds.test_items);  // test data untouched
}

TEST_CASE("is_train_positive") {
  auto ds = testsupport::explicit_dataset(5, {{1, 3}, {0}}, {});
  CHECK(ds.is_train_positive(0, 1));
  CHECK(ds.is_train_positive(0, 3));
  CHECK(!ds.is_train_positive(0, 0));
  CHECK(ds.is_train_positive(1, 0));
  CHECK(!ds.is_train_positive(1, 4));
}

}  // TEST_SUITE
