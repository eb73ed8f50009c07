#pragma once

// Shared helpers for building random or hand-specified corpora in tests and
// benchmarks.

#include <algorithm>
#include <string>
#include <vector>

#include "tvdiff/dataset.hpp"
#include "tvdiff/rng.hpp"

namespace tvdiff::testsupport {

// Random interaction records over m users and n items: each user interacts
// with between min_deg and max_deg distinct items (clamped to n). Feed the
// result to dataset::split_dataset.
inline std::vector<dataset::InteractionRecord> synthetic_records(
    Index m, Index n, Index min_deg, Index max_deg, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, Stream::kSynthetic);
  std::vector<dataset::InteractionRecord> records;
  std::vector<Index> items(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i;
  for (Index u = 0; u < m; ++u) {
    Index deg = min_deg + static_cast<Index>(rng.uniform_below(
                              static_cast<std::uint64_t>(max_deg - min_deg + 1)));
    if (deg > n) deg = n;
    rng.shuffle(items);
    for (Index k = 0; k < deg; ++k)
      records.push_back({"u" + std::to_string(u),
                         "i" + std::to_string(items[static_cast<std::size_t>(k)]),
                         1.0});
  }
  return records;
}

// A dataset assembled directly from explicit per-user item lists (already
// internal indices). Lists are sorted; degrees and id maps are filled in.
inline dataset::InteractionDataset explicit_dataset(Index n, IndexRows train,
                                                    IndexRows test) {
  dataset::InteractionDataset ds;
  ds.m = static_cast<Index>(train.size());
  ds.n = n;
  if (test.empty()) test.assign(train.size(), {});
  for (auto& row : train) std::sort(row.begin(), row.end());
  for (auto& row : test) std::sort(row.begin(), row.end());
  ds.train_items = std::move(train);
  ds.test_items = std::move(test);
  ds.user_degree.assign(static_cast<std::size_t>(ds.m), 0);
  ds.item_degree.assign(static_cast<std::size_t>(ds.n), 0);
  for (Index u = 0; u < ds.m; ++u) {
    const auto& row = ds.train_items[static_cast<std::size_t>(u)];
    ds.user_degree[static_cast<std::size_t>(u)] = static_cast<Index>(row.size());
    for (Index i : row) ++ds.item_degree[static_cast<std::size_t>(i)];
  }
  for (Index u = 0; u < ds.m; ++u) {
    ds.user_ids.push_back("u" + std::to_string(u));
    ds.user_index[ds.user_ids.back()] = u;
  }
  for (Index i = 0; i < ds.n; ++i) {
    ds.item_ids.push_back("i" + std::to_string(i));
    ds.item_index[ds.item_ids.back()] = i;
  }
  return ds;
}

// Random split dataset in one call.
inline dataset::InteractionDataset synthetic_dataset(Index m, Index n,
                                                     Index min_deg, Index max_deg,
                                                     double ratio,
                                                     std::uint64_t seed) {
  return dataset::split_dataset(synthetic_records(m, n, min_deg, max_deg, seed),
                                ratio, seed);
}

}  // namespace tvdiff::testsupport
