#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvdiff/types.hpp"

namespace tvdiff::dataset {

struct InteractionRecord {
  std::string user_id;
  std::string item_id;
  double rating = 1.0;  // discarded after binarization
};

enum class TsvFormat {
  kPair,   // user<TAB>item
  kRated,  // user<TAB>item<TAB>rating; rating <= 0 drops the record
};

// Binarized, split interaction data. Internal indices are dense and assigned
// by first appearance in the input; id vectors map back to external tokens.
struct InteractionDataset {
  Index m = 0;  // users
  Index n = 0;  // items
  std::vector<std::vector<Index>> train_items;  // per user, sorted ascending
  std::vector<std::vector<Index>> test_items;   // per user, sorted ascending
  std::vector<Index> user_degree;               // train-only degree d_u
  std::vector<Index> item_degree;               // train-only degree d_i
  std::vector<std::string> user_ids;            // internal -> external
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, Index> user_index;  // external -> internal
  std::unordered_map<std::string, Index> item_index;

  Index train_count() const;
  Index test_count() const;
  bool is_train_positive(Index u, Index i) const;  // binary search
};

// R: binary interactions; R_hat = D_U^-1 R (row-stochastic); R_bar with
// entries 1/sqrt(d_u d_i). All three share one sparsity pattern (train only).
struct BipartiteMatrices {
  SpMat R;
  SpMat R_hat;
  SpMat R_bar;
};

// Parses a UTF-8 TSV line by line; '#'-prefixed lines and blank lines are
// skipped. Malformed lines raise std::runtime_error naming the line number.
std::vector<InteractionRecord> load_interactions(const std::string& path,
                                                 TsvFormat format);

// Per-user random split: each user's deduplicated items are shuffled with a
// stream derived from (seed, user index) and the first floor(ratio*d) of them
// (at least 1) become train items. Deterministic given (records, ratio, seed).
InteractionDataset split_dataset(const std::vector<InteractionRecord>& records,
                                 double ratio, std::uint64_t seed);

BipartiteMatrices build_matrices(const InteractionDataset& ds);

// Canonical split artifacts: train.tsv / test.tsv (internal "u<TAB>i" rows),
// meta (flat key = value), user_map.tsv / item_map.tsv (internal -> external).
void save_split(const InteractionDataset& ds, const std::string& dir,
                double ratio, std::uint64_t seed, bool force);
InteractionDataset load_split(const std::string& dir);

// Derives a reduced dataset whose train lists drop a per-user validation
// holdout (round(fraction*d_u) items, clamped to [1, d_u-1] when d_u >= 2);
// held-out items are returned per user. Used for early-stopping monitors so
// test data never influences training.
InteractionDataset holdout_validation(const InteractionDataset& ds,
                                      double fraction, std::uint64_t seed,
                                      std::vector<std::vector<Index>>* held_out);

}  // namespace tvdiff::dataset
