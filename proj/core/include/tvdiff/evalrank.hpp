#pragma once

#include <functional>
#include <vector>

#include "tvdiff/types.hpp"

namespace tvdiff::evalrank {

// Top-k item indices by descending score, ties broken by ascending index.
// Items listed in `mask` (sorted) are excluded before selection.
std::vector<Index> topk_row(const Eigen::Ref<const Eigen::RowVectorXd>& scores,
                            int k, const std::vector<Index>& mask);

// |topk intersect test| / |test|; test_items must be sorted.
double recall_at_k(const std::vector<Index>& topk,
                   const std::vector<Index>& test_items, int k);

// DCG with gain 1/log2(rank+1) over hits; IDCG truncates at min(k, |test|).
double ndcg_at_k(const std::vector<Index>& topk,
                 const std::vector<Index>& test_items, int k);

struct RankingResult {
  struct Aggregate {
    int k = 0;
    double recall = 0.0;
    double ndcg = 0.0;
    Index users_evaluated = 0;
  };
  std::vector<Aggregate> aggregates;  // one per requested k

  const Aggregate& at_k(int k) const;
};

// Scores for rows [start, start+len) of the user axis, written into a
// len x n matrix. Slab-wise scoring keeps full-catalog evaluation within a
// bounded memory footprint.
using SlabScorer = std::function<Mat(Index start, Index len)>;

// Masks each user's train items, takes deterministic top-k lists and averages
// Recall/NDCG over users with non-empty test sets.
RankingResult evaluate(const SlabScorer& scorer, Index m,
                       const IndexRows& train_items, const IndexRows& test_items,
                       const std::vector<int>& ks, Index slab_rows = 512);

// Convenience overload for an already materialized score matrix.
RankingResult evaluate(const Mat& scores, const IndexRows& train_items,
                       const IndexRows& test_items, const std::vector<int>& ks);

}  // namespace tvdiff::evalrank
