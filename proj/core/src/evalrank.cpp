#include "tvdiff/evalrank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvdiff::evalrank {

std::vector<Index> topk_row(const Eigen::Ref<const Eigen::RowVectorXd>& scores,
                            int k, const std::vector<Index>& mask) {
  // (score desc, index asc) comparison; heaping with `better` as the
  // less-than predicate keeps the weakest retained candidate at the front.
  const auto better = [&](Index lhs, Index rhs) {
    if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
    return lhs < rhs;
  };

  std::vector<Index> heap;
  heap.reserve(static_cast<std::size_t>(k));
  std::size_t mask_pos = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (mask_pos < mask.size() && mask[mask_pos] == i) {
      ++mask_pos;
      continue;
    }
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(i);
      std::push_heap(heap.begin(), heap.end(), better);
    } else if (better(i, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), better);
      heap.back() = i;
      std::push_heap(heap.begin(), heap.end(), better);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), better);
  return heap;
}

double recall_at_k(const std::vector<Index>& topk,
                   const std::vector<Index>& test_items, int k) {
  if (test_items.empty())
    throw std::runtime_error("recall_at_k: empty test set (user must be excluded)");
  int hits = 0;
  for (int r = 0; r < k && r < static_cast<int>(topk.size()); ++r)
    if (std::binary_search(test_items.begin(), test_items.end(),
                           topk[static_cast<std::size_t>(r)]))
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(test_items.size());
}

double ndcg_at_k(const std::vector<Index>& topk,
                 const std::vector<Index>& test_items, int k) {
  if (test_items.empty())
    throw std::runtime_error("ndcg_at_k: empty test set (user must be excluded)");
  double dcg = 0.0;
  for (int r = 0; r < k && r < static_cast<int>(topk.size()); ++r)
    if (std::binary_search(test_items.begin(), test_items.end(),
                           topk[static_cast<std::size_t>(r)]))
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);

  const int ideal = std::min<int>(k, static_cast<int>(test_items.size()));
  double idcg = 0.0;
  for (int r = 0; r < ideal; ++r)
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

const RankingResult::Aggregate& RankingResult::at_k(int k) const {
  for (const auto& a : aggregates)
    if (a.k == k) return a;
  throw std::runtime_error("no aggregate for requested k");
}

RankingResult evaluate(const SlabScorer& scorer, Index m,
                       const IndexRows& train_items, const IndexRows& test_items,
                       const std::vector<int>& ks, Index slab_rows) {
  if (ks.empty()) throw std::runtime_error("evaluate: no k values requested");
  const int k_max = *std::max_element(ks.begin(), ks.end());

  RankingResult out;
  for (int k : ks) out.aggregates.push_back({k, 0.0, 0.0, 0});

  for (Index start = 0; start < m; start += slab_rows) {
    const Index len = std::min(slab_rows, m - start);
    const Mat scores = scorer(start, len);
    if (scores.rows() != len)
      throw std::runtime_error("evaluate: scorer returned wrong slab height");

    for (Index b = 0; b < len; ++b) {
      const auto u = static_cast<std::size_t>(start + b);
      if (test_items[u].empty()) continue;  // excluded, not zero-scored
      const std::vector<Index> topk = topk_row(scores.row(b), k_max, train_items[u]);
      for (auto& agg : out.aggregates) {
        agg.recall += recall_at_k(topk, test_items[u], agg.k);
        agg.ndcg += ndcg_at_k(topk, test_items[u], agg.k);
        ++agg.users_evaluated;
      }
    }
  }

  for (auto& agg : out.aggregates) {
    if (agg.users_evaluated == 0)
      throw std::runtime_error("evaluate: no users with test interactions");
    agg.recall /= static_cast<double>(agg.users_evaluated);
    agg.ndcg /= static_cast<double>(agg.users_evaluated);
  }
  return out;
}

RankingResult evaluate(const Mat& scores, const IndexRows& train_items,
                       const IndexRows& test_items, const std::vector<int>& ks) {
  return evaluate(
      [&](Index start, Index len) -> Mat {
        return scores.middleRows(start, len);
      },
      scores.rows(), train_items, test_items, ks, scores.rows());
}

}  // namespace tvdiff::evalrank
