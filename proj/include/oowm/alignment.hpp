#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <tuple>
#include <vector>

#include "oowm/embedding.hpp"

namespace oowm {

struct MatchedPair {
  Eigen::Index pred_index = 0;
  Eigen::Index ref_index = 0;
  double similarity = 0.0;

  bool operator==(const MatchedPair&) const = default;
};

struct MatchSet {
  std::vector<MatchedPair> pairs;  // in selection order
  std::vector<Eigen::Index> unmatched_pred;
  std::vector<Eigen::Index> unmatched_ref;

  bool operator==(const MatchSet&) const = default;
};

/// Pairwise cosine similarities, rows = predictions, columns = references.
Eigen::MatrixXd similarity_matrix(const std::vector<EmbeddingVector>& pred,
                                  const std::vector<EmbeddingVector>& ref);

/// Greedy assignment on a similarity matrix: repeatedly take the highest
/// remaining entry whose row and column are both free, until one side is
/// exhausted. Ties go to the smaller row, then the smaller column.
template <typename Derived>
MatchSet greedy_match(const Eigen::MatrixBase<Derived>& sim) {
  const Eigen::Index rows = sim.rows();
  const Eigen::Index cols = sim.cols();

  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(rows * cols));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) order.emplace_back(sim(i, j), i, j);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  std::vector<bool> row_used(static_cast<std::size_t>(rows), false);
  std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
  MatchSet out;
  const Eigen::Index target = std::min(rows, cols);
  for (const auto& [s, i, j] : order) {
    if (static_cast<Eigen::Index>(out.pairs.size()) == target) break;
    if (row_used[static_cast<std::size_t>(i)] || col_used[static_cast<std::size_t>(j)]) continue;
    row_used[static_cast<std::size_t>(i)] = true;
    col_used[static_cast<std::size_t>(j)] = true;
    out.pairs.push_back({i, j, s});
  }
  for (Eigen::Index i = 0; i < rows; ++i)
    if (!row_used[static_cast<std::size_t>(i)]) out.unmatched_pred.push_back(i);
  for (Eigen::Index j = 0; j < cols; ++j)
    if (!col_used[static_cast<std::size_t>(j)]) out.unmatched_ref.push_back(j);
  return out;
}

/// Greedy matching of embedded node sets; either side may be empty.
MatchSet greedy_match(const std::vector<EmbeddingVector>& pred,
                      const std::vector<EmbeddingVector>& ref);

/// Mean of similarities clamped to [0, 1] over matched pairs; 0 when nothing matched.
double partition_reward(const MatchSet& match);

/// Sum of raw similarities over matched pairs.
double matched_weight(const MatchSet& match);

}  // namespace oowm
