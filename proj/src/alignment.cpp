#include "oowm/alignment.hpp"

namespace oowm {

Eigen::MatrixXd similarity_matrix(const std::vector<EmbeddingVector>& pred,
                                  const std::vector<EmbeddingVector>& ref) {
  const auto rows = static_cast<Eigen::Index>(pred.size());
  const auto cols = static_cast<Eigen::Index>(ref.size());
  Eigen::MatrixXd sim(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      sim(i, j) = cosine(pred[static_cast<std::size_t>(i)], ref[static_cast<std::size_t>(j)]);
  return sim;
}

MatchSet greedy_match(const std::vector<EmbeddingVector>& pred,
                      const std::vector<EmbeddingVector>& ref) {
  return greedy_match(similarity_matrix(pred, ref));
}

double partition_reward(const MatchSet& match) {
  if (match.pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : match.pairs) sum += std::clamp(p.similarity, 0.0, 1.0);
  return sum / static_cast<double>(match.pairs.size());
}

double matched_weight(const MatchSet& match) {
  double sum = 0.0;
  for (const auto& p : match.pairs) sum += p.similarity;
  return sum;
}

}  // namespace oowm
