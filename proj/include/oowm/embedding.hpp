#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oowm {

inline constexpr Eigen::Index kDefaultEmbeddingDim = 384;

/// A dense embedding with its L2 norm cached.
struct EmbeddingVector {
  Eigen::VectorXd values;
  double norm = 0.0;

  EmbeddingVector() = default;
  explicit EmbeddingVector(Eigen::VectorXd v) : values(std::move(v)), norm(values.norm()) {}

  Eigen::Index dimension() const { return values.size(); }
};

/// dot(a, b) / (|a| |b|), or 0 when either vector is zero.
/// Throws Error(dimension_mismatch) on unequal dimensions.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dimension() const = 0;
  virtual bool deterministic() const = 0;
  virtual std::size_t max_text_length() const { return std::size_t{1} << 20; }

  /// One vector per text, in input order. Implementations may assume the
  /// input is non-empty and within the length limit (see embed_batch).
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
};

/// Validated entry point: rejects empty input and over-long texts, then
/// checks that the provider honoured its declared dimension.
std::vector<EmbeddingVector> embed_batch(const EmbeddingProvider& provider,
                                         std::span<const std::string> texts);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Signed feature hashing over lowercase alphanumeric tokens, L2-normalized.
/// Pure and deterministic; stands in for a sentence encoder in tests and
/// offline runs.
class OfflineEmbedder final : public EmbeddingProvider {
 public:
  explicit OfflineEmbedder(Eigen::Index dimension = kDefaultEmbeddingDim);

  std::string name() const override { return "offline"; }
  Eigen::Index dimension() const override { return dimension_; }
  bool deterministic() const override { return true; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

  EmbeddingVector embed_one(std::string_view text) const;

 private:
  Eigen::Index dimension_;
};

struct ServiceConfig {
  std::string endpoint = "http://127.0.0.1:8080/embed";
  std::chrono::milliseconds timeout{5000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{50};  // doubled after every failed attempt
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;  // batches in flight
  Eigen::Index dimension = kDefaultEmbeddingDim;
};

/// Client for an HTTP embedding service:
///   POST <endpoint>  {"texts": [...]}  ->  {"embeddings": [[...], ...]}
/// Splits input into batches, keeps up to `parallelism` batches in flight
/// and reassembles results in input order.
class ServiceEmbedder final : public EmbeddingProvider {
 public:
  explicit ServiceEmbedder(ServiceConfig config);

  std::string name() const override { return "service"; }
  Eigen::Index dimension() const override { return config_.dimension; }
  bool deterministic() const override { return false; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

  const ServiceConfig& config() const { return config_; }

 private:
  std::vector<EmbeddingVector> request_batch(std::span<const std::string> texts) const;

  ServiceConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
};

}  // namespace oowm
