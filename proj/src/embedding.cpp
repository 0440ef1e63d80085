#include "oowm/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

// After Eigen: httplib brings in <resolv.h>, whose `_res` macro clashes with Eigen internals.
#include "httplib.h"
#include "json.hpp"
#include "oowm/error.hpp"

namespace oowm {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw Error(ErrorKind::dimension_mismatch,
                "cosine of vectors with dimensions " + std::to_string(a.dimension()) + " and " +
                    std::to_string(b.dimension()));
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  return std::clamp(a.values.dot(b.values) / (a.norm * b.norm), -1.0, 1.0);
}

std::vector<EmbeddingVector> embed_batch(const EmbeddingProvider& provider,
                                         std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::empty_input, "embed_batch called with no texts");
  for (std::size_t i = 0; i < texts.size(); ++i)
    if (texts[i].size() > provider.max_text_length())
      throw Error(ErrorKind::text_too_long, "text " + std::to_string(i) + " exceeds " +
                                                std::to_string(provider.max_text_length()) +
                                                " bytes");
  auto out = provider.embed(texts);
  if (out.size() != texts.size())
    throw Error(ErrorKind::service_unavailable,
                provider.name() + " returned " + std::to_string(out.size()) + " vectors for " +
                    std::to_string(texts.size()) + " texts");
  for (const auto& v : out)
    if (v.dimension() != provider.dimension())
      throw Error(ErrorKind::dimension_mismatch,
                  provider.name() + " returned dimension " + std::to_string(v.dimension()) +
                      ", expected " + std::to_string(provider.dimension()));
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Offline embedder
// ---------------------------------------------------------------------------

OfflineEmbedder::OfflineEmbedder(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension_ <= 0) throw Error(ErrorKind::config_error, "embedding dimension must be positive");
}

EmbeddingVector OfflineEmbedder::embed_one(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension_);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a64(token);
    const auto index = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dimension_));
    v[index] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  // ASCII only, independent of the global locale.
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') token.push_back(static_cast<char>(c - 'A' + 'a'));
    else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) token.push_back(c);
    else flush();
  }
  flush();
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return EmbeddingVector(std::move(v));
}

std::vector<EmbeddingVector> OfflineEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// ---------------------------------------------------------------------------
// Service embedder
// ---------------------------------------------------------------------------

namespace {

struct ParsedUrl {
  std::string base;
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const std::size_t host_begin = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_begin);
  ParsedUrl out;
  if (slash == std::string::npos) {
    out.base = url;
    out.path = "/embed";
  } else {
    out.base = url.substr(0, slash);
    out.path = url.substr(slash);
  }
  if (scheme == std::string::npos) out.base = "http://" + out.base;
  return out;
}

// Transient failures are retried; a dimension mismatch is not.
struct TransientFailure {
  std::string reason;
};

}  // namespace

ServiceEmbedder::ServiceEmbedder(ServiceConfig config) : config_(std::move(config)) {
  if (config_.batch_size == 0) config_.batch_size = 1;
  if (config_.parallelism == 0) config_.parallelism = 1;
  if (config_.max_retries < 0) config_.max_retries = 0;
  auto url = split_url(config_.endpoint);
  base_ = std::move(url.base);
  path_ = std::move(url.path);
}

std::vector<EmbeddingVector> ServiceEmbedder::request_batch(std::span<const std::string> texts) const {
  nlohmann::json body;
  body["texts"] = nlohmann::json::array();
  for (const auto& t : texts) body["texts"].push_back(t);
  const std::string payload = body.dump();

  const auto timeout = config_.timeout;
  auto attempt = [&]() -> std::vector<EmbeddingVector> {
    httplib::Client client(base_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, payload, "application/json");
    if (!res) throw TransientFailure{"request failed: " + httplib::to_string(res.error())};
    if (res->status != 200) throw TransientFailure{"HTTP status " + std::to_string(res->status)};

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("embeddings") ||
        !reply["embeddings"].is_array())
      throw TransientFailure{"malformed response body"};
    const auto& rows = reply["embeddings"];
    if (rows.size() != texts.size())
      throw TransientFailure{"expected " + std::to_string(texts.size()) + " embeddings, got " +
                             std::to_string(rows.size())};
    std::vector<EmbeddingVector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_array()) throw TransientFailure{"embedding row is not an array"};
      if (static_cast<Eigen::Index>(row.size()) != config_.dimension)
        throw Error(ErrorKind::dimension_mismatch,
                    "service returned dimension " + std::to_string(row.size()) + ", expected " +
                        std::to_string(config_.dimension));
      Eigen::VectorXd v(config_.dimension);
      for (Eigen::Index k = 0; k < config_.dimension; ++k) {
        const auto& x = row[static_cast<std::size_t>(k)];
        if (!x.is_number()) throw TransientFailure{"non-numeric embedding component"};
        v[k] = x.get<double>();
      }
      out.emplace_back(std::move(v));
    }
    return out;
  };

  std::string last_reason;
  auto delay = config_.backoff;
  for (int k = 0; k <= config_.max_retries; ++k) {
    if (k > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    try {
      return attempt();
    } catch (const TransientFailure& f) {
      last_reason = f.reason;
    }
  }
  throw Error(ErrorKind::service_unavailable,
              "embedding service at " + base_ + path_ + " failed after " +
                  std::to_string(config_.max_retries + 1) + " attempts: " + last_reason);
}

std::vector<EmbeddingVector> ServiceEmbedder::embed(std::span<const std::string> texts) const {
  const std::size_t batch = config_.batch_size;
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<std::vector<EmbeddingVector>> results(n_batches);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      const std::size_t begin = b * batch;
      const std::size_t count = std::min(batch, texts.size() - begin);
      try {
        results[b] = request_batch(texts.subspan(begin, count));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t n_workers = std::min(config_.parallelism, n_batches);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 1; w < n_workers; ++w) workers.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results)
    for (auto& v : r) out.push_back(std::move(v));
  return out;
}

}  // namespace oowm
