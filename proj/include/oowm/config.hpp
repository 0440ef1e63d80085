#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "oowm/embedding.hpp"
#include "oowm/parser.hpp"

namespace oowm {

enum class EmbedderKind { offline, service };

struct RunConfig {
  EmbedderKind embedder = EmbedderKind::offline;
  ServiceConfig service;
  double threshold = 0.5;
  double epsilon = 1e-4;
  double clip_eps = 0.2;
  ParseMode parse_mode = ParseMode::lenient;
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;  // reserved; every pipeline is deterministic with the offline embedder

  /// Throws Error(config_error) when a field is out of range.
  void validate() const;
};

/// Recognized keys, shared by config files (`key = value`) and environment
/// variables (`OOWM_<KEY>` upper-cased):
///   embedder, endpoint, timeout_ms, retries, backoff_ms, batch_size,
///   dimension, threshold, epsilon, clip_eps, parse_mode, parallelism, seed
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat key/value document; '#' starts a comment. Throws config_error / io_error.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Applies every OOWM_<KEY> variable found through `lookup`.
void apply_environment(RunConfig& config, const EnvLookup& lookup);

EnvLookup process_environment();

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config);

}  // namespace oowm
