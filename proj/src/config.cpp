#include "oowm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "oowm/error.hpp"
#include "oowm/io.hpp"
#include "text_util.hpp"

namespace oowm {

namespace {

constexpr std::string_view kKeys[] = {"embedder",   "endpoint",  "timeout_ms", "retries",
                                      "backoff_ms", "batch_size", "dimension", "threshold",
                                      "epsilon",    "clip_eps",  "parse_mode", "parallelism",
                                      "seed"};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::config_error,
              "invalid value \"" + std::string(value) + "\" for " + std::string(key));
}

double to_double(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) bad_value(key, value);
  return v;
}

long long to_integer(std::string_view key, std::string_view value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config_error, msg); };
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail("threshold must lie in [0, 1]");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) fail("clip_eps must lie in (0, 1)");
  if (parallelism < 1) fail("parallelism must be at least 1");
  if (service.timeout.count() <= 0) fail("timeout_ms must be positive");
  if (service.max_retries < 0) fail("retries must be non-negative");
  if (service.batch_size < 1) fail("batch_size must be at least 1");
  if (service.dimension < 1) fail("dimension must be at least 1");
  if (embedder == EmbedderKind::service && service.endpoint.empty()) fail("endpoint is required for the service embedder");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = detail::trim(raw);
  if (key == "embedder") {
    if (value == "offline") c.embedder = EmbedderKind::offline;
    else if (value == "service") c.embedder = EmbedderKind::service;
    else bad_value(key, value);
  } else if (key == "endpoint") {
    c.service.endpoint = std::string(value);
  } else if (key == "timeout_ms") {
    c.service.timeout = std::chrono::milliseconds(to_integer(key, value));
  } else if (key == "retries") {
    c.service.max_retries = static_cast<int>(to_integer(key, value));
  } else if (key == "backoff_ms") {
    c.service.backoff = std::chrono::milliseconds(to_integer(key, value));
  } else if (key == "batch_size") {
    const auto v = to_integer(key, value);
    if (v < 1) bad_value(key, value);
    c.service.batch_size = static_cast<std::size_t>(v);
  } else if (key == "dimension") {
    c.service.dimension = static_cast<Eigen::Index>(to_integer(key, value));
  } else if (key == "threshold") {
    c.threshold = to_double(key, value);
  } else if (key == "epsilon") {
    c.epsilon = to_double(key, value);
  } else if (key == "clip_eps") {
    c.clip_eps = to_double(key, value);
  } else if (key == "parse_mode") {
    if (value == "strict") c.parse_mode = ParseMode::strict;
    else if (value == "lenient") c.parse_mode = ParseMode::lenient;
    else bad_value(key, value);
  } else if (key == "parallelism") {
    const auto v = to_integer(key, value);
    if (v < 1) bad_value(key, value);
    c.parallelism = static_cast<std::size_t>(v);
    c.service.parallelism = c.parallelism;
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_integer(key, value));
  } else {
    throw Error(ErrorKind::config_error, "unknown configuration key \"" + std::string(key) + "\"");
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::config_error,
                  path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    apply_setting(config, detail::trim(view.substr(0, eq)), view.substr(eq + 1));
  }
}

void apply_environment(RunConfig& config, const EnvLookup& lookup) {
  for (auto key : kKeys) {
    std::string name = "OOWM_";
    for (char ch : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (auto v = lookup(name)) apply_setting(config, key, *v);
  }
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config) {
  if (config.embedder == EmbedderKind::service)
    return std::make_unique<ServiceEmbedder>(config.service);
  return std::make_unique<OfflineEmbedder>(kDefaultEmbeddingDim);
}

}  // namespace oowm
