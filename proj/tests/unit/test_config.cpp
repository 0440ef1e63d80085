#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "oowm/config.hpp"
#include "oowm/error.hpp"

using namespace oowm;

namespace {
EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}
}  // namespace

TEST_CASE("defaults are valid") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.threshold == 0.5);
  CHECK(c.epsilon == 1e-4);
  CHECK(c.clip_eps == 0.2);
  CHECK(c.embedder == EmbedderKind::offline);
}

TEST_CASE("settings parse and validate") {
  RunConfig c;
  apply_setting(c, "threshold", " 0.7 ");
  apply_setting(c, "embedder", "service");
  apply_setting(c, "endpoint", "http://localhost:9/embed");
  apply_setting(c, "retries", "5");
  apply_setting(c, "parallelism", "3");
  apply_setting(c, "parse_mode", "strict");
  CHECK(c.threshold == 0.7);
  CHECK(c.embedder == EmbedderKind::service);
  CHECK(c.service.max_retries == 5);
  CHECK(c.parallelism == 3);
  CHECK(c.service.parallelism == 3);
  CHECK(c.parse_mode == ParseMode::strict);
  CHECK_THROWS_AS(apply_setting(c, "threshold", "high"), Error);
  CHECK_THROWS_AS(apply_setting(c, "colour", "blue"), Error);
  CHECK_THROWS_AS(apply_setting(c, "parallelism", "0"), Error);
  c.threshold = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("file then environment") {
  const auto path = std::filesystem::temp_directory_path() / "oowm_config_test.conf";
  {
    std::ofstream f(path);
    f << "# comment\nthreshold = 0.3\nclip_eps = 0.1  # trailing\n\nseed = 9\n";
  }
  RunConfig c;
  apply_config_file(c, path);
  CHECK(c.threshold == 0.3);
  CHECK(c.clip_eps == 0.1);
  CHECK(c.seed == 9);
  apply_environment(c, env_of({{"OOWM_THRESHOLD", "0.6"}, {"OOWM_UNRELATED", "x"}}));
  CHECK(c.threshold == 0.6);
  CHECK(c.clip_eps == 0.1);
  std::filesystem::remove(path);
}

TEST_CASE("malformed config line") {
  const auto path = std::filesystem::temp_directory_path() / "oowm_config_bad.conf";
  {
    std::ofstream f(path);
    f << "threshold 0.3\n";
  }
  RunConfig c;
  CHECK_THROWS_AS(apply_config_file(c, path), Error);
  std::filesystem::remove(path);
}

TEST_CASE("provider selection") {
  RunConfig c;
  CHECK(make_provider(c)->name() == "offline");
  c.embedder = EmbedderKind::service;
  CHECK(make_provider(c)->name() == "service");
}
