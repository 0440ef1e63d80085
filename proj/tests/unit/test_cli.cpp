#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <sstream>

#include "builders.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "oowm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  args.insert(args.begin(), "oowm");
  std::ostringstream out, err;
  const int code = oowm::cli::run(args, out, err, [env](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = fs::temp_directory_path() / "oowm_cli_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

std::string jsonl_line(const std::string& id, const std::string& pred, const std::string& ref,
                       const std::string& paradigm = "oowm") {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["prediction"] = pred;
  j["reference"] = ref;
  j["paradigm"] = paradigm;
  return j.dump() + "\n";
}

const std::string kRef = build::activity(build::three({"clothes on bed"}, {"floor first"}, {"fold shirt"}));

}  // namespace

TEST_CASE("parse prints the AST") {
  const auto r = run({"parse", "--kind", "activity", (fixtures::root() / "diagrams" / "act_study_desk.puml").string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ok"] == true);
  CHECK(j["diagram"]["stats"]["action_count"] == 7);
}

TEST_CASE("parse reports syntax errors as data errors") {
  const auto p = temp_file("broken.puml", "@startuml\npartition \"X\" {\nstop\n@enduml");
  const auto r = run({"parse", p.string()});
  CHECK(r.code == 1);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"]["kind"] == "unbalanced_block");
}

TEST_CASE("strict mode via flag") {
  const auto p = temp_file("fork.puml", "@startuml\nfork\n:a;\n@enduml");
  CHECK(run({"parse", p.string()}).code == 0);
  CHECK(run({"parse", "--mode", "strict", p.string()}).code == 1);
}

TEST_CASE("missing input file") {
  const auto r = run({"parse", "/nonexistent/file.puml"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.err)["error"]["kind"] == "io_error");
}

TEST_CASE("validate histogram") {
  std::string lines;
  lines += R"({"id":"a","prediction":"<think>x</think><answer>y</answer>"})" "\n";
  lines += R"({"id":"b","prediction":"<think>x</think>"})" "\n";
  lines += R"({"id":"c","prediction":"plain"})" "\n";
  const auto r = run({"validate", temp_file("v.jsonl", lines).string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["n_records"] == 3);
  CHECK(j["n_well_formed"] == 1);
  CHECK(j["histogram"]["missing_answer"] == 2);
  CHECK(j["histogram"]["missing_think"] == 1);
}

TEST_CASE("reward per line") {
  const std::string lines = jsonl_line("1", build::envelope(kRef), kRef) + jsonl_line("2", "none", kRef) +
                            jsonl_line("3", build::envelope(kRef), kRef, "uml");
  const auto r = run({"reward", temp_file("r.jsonl", lines).string()});
  CHECK(r.code == 1);  // line 3 is a data error
  std::istringstream in(r.out);
  std::string l;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, l)) rows.push_back(nlohmann::json::parse(l));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["r_total"] == 2.0);
  CHECK(rows[1]["r_total"] == 0.0);
  CHECK(rows[1]["failure_cause"] == "no_envelope");
  CHECK(rows[2]["error"]["kind"] == "invalid_paradigm");
}

TEST_CASE("reward against an unreachable service exits 2") {
  const std::string lines = jsonl_line("1", build::envelope(kRef), kRef);
  const auto r = run({"reward", "--embedder", "service", "--endpoint", "http://127.0.0.1:1/embed",
                      "--retries", "1", "--backoff-ms", "1", "--timeout-ms", "200",
                      temp_file("svc.jsonl", lines).string()});
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["error"]["kind"] == "service_unavailable");
  CHECK(j["failure_cause"] == "service_error");
}

TEST_CASE("environment selects the service, flags win") {
  const std::string lines = jsonl_line("1", build::envelope(kRef), kRef);
  const auto in = temp_file("env.jsonl", lines).string();
  const std::map<std::string, std::string> env{{"OOWM_EMBEDDER", "service"},
                                               {"OOWM_ENDPOINT", "http://127.0.0.1:1/embed"},
                                               {"OOWM_RETRIES", "0"}};
  CHECK(run({"reward", in}, env).code == 2);
  CHECK(run({"reward", "--embedder", "offline", in}, env).code == 0);
}

TEST_CASE("config file through OOWM_CONFIG") {
  const auto conf = temp_file("c.conf", "threshold = 0.9\n");
  const std::string lines = jsonl_line("1", build::envelope(kRef), kRef);
  const auto corpus = temp_file("c.jsonl", lines).string();
  const auto r = run({"evaluate", "--format", "json", corpus}, {{"OOWM_CONFIG", conf.string()}});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["threshold"] == 0.9);
  const auto r2 = run({"evaluate", "--format", "json", "--threshold", "0.4", corpus}, {{"OOWM_CONFIG", conf.string()}});
  CHECK(nlohmann::json::parse(r2.out)["threshold"] == 0.4);
}

TEST_CASE("advantage and grpo-loss") {
  const auto groups = temp_file("g.jsonl", R"({"group_id":"g1","rewards":[1.0,0.5,0.0]}
{"group_id":"g2","rewards":[0.7,0.7]}
)");
  const auto r = run({"advantage", "--epsilon", "1e-4", groups.string()});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string l;
  std::getline(in, l);
  const auto g1 = nlohmann::json::parse(l);
  CHECK(g1["group_id"] == "g1");
  CHECK(std::abs(g1["advantages"][0].get<double>() - 1.224445) < 1e-5);
  std::getline(in, l);
  CHECK(nlohmann::json::parse(l)["advantages"][1] == 0.0);

  const auto samples = temp_file("s.jsonl", R"({"ratio":1.5,"advantage":1.0}
)");
  const auto loss = run({"grpo-loss", "--clip", "0.2", samples.string()});
  CHECK(loss.code == 0);
  CHECK(std::abs(nlohmann::json::parse(loss.out)["loss"].get<double>() + 1.2) < 1e-12);

  const auto tiny = temp_file("t.jsonl", R"({"group_id":"x","rewards":[1.0]}
)");
  CHECK(run({"advantage", tiny.string()}).code == 1);
}

TEST_CASE("evaluate matches the golden report") {
  const auto corpus = fixtures::root() / "corpus.jsonl";
  const auto r = run({"evaluate", "--threshold", "0.5", "--format", "json", corpus.string()});
  CHECK(r.code == 0);
  const auto got = nlohmann::json::parse(r.out);
  const auto want = nlohmann::json::parse(fixtures::read(fixtures::root() / "golden" / "corpus_report.json"));
  // Integers must agree exactly; reals to rounding, since the oracle sums in its own order.
  std::function<void(const nlohmann::json&, const nlohmann::json&, const std::string&)> same =
      [&](const nlohmann::json& a, const nlohmann::json& b, const std::string& at) {
        CAPTURE(at);
        if (b.is_number_float()) {
          REQUIRE(a.is_number());
          CHECK(std::abs(a.get<double>() - b.get<double>()) <= 1e-12);
        } else if (b.is_object()) {
          REQUIRE(a.is_object());
          CHECK(a.size() == b.size());
          for (const auto& [k, v] : b.items()) {
            REQUIRE(a.contains(k));
            same(a[k], v, at + "." + k);
          }
        } else if (b.is_array()) {
          REQUIRE(a.size() == b.size());
          for (std::size_t k = 0; k < b.size(); ++k) same(a[k], b[k], at + "[" + std::to_string(k) + "]");
        } else {
          CHECK(a == b);
        }
      };
  same(got, want, "report");
}

TEST_CASE("evaluate writes atomically to --out and report re-renders it") {
  const auto dir = fs::temp_directory_path() / "oowm_cli_tests";
  const auto out = dir / "report.json";
  fs::remove(out);
  const auto corpus = fixtures::root() / "corpus.jsonl";
  CHECK(run({"evaluate", "--out", out.string(), corpus.string()}).code == 0);
  REQUIRE(fs::exists(out));
  const auto md = run({"report", "--format", "markdown", out.string()});
  CHECK(md.code == 0);
  CHECK(md.out.starts_with("| Similarity | Precision | Recall | F1 |"));
  const auto csv = run({"report", "--format", "csv", out.string()});
  CHECK(csv.out.starts_with("scope,"));
}

TEST_CASE("help lists every configuration flag") {
  for (const char* sub : {"parse", "validate", "reward", "advantage", "grpo-loss", "evaluate", "report"}) {
    CAPTURE(sub);
    const auto r = run({sub, "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--config", "--embedder", "--endpoint", "--timeout-ms", "--retries", "--batch-size",
                             "--threshold", "--epsilon", "--clip", "--mode", "--parallelism", "--seed", "--out"})
      CHECK(r.out.find(flag) != std::string::npos);
  }
}

TEST_CASE("unknown flags are usage errors") {
  CHECK(run({"evaluate", "--bogus", "x"}).code == 1);
  CHECK(run({}).code == 1);
}
