#include "oowm/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "oowm/envelope.hpp"
#include "oowm/error.hpp"
#include "oowm/eval.hpp"
#include "oowm/grpo.hpp"
#include "oowm/io.hpp"
#include "oowm/json_io.hpp"
#include "oowm/parser.hpp"
#include "oowm/reward.hpp"

namespace oowm::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Flags shared by every subcommand; unset ones leave file/environment values alone.
struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> embedder;
  std::optional<std::string> endpoint;
  std::optional<long long> timeout_ms;
  std::optional<long long> retries;
  std::optional<long long> backoff_ms;
  std::optional<long long> batch_size;
  std::optional<double> threshold;
  std::optional<double> epsilon;
  std::optional<double> clip;
  std::optional<std::string> mode;
  std::optional<long long> parallelism;
  std::optional<long long> seed;
  std::string out;
};

void add_common_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Flat key = value config file (also OOWM_CONFIG)");
  app->add_option("--embedder", f.embedder, "Embedding provider: offline | service")
      ->check(CLI::IsMember({"offline", "service"}));
  app->add_option("--endpoint", f.endpoint, "Embedding service URL, POST {\"texts\": [...]}");
  app->add_option("--timeout-ms", f.timeout_ms, "Per-request timeout of the embedding service");
  app->add_option("--retries", f.retries, "Retries after a failed embedding request");
  app->add_option("--backoff-ms", f.backoff_ms, "Initial retry delay, doubled after each failure");
  app->add_option("--batch-size", f.batch_size, "Texts per embedding request");
  app->add_option("--threshold", f.threshold, "Similarity threshold for a true positive [0, 1]");
  app->add_option("--epsilon", f.epsilon, "Advantage denominator epsilon (> 0)");
  app->add_option("--clip", f.clip, "Ratio clip range epsilon in (0, 1)");
  app->add_option("--mode", f.mode, "Diagram parse mode: strict | lenient")
      ->check(CLI::IsMember({"strict", "lenient"}));
  app->add_option("--parallelism", f.parallelism, "Worker threads and in-flight embedding batches");
  app->add_option("--seed", f.seed, "Reserved; all pipelines are deterministic");
  app->add_option("--out", f.out, "Write results to FILE (atomically) instead of stdout");
}

RunConfig resolve_config(const CommonFlags& f, const EnvLookup& env) {
  RunConfig c;
  std::optional<std::string> file = f.config;
  if (!file) file = env("OOWM_CONFIG");
  if (file) apply_config_file(c, *file);
  apply_environment(c, env);
  if (f.embedder) apply_setting(c, "embedder", *f.embedder);
  if (f.endpoint) apply_setting(c, "endpoint", *f.endpoint);
  if (f.timeout_ms) apply_setting(c, "timeout_ms", std::to_string(*f.timeout_ms));
  if (f.retries) apply_setting(c, "retries", std::to_string(*f.retries));
  if (f.backoff_ms) apply_setting(c, "backoff_ms", std::to_string(*f.backoff_ms));
  if (f.batch_size) apply_setting(c, "batch_size", std::to_string(*f.batch_size));
  if (f.threshold) c.threshold = *f.threshold;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.clip) c.clip_eps = *f.clip;
  if (f.mode) apply_setting(c, "parse_mode", *f.mode);
  if (f.parallelism) apply_setting(c, "parallelism", std::to_string(*f.parallelism));
  if (f.seed) apply_setting(c, "seed", std::to_string(*f.seed));
  c.validate();
  return c;
}

class Output {
 public:
  Output(std::ostream& out, std::string path) : out_(out), path_(std::move(path)) {}
  void write(const std::string& text) const {
    if (path_.empty()) out_ << text;
    else write_file_atomic(path_, text);
  }

 private:
  std::ostream& out_;
  std::string path_;
};

void report_error(std::ostream& err, std::string_view kind, std::string_view message,
                  const ojson& extra = ojson::object()) {
  ojson j;
  j["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

std::vector<std::pair<int, nlohmann::json>> read_jsonl(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<int, nlohmann::json>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::schema_error, path + ":" + std::to_string(line_no) + ": not a JSON object");
    out.emplace_back(line_no, std::move(j));
  }
  return out;
}

std::string field_string(const nlohmann::json& j, const char* name, const std::string& where) {
  if (!j.contains(name) || !j[name].is_string())
    throw Error(ErrorKind::schema_error, where + ": missing string field '" + name + "'");
  return j[name].get<std::string>();
}

double field_number(const nlohmann::json& j, const char* name, const std::string& where) {
  if (!j.contains(name) || !j[name].is_number())
    throw Error(ErrorKind::schema_error, where + ": missing numeric field '" + name + "'");
  return j[name].get<double>();
}

// --------------------------------------------------------------------------
// Subcommands
// --------------------------------------------------------------------------

int cmd_parse(const std::string& kind, const std::string& file, const RunConfig& config,
              const Output& out, std::ostream& err) {
  const std::string src = read_file(file);
  ojson j;
  auto finish = [&](const auto& result) {
    if (!result) {
      ojson e;
      e["ok"] = false;
      e["error"] = to_json(result.error());
      err << e.dump() << '\n';
      return kDataError;
    }
    j["ok"] = true;
    j["diagram"] = to_json(result.value());
    ojson warnings = ojson::array();
    for (const auto& w : result.warnings) warnings.push_back({{"line", w.line}, {"message", w.message}});
    j["warnings"] = std::move(warnings);
    out.write(j.dump(2) + "\n");
    return kSuccess;
  };
  if (kind == "class") return finish(parse_class(src, config.parse_mode));
  return finish(parse_activity(src, config.parse_mode));
}

int cmd_validate(const std::string& file, const Output& out) {
  std::istringstream in(read_file(file));
  static constexpr EnvelopeDefect all[] = {EnvelopeDefect::missing_think, EnvelopeDefect::missing_answer,
                                           EnvelopeDefect::unclosed_tag, EnvelopeDefect::interleaved_tags,
                                           EnvelopeDefect::duplicate_tag};
  std::map<EnvelopeDefect, long> histogram;
  ojson records = ojson::array();
  ojson rejects = ojson::array();
  long n = 0, well = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("prediction") || !j["prediction"].is_string()) {
      rejects.push_back({{"line", line_no}, {"message", "expected an object with a string 'prediction'"}});
      continue;
    }
    const Envelope env = split_envelope(j["prediction"].get<std::string>());
    ++n;
    if (env.well_formed) ++well;
    for (auto d : env.defects) ++histogram[d];
    ojson r;
    r["line"] = line_no;
    if (j.contains("id")) r["id"] = j["id"];
    r["well_formed"] = env.well_formed;
    ojson defects = ojson::array();
    for (auto d : env.defects) defects.push_back(std::string(to_string(d)));
    r["defects"] = std::move(defects);
    records.push_back(std::move(r));
  }
  ojson result;
  result["n_records"] = n;
  result["n_well_formed"] = well;
  ojson h = ojson::object();
  for (auto d : all) h[std::string(to_string(d))] = histogram[d];
  result["histogram"] = std::move(h);
  result["records"] = std::move(records);
  result["rejects"] = rejects;
  out.write(result.dump(2) + "\n");
  return rejects.empty() ? kSuccess : kDataError;
}

int cmd_reward(const std::string& in_path, const std::string& out_path,
               const std::optional<std::string>& paradigm_flag, bool explain,
               const RunConfig& config, const Output& stdout_output, std::ostream& err) {
  const auto provider = make_provider(config);
  std::optional<Paradigm> forced;
  if (paradigm_flag) forced = paradigm_from_string(*paradigm_flag);

  std::string text;
  bool data_error = false;
  for (const auto& [line_no, j] : read_jsonl(in_path)) {
    const std::string where = in_path + ":" + std::to_string(line_no);
    ojson line;
    if (j.contains("id")) line["id"] = j["id"];
    try {
      RewardRequest req;
      req.prediction_raw = field_string(j, "prediction", where);
      req.reference_control = field_string(j, "reference", where);
      if (forced) req.paradigm = *forced;
      else if (j.contains("paradigm")) req.paradigm = paradigm_from_string(field_string(j, "paradigm", where));
      const RewardBreakdown r = compute_reward(req, *provider);
      const ojson body = to_json(r, explain);
      for (const auto& [k, v] : body.items()) line[k] = v;
    } catch (const Error& e) {
      if (is_infrastructure(e.kind())) {
        ojson extra;
        extra["failure_cause"] = "service_error";
        if (j.contains("id")) extra["id"] = j["id"];
        extra["line"] = line_no;
        report_error(err, to_string(e.kind()), e.what(), extra);
        return kServiceError;
      }
      data_error = true;
      line["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
    text += line.dump() + "\n";
  }
  if (out_path.empty()) stdout_output.write(text);
  else write_file_atomic(out_path, text);
  return data_error ? kDataError : kSuccess;
}

int cmd_advantage(const std::string& path, const RunConfig& config, const Output& out) {
  std::string text;
  for (const auto& [line_no, j] : read_jsonl(path)) {
    const std::string where = path + ":" + std::to_string(line_no);
    RewardGroup g;
    if (j.contains("group_id")) g.group_id = j["group_id"].is_string() ? j["group_id"].get<std::string>() : j["group_id"].dump();
    if (!j.contains("rewards") || !j["rewards"].is_array())
      throw Error(ErrorKind::schema_error, where + ": missing array field 'rewards'");
    for (const auto& r : j["rewards"]) {
      if (!r.is_number()) throw Error(ErrorKind::non_finite_reward, where + ": non-numeric reward");
      g.rewards.push_back(r.get<double>());
    }
    g.epsilon = config.epsilon;
    AdvantageBatch batch;
    try {
      batch = group_advantages(g);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
    ojson line;
    line["group_id"] = g.group_id;
    line["advantages"] = std::vector<double>(batch.advantages.data(), batch.advantages.data() + batch.advantages.size());
    line["mu"] = batch.mu;
    line["sigma"] = batch.sigma;
    text += line.dump() + "\n";
  }
  out.write(text);
  return kSuccess;
}

int cmd_grpo_loss(const std::string& path, const RunConfig& config, const Output& out) {
  std::vector<PolicyRatioSample> samples;
  for (const auto& [line_no, j] : read_jsonl(path)) {
    const std::string where = path + ":" + std::to_string(line_no);
    const double advantage = field_number(j, "advantage", where);
    if (j.contains("ratio")) {
      samples.push_back({field_number(j, "ratio", where), advantage});
    } else {
      samples.push_back(PolicyRatioSample::from_log_probs(field_number(j, "log_prob", where),
                                                          field_number(j, "old_log_prob", where), advantage));
    }
  }
  ojson result;
  result["loss"] = grpo_loss(samples, config.clip_eps);
  result["n_samples"] = samples.size();
  result["clip"] = config.clip_eps;
  out.write(result.dump() + "\n");
  return kSuccess;
}

int cmd_evaluate(const std::string& path, const std::string& format, bool macro,
                 const RunConfig& config, const Output& out) {
  const Corpus corpus = load_corpus(path);
  const auto provider = make_provider(config);
  EvalOptions options;
  options.threshold = config.threshold;
  options.parse_mode = config.parse_mode;
  const CorpusEvaluation evaluation = evaluate_corpus(corpus.records, *provider, options, config.parallelism);
  MetricsReport report = aggregate(evaluation.records, macro ? Averaging::macro : Averaging::micro, config.threshold);
  for (const auto& r : corpus.rejects)
    report.rejected.push_back({"line " + std::to_string(r.line), "schema_error", r.message});
  for (const auto& r : evaluation.rejected) report.rejected.push_back(r);
  out.write(render_report(report, *report_format_from_string(format)));
  return report.rejected.empty() ? kSuccess : kDataError;
}

int cmd_report(const std::string& path, const std::string& format, const Output& out) {
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::schema_error, path + " is not valid JSON");
  out.write(render_report(report_from_json(j), *report_format_from_string(format)));
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Symbolic world-model toolkit: PlantUML plan parsing, rewards, GRPO math and evaluation", "oowm"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* parse = app.add_subcommand("parse", "Parse a PlantUML diagram and print its JSON AST");
  std::string kind = "activity";
  std::string parse_file;
  parse->add_option("--kind", kind, "Diagram kind: activity | class")->check(CLI::IsMember({"activity", "class"}));
  parse->add_option("FILE", parse_file, "PlantUML source")->required();
  add_common_flags(parse, flags);

  auto* validate = app.add_subcommand("validate", "Check <think>/<answer> envelopes of a JSONL file");
  std::string validate_file;
  validate->add_option("FILE", validate_file, "JSONL records with a 'prediction' field")->required();
  add_common_flags(validate, flags);

  auto* reward = app.add_subcommand("reward", "Compute r_struct + r_semantic per JSONL record");
  std::optional<std::string> paradigm;
  bool explain = false;
  std::string reward_in, reward_out;
  reward->add_option("--paradigm", paradigm, "Force the paradigm: oowm | text (default: per record, else oowm)")
      ->check(CLI::IsMember({"oowm", "text"}));
  reward->add_flag("--explain", explain, "Include the per-partition match sets");
  reward->add_option("IN", reward_in, "JSONL records: prediction, reference, optional id/paradigm")->required();
  reward->add_option("OUT", reward_out, "Output JSONL (default: stdout or --out)");
  add_common_flags(reward, flags);

  auto* advantage = app.add_subcommand("advantage", "Group-normalized advantages per JSONL reward group");
  std::string advantage_file;
  advantage->add_option("FILE", advantage_file, "JSONL groups: {\"group_id\", \"rewards\": [...]}")->required();
  add_common_flags(advantage, flags);

  auto* loss = app.add_subcommand("grpo-loss", "Clipped policy loss over JSONL samples");
  std::string loss_file;
  loss->add_option("FILE", loss_file, "JSONL samples: ratio or log_prob/old_log_prob, advantage")->required();
  add_common_flags(loss, flags);

  auto* evaluate = app.add_subcommand("evaluate", "Structure-aware precision/recall/F1 over a corpus");
  std::string corpus_file;
  std::string eval_format = "json";
  bool macro = false;
  evaluate->add_option("CORPUS", corpus_file, "JSONL corpus: id, prediction, reference, paradigm")->required();
  evaluate->add_option("--format", eval_format, "json | csv | markdown (markdown-table)")->check(CLI::IsMember({"json", "csv", "markdown", "markdown-table"}));
  evaluate->add_flag("--macro", macro, "Average per-record scores instead of pooling counts");
  add_common_flags(evaluate, flags);

  auto* report = app.add_subcommand("report", "Render a stored JSON report");
  std::string report_file;
  std::string report_format = "markdown";
  report->add_option("REPORT", report_file, "JSON report written by evaluate")->required();
  report->add_option("--format", report_format, "json | csv | markdown (markdown-table)")->check(CLI::IsMember({"json", "csv", "markdown", "markdown-table"}));
  add_common_flags(report, flags);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kDataError;
  }

  try {
    const RunConfig config = resolve_config(flags, env);
    const Output output(out, flags.out);
    if (parse->parsed()) return cmd_parse(kind, parse_file, config, output, err);
    if (validate->parsed()) return cmd_validate(validate_file, output);
    if (reward->parsed()) return cmd_reward(reward_in, reward_out, paradigm, explain, config, output, err);
    if (advantage->parsed()) return cmd_advantage(advantage_file, config, output);
    if (loss->parsed()) return cmd_grpo_loss(loss_file, config, output);
    if (evaluate->parsed()) return cmd_evaluate(corpus_file, eval_format, macro, config, output);
    if (report->parsed()) return cmd_report(report_file, report_format, output);
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return is_infrastructure(e.kind()) ? kServiceError : kDataError;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what());
    return kDataError;
  }
  return kDataError;
}

}  // namespace oowm::cli
