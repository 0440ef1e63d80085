#include "oowm/eval.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "oowm/alignment.hpp"
#include "oowm/envelope.hpp"
#include "oowm/error.hpp"
#include "oowm/io.hpp"
#include "text_util.hpp"

namespace oowm {

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> optional_string(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_string()) throw std::invalid_argument(std::string("field '") + field + "' must be a string");
  return j[field].get<std::string>();
}

std::string required_string(const nlohmann::json& j, const char* field) {
  auto v = optional_string(j, field);
  if (!v) throw std::invalid_argument(std::string("missing field '") + field + "'");
  return *v;
}

}  // namespace

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    EvalRecord rec;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
      rec.id = required_string(j, "id");
      rec.prediction = required_string(j, "prediction");
      rec.reference = required_string(j, "reference");
      rec.paradigm = paradigm_from_string(required_string(j, "paradigm"));
      rec.prediction_structured = optional_string(j, "prediction_structured");
      rec.split = optional_string(j, "split");
      if (rec.split && *rec.split != "train" && *rec.split != "val" && *rec.split != "test")
        throw std::invalid_argument("split must be train, val or test");
    } catch (const std::exception& e) {
      corpus.rejects.push_back({line_no, e.what()});
      continue;
    }
    if (!ids.insert(rec.id).second)
      throw Error(ErrorKind::schema_error,
                  "line " + std::to_string(line_no) + ": duplicate record id \"" + rec.id + "\"");
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  return read_corpus(in);
}

// ---------------------------------------------------------------------------
// Per-record evaluation
// ---------------------------------------------------------------------------

double RecordEvaluation::mean_similarity() const {
  if (matched_similarities.empty()) return 0.0;
  double sum = 0.0;
  for (double s : matched_similarities) sum += s;
  return sum / static_cast<double>(matched_similarities.size());
}

namespace {

std::string diagram_payload(std::string_view text) {
  if (text.find("<answer>") != std::string_view::npos) {
    Envelope env = split_envelope(text, {.require_think_first = false});
    if (env.answer) return *env.answer;
  }
  return std::string(detail::trim(text));
}

}  // namespace

RecordEvaluation evaluate_record(const EvalRecord& record, const EmbeddingProvider& provider,
                                 const EvalOptions& options) {
  std::string prediction_source;
  if (record.paradigm == Paradigm::text) {
    if (!record.prediction_structured)
      throw Error(ErrorKind::missing_structured_prediction,
                  "record \"" + record.id + "\" uses the text paradigm but has no prediction_structured");
    prediction_source = diagram_payload(*record.prediction_structured);
  } else {
    prediction_source = diagram_payload(record.prediction);
  }

  auto ref = parse_activity(diagram_payload(record.reference), options.parse_mode);
  if (!ref)
    throw Error(ErrorKind::reference_parse_error,
                "record \"" + record.id + "\": reference does not parse: " +
                    std::string(to_string(ref.error().kind)) + " at line " +
                    std::to_string(ref.error().line));
  auto pred = parse_activity(prediction_source, options.parse_mode);

  RecordEvaluation out;
  out.id = record.id;
  out.prediction_parse_failure = !pred.ok();

  // Gather every node once so the provider sees a single batch.
  struct Side {
    std::size_t begin = 0, count = 0;
  };
  std::vector<std::string> texts;
  std::vector<std::pair<Side, Side>> sides;
  for (const auto& key : scored_partitions()) {
    if (!ref.value().find_partition(key))
      out.reference_defects.push_back("reference lacks partition " + to_string(key));
    Side p{texts.size(), 0};
    if (pred)
      for (auto& n : collect_action_nodes(pred.value(), key, options.collect)) texts.push_back(std::move(n.text));
    p.count = texts.size() - p.begin;
    Side r{texts.size(), 0};
    for (auto& n : collect_action_nodes(ref.value(), key, options.collect)) texts.push_back(std::move(n.text));
    r.count = texts.size() - r.begin;
    sides.emplace_back(p, r);
  }
  std::vector<EmbeddingVector> vectors;
  if (!texts.empty()) vectors = embed_batch(provider, texts);

  auto slice = [&](Side s) {
    return std::vector<EmbeddingVector>(vectors.begin() + static_cast<std::ptrdiff_t>(s.begin),
                                        vectors.begin() + static_cast<std::ptrdiff_t>(s.begin + s.count));
  };

  for (std::size_t k = 0; k < sides.size(); ++k) {
    const PartitionKey& key = scored_partitions()[k];
    const auto [p, r] = sides[k];
    out.predicted_nodes += static_cast<int>(p.count);
    out.reference_nodes += static_cast<int>(r.count);
    const MatchSet match = greedy_match(slice(p), slice(r));
    for (const auto& pair : match.pairs) {
      out.matched_similarities.push_back(pair.similarity);
      if (meets_threshold(pair.similarity, options.threshold)) {
        out.verdicts.push_back({Verdict::TP, pair.similarity, key});
      } else {
        out.verdicts.push_back({Verdict::FP, pair.similarity, key});
        out.verdicts.push_back({Verdict::FN, pair.similarity, key});
      }
    }
    for (std::size_t n = 0; n < match.unmatched_pred.size(); ++n)
      out.verdicts.push_back({Verdict::FP, std::nullopt, key});
    for (std::size_t n = 0; n < match.unmatched_ref.size(); ++n)
      out.verdicts.push_back({Verdict::FN, std::nullopt, key});
  }
  return out;
}

CorpusEvaluation evaluate_corpus(std::span<const EvalRecord> records,
                                 const EmbeddingProvider& provider, const EvalOptions& options,
                                 std::size_t parallelism) {
  const std::size_t n = records.size();
  std::vector<std::optional<RecordEvaluation>> results(n);
  std::vector<std::optional<RejectedRecord>> rejects(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    while (!aborted.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = evaluate_record(records[i], provider, options);
      } catch (const Error& e) {
        if (is_infrastructure(e.kind())) {
          std::lock_guard lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
          aborted = true;
        } else {
          rejects[i] = RejectedRecord{records[i].id, std::string(to_string(e.kind())), e.what()};
        }
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        aborted = true;
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(parallelism, n));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (fatal) std::rethrow_exception(fatal);

  CorpusEvaluation out;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) out.records.push_back(std::move(*results[i]));
    if (rejects[i]) out.rejected.push_back(std::move(*rejects[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

Counts count_verdicts(std::span<const NodeVerdict> verdicts) {
  Counts c;
  for (const auto& v : verdicts) {
    switch (v.classification) {
      case Verdict::TP: ++c.tp; break;
      case Verdict::FP: ++c.fp; break;
      case Verdict::FN: ++c.fn; break;
    }
  }
  return c;
}

double precision(const Counts& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const Counts& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1_score(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

namespace {

// Running sums for one slice of the corpus (overall or one partition).
struct Accumulator {
  Counts counts;
  double similarity_sum = 0.0;
  long matched = 0;
  // macro
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0, sim_mean_sum = 0.0;
  long units = 0, sim_units = 0;

  void add_unit(const Counts& c, double sim_sum, long n_matched) {
    counts += c;
    similarity_sum += sim_sum;
    matched += n_matched;
    const double p = precision(c), r = recall(c);
    p_sum += p;
    r_sum += r;
    f_sum += f1_score(p, r);
    ++units;
    if (n_matched > 0) {
      sim_mean_sum += sim_sum / static_cast<double>(n_matched);
      ++sim_units;
    }
  }

  MetricBlock finish(Averaging averaging) const {
    MetricBlock b;
    b.counts = counts;
    b.matched_pairs = matched;
    if (averaging == Averaging::micro) {
      b.similarity = matched == 0 ? 0.0 : similarity_sum / static_cast<double>(matched);
      b.precision = precision(counts);
      b.recall = recall(counts);
      b.f1 = f1_score(b.precision, b.recall);
    } else {
      const double u = units == 0 ? 1.0 : static_cast<double>(units);
      b.similarity = sim_units == 0 ? 0.0 : sim_mean_sum / static_cast<double>(sim_units);
      b.precision = p_sum / u;
      b.recall = r_sum / u;
      b.f1 = f_sum / u;
    }
    return b;
  }
};

}  // namespace

MetricsReport aggregate(std::span<const RecordEvaluation> records, Averaging averaging,
                        double threshold) {
  MetricsReport report;
  report.threshold = threshold;
  report.averaging = averaging;
  report.n_records = static_cast<long>(records.size());

  const auto& keys = scored_partitions();
  Accumulator overall;
  std::vector<Accumulator> parts(keys.size());

  for (const auto& rec : records) {
    if (rec.prediction_parse_failure) ++report.n_parse_failures;
    double sim_sum = 0.0;
    for (double s : rec.matched_similarities) sim_sum += s;
    overall.add_unit(count_verdicts(rec.verdicts), sim_sum,
                     static_cast<long>(rec.matched_similarities.size()));

    for (std::size_t k = 0; k < keys.size(); ++k) {
      Counts c;
      double part_sim = 0.0;
      long part_matched = 0;
      for (const auto& v : rec.verdicts) {
        if (!(v.partition == keys[k])) continue;
        switch (v.classification) {
          case Verdict::TP: ++c.tp; break;
          case Verdict::FP: ++c.fp; break;
          case Verdict::FN: ++c.fn; break;
        }
        // Each matched pair contributes exactly one TP or one FP carrying its similarity.
        if (v.similarity && v.classification != Verdict::FN) {
          part_sim += *v.similarity;
          ++part_matched;
        }
      }
      parts[k].add_unit(c, part_sim, part_matched);
    }
  }

  report.overall = overall.finish(averaging);
  for (std::size_t k = 0; k < keys.size(); ++k)
    report.per_partition.emplace_back(keys[k], parts[k].finish(averaging));
  if (records.empty()) report.flags.push_back("empty_corpus");
  return report;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md" || s == "markdown-table") return ReportFormat::markdown;
  return std::nullopt;
}

namespace {

nlohmann::ordered_json block_to_json(const MetricBlock& b) {
  nlohmann::ordered_json j;
  j["similarity"] = b.similarity;
  j["precision"] = b.precision;
  j["recall"] = b.recall;
  j["f1"] = b.f1;
  j["tp"] = b.counts.tp;
  j["fp"] = b.counts.fp;
  j["fn"] = b.counts.fn;
  j["matched_pairs"] = b.matched_pairs;
  return j;
}

MetricBlock block_from_json(const nlohmann::json& j) {
  MetricBlock b;
  b.similarity = j.at("similarity").get<double>();
  b.precision = j.at("precision").get<double>();
  b.recall = j.at("recall").get<double>();
  b.f1 = j.at("f1").get<double>();
  b.counts.tp = j.at("tp").get<long>();
  b.counts.fp = j.at("fp").get<long>();
  b.counts.fn = j.at("fn").get<long>();
  b.matched_pairs = j.at("matched_pairs").get<long>();
  return b;
}

std::string fixed4(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << v;
  return os.str();
}

std::string exact(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["threshold"] = report.threshold;
  j["averaging"] = report.averaging == Averaging::micro ? "micro" : "macro";
  j["overall"] = block_to_json(report.overall);
  nlohmann::ordered_json parts = nlohmann::ordered_json::object();
  for (const auto& [key, block] : report.per_partition) parts[to_string(key)] = block_to_json(block);
  j["per_partition"] = std::move(parts);
  j["n_records"] = report.n_records;
  j["n_parse_failures"] = report.n_parse_failures;
  nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
  for (const auto& r : report.rejected)
    rejected.push_back({{"id", r.id}, {"kind", r.kind}, {"message", r.message}});
  j["rejected"] = std::move(rejected);
  j["flags"] = report.flags;
  return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  try {
    r.threshold = j.at("threshold").get<double>();
    const auto averaging = j.at("averaging").get<std::string>();
    if (averaging != "micro" && averaging != "macro")
      throw Error(ErrorKind::schema_error, "averaging must be micro or macro");
    r.averaging = averaging == "micro" ? Averaging::micro : Averaging::macro;
    r.overall = block_from_json(j.at("overall"));
    for (const auto& [name, block] : j.at("per_partition").items()) {
      auto key = partition_key_from_string(name);
      if (!key) throw Error(ErrorKind::schema_error, "unknown partition key " + name);
      r.per_partition.emplace_back(*key, block_from_json(block));
    }
    r.n_records = j.at("n_records").get<long>();
    r.n_parse_failures = j.at("n_parse_failures").get<long>();
    for (const auto& x : j.at("rejected"))
      r.rejected.push_back({x.at("id").get<std::string>(), x.at("kind").get<std::string>(),
                            x.at("message").get<std::string>()});
    r.flags = j.at("flags").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema_error, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string render_report(const MetricsReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return report_to_json(report).dump(2) + "\n";
    case ReportFormat::csv: {
      std::string out = "scope,similarity,precision,recall,f1,tp,fp,fn,matched_pairs,n_records,n_parse_failures\n";
      if (report.n_records == 0) return out;
      auto row = [&](const std::string& scope, const MetricBlock& b) {
        out += scope + "," + exact(b.similarity) + "," + exact(b.precision) + "," +
               exact(b.recall) + "," + exact(b.f1) + "," + std::to_string(b.counts.tp) + "," +
               std::to_string(b.counts.fp) + "," + std::to_string(b.counts.fn) + "," +
               std::to_string(b.matched_pairs) + "," + std::to_string(report.n_records) + "," +
               std::to_string(report.n_parse_failures) + "\n";
      };
      row("overall", report.overall);
      for (const auto& [key, block] : report.per_partition) row(to_string(key), block);
      return out;
    }
    case ReportFormat::markdown: {
      std::string out = "| Similarity | Precision | Recall | F1 |\n| --- | --- | --- | --- |\n";
      const auto& o = report.overall;
      out += "| " + fixed4(o.similarity) + " | " + fixed4(o.precision) + " | " + fixed4(o.recall) +
             " | " + fixed4(o.f1) + " |\n";
      out += "\n| Partition | Similarity | Precision | Recall | F1 | TP | FP | FN |\n"
             "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
      for (const auto& [key, b] : report.per_partition)
        out += "| " + to_string(key) + " | " + fixed4(b.similarity) + " | " + fixed4(b.precision) +
               " | " + fixed4(b.recall) + " | " + fixed4(b.f1) + " | " + std::to_string(b.counts.tp) +
               " | " + std::to_string(b.counts.fp) + " | " + std::to_string(b.counts.fn) + " |\n";
      out += "\nRecords: " + std::to_string(report.n_records) +
             ", parse failures: " + std::to_string(report.n_parse_failures) +
             ", averaging: " + (report.averaging == Averaging::micro ? "micro" : "macro") +
             ", threshold: " + exact(report.threshold) + "\n";
      return out;
    }
  }
  return {};
}

void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file_atomic(path, render_report(report, format));
}

}  // namespace oowm
