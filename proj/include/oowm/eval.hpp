#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oowm/diagram.hpp"
#include "oowm/embedding.hpp"
#include "oowm/parser.hpp"
#include "oowm/reward.hpp"

namespace oowm {

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct EvalRecord {
  std::string id;
  std::string prediction;
  std::string reference;
  Paradigm paradigm = Paradigm::oowm;
  std::optional<std::string> prediction_structured;
  std::optional<std::string> split;  // train | val | test
};

struct CorpusReject {
  int line = 0;
  std::string message;
};

struct Corpus {
  std::vector<EvalRecord> records;
  std::vector<CorpusReject> rejects;
};

/// Reads newline-delimited JSON records. Malformed lines become rejects with
/// their line number; a duplicate id throws Error(schema_error).
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Per-record evaluation
// ---------------------------------------------------------------------------

enum class Verdict { TP, FP, FN };

struct NodeVerdict {
  Verdict classification = Verdict::FN;
  std::optional<double> similarity;  // set when the node was matched
  PartitionKey partition;
};

/// Similarities within this distance below the threshold still count as
/// reaching it. Hashed embeddings hit ratios such as 2/4 exactly, and
/// rounding would otherwise decide those pairs.
inline constexpr double kThresholdTolerance = 1e-9;

inline bool meets_threshold(double similarity, double threshold) {
  return similarity >= threshold - kThresholdTolerance;
}

struct EvalOptions {
  double threshold = 0.5;
  ParseMode parse_mode = ParseMode::lenient;
  CollectOptions collect;
};

struct RecordEvaluation {
  std::string id;
  std::vector<NodeVerdict> verdicts;
  std::vector<double> matched_similarities;  // raw cosine of every matched pair
  int predicted_nodes = 0;
  int reference_nodes = 0;
  bool prediction_parse_failure = false;
  std::vector<std::string> reference_defects;

  double mean_similarity() const;
};

/// Node-level verdicts for one record. Each scored partition is greedily
/// aligned; a matched pair at or above the threshold is one TP, below it is
/// one FP plus one FN, and unmatched nodes are FP (prediction) or FN
/// (reference). A prediction that fails to parse turns every reference node
/// into an FN.
///
/// Text-paradigm records are scored through `prediction_structured`; throws
/// Error(missing_structured_prediction) without it and
/// Error(reference_parse_error) when the reference is not a diagram.
RecordEvaluation evaluate_record(const EvalRecord& record, const EmbeddingProvider& provider,
                                 const EvalOptions& options = {});

struct RejectedRecord {
  std::string id;
  std::string kind;
  std::string message;

  bool operator==(const RejectedRecord&) const = default;
};

struct CorpusEvaluation {
  std::vector<RecordEvaluation> records;  // input order
  std::vector<RejectedRecord> rejected;   // data defects, excluded from metrics
};

/// Evaluates records on up to `parallelism` threads. Results keep input
/// order. Data defects are collected; service failures abort the run.
CorpusEvaluation evaluate_corpus(std::span<const EvalRecord> records,
                                 const EmbeddingProvider& provider, const EvalOptions& options,
                                 std::size_t parallelism = 1);

// ---------------------------------------------------------------------------
// Aggregation and reports
// ---------------------------------------------------------------------------

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

Counts count_verdicts(std::span<const NodeVerdict> verdicts);

double precision(const Counts& c);
double recall(const Counts& c);
double f1_score(double p, double r);

struct MetricBlock {
  double similarity = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Counts counts;
  long matched_pairs = 0;

  bool operator==(const MetricBlock&) const = default;
};

enum class Averaging { micro, macro };

struct MetricsReport {
  double threshold = 0.5;
  Averaging averaging = Averaging::micro;
  MetricBlock overall;
  std::vector<std::pair<PartitionKey, MetricBlock>> per_partition;
  long n_records = 0;
  long n_parse_failures = 0;
  std::vector<RejectedRecord> rejected;
  std::vector<std::string> flags;  // e.g. "empty_corpus"

  bool operator==(const MetricsReport&) const = default;
};

/// Micro averaging pools TP/FP/FN over every record and partition before
/// computing P/R/F1; macro averages per-record scores. Similarity is the mean
/// over all matched pairs (micro) or of per-record means (macro).
MetricsReport aggregate(std::span<const RecordEvaluation> records,
                        Averaging averaging = Averaging::micro, double threshold = 0.5);

enum class ReportFormat { json, csv, markdown };

std::optional<ReportFormat> report_format_from_string(std::string_view s);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

std::string render_report(const MetricsReport& report, ReportFormat format);

/// Renders and writes atomically.
void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace oowm
